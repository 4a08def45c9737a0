"""Approximation operators: Lipschitz infimal convolution, partition
discretization, oscillation control, cost normalization, and the monotone
beta* limit check."""
from __future__ import annotations

from dataclasses import dataclass

from .costs import CostMatrix, PotentialPair, as_cost, potential_defect
from .errors import (
    EmptyAnchorSet,
    InfeasibleWitness,
    LipschitzBoundViolated,
    MissingRepresentative,
    NotMonotone,
    ValidationError,
)
from .numeric import Context, Number, resolve_context
from .spaces import Mask, Matrix, Partition, ProbabilitySpace, Vector, mask_indices
from .transport import solve_beta_star


def lipschitz_infconv(
    c,
    n: Number,
    space_x: ProbabilitySpace,
    anchor_set: Mask | None = None,
    ctx: Context | None = None,
) -> CostMatrix:
    """Entrywise infimal convolution min over anchors z of n*d(x,z) + c(z,y).

    The output is n-Lipschitz in x (uniformly in y) for any nonempty anchor
    set, and sits below c wherever x is itself an anchor.  With the full
    anchor set it is the largest n-Lipschitz-in-x function below c.
    """
    cost = as_cost(c)
    if space_x.metric is None:
        raise ValidationError("infimal convolution needs a metric on X")
    ctx = resolve_context(ctx, cost.values, space_x.metric, n)
    n = ctx.number(n)
    if n <= 0:
        raise ValidationError("the Lipschitz parameter must be positive")
    values = ctx.matrix(cost.values)
    d = ctx.matrix(space_x.metric)
    m = len(values)
    if m != space_x.size:
        raise ValidationError("cost row count differs from the X point count")
    anchors = range(m) if anchor_set is None else mask_indices(anchor_set)
    anchors = tuple(anchors)
    if not anchors:
        raise EmptyAnchorSet("the anchor set is empty")
    ny = len(values[0]) if values else 0
    out = []
    for x in range(m):
        dx = d[x]
        row = []
        for y in range(ny):
            row.append(min(n * dx[z] + values[z][y] for z in anchors))
        out.append(tuple(row))
    return CostMatrix(values=tuple(out))


def shifted_infconv(
    c,
    n: Number,
    space_x: ProbabilitySpace,
    f,
    ctx: Context | None = None,
) -> CostMatrix:
    """min over all z of n*d(x,z) + c(z,y) - f(z): the infimal convolution of
    the shifted cost c - f."""
    cost = as_cost(c)
    if space_x.metric is None:
        raise ValidationError("infimal convolution needs a metric on X")
    ctx = resolve_context(ctx, cost.values, space_x.metric, tuple(f), n)
    values = ctx.matrix(cost.values)
    shifted = tuple(
        tuple(x - fz for x in row) for row, fz in zip(values, ctx.vector(f))
    )
    return lipschitz_infconv(shifted, n, space_x, ctx=ctx)


def row_min_potential(c, g=None) -> Vector:
    """f(x) = min over y of c(x,y) - g(y); the tight lower potential for g."""
    values = as_cost(c).values
    if g is None:
        return tuple(min(row) for row in values)
    return tuple(min(x - gy for x, gy in zip(row, g)) for row in values)


def partition_discretize(c, partition: Partition, ctx: Context | None = None) -> CostMatrix:
    """Replace each row by its cell representative's row; the null cell keeps c."""
    values = as_cost(c).values
    if len(values) != partition.size:
        raise ValidationError("cost row count differs from the partition size")
    rows = list(values)
    for k in partition.non_null_cells():
        members = mask_indices(partition.cells[k])
        if not members:
            continue
        rep = partition.representatives[k]
        if rep is None:
            raise MissingRepresentative(f"cell {k} has members but no representative")
        for x in members:
            rows[x] = values[rep]
    return CostMatrix(values=tuple(rows))


def oscillation(c, partition: Partition, ctx: Context | None = None) -> tuple[Number | None, ...]:
    """Per cell, the worst sup over y of |c(x,y) - c(z,y)| for x, z in the cell.

    The null cell's entry is None: its oscillation is never constrained.
    """
    values = as_cost(c).values
    ctx = resolve_context(ctx, values)
    if len(values) != partition.size:
        raise ValidationError("cost row count differs from the partition size")
    out: list[Number | None] = []
    for k, cell in enumerate(partition.cells):
        if k == partition.null_cell_index:
            out.append(None)
            continue
        members = mask_indices(cell)
        worst = ctx.number(0)
        for a in range(len(members)):
            ra = values[members[a]]
            for b in range(a + 1, len(members)):
                rb = values[members[b]]
                spread = max(abs(x - z) for x, z in zip(ra, rb)) if ra else ctx.number(0)
                if spread > worst:
                    worst = spread
        out.append(worst)
    return tuple(out)


def oscillation_partition(
    c,
    eps: Number,
    space_x: ProbabilitySpace,
    lipschitz_bound: Number,
    ctx: Context | None = None,
) -> Partition:
    """Greedy diameter clustering into cells on which c oscillates by <= eps.

    Verifies first that sup over y of |c(x,y) - c(z,y)| <= u*d(x,z) on every
    pair (raising with the witnessing pair otherwise), then grows cells of
    diameter < eps/u, seeding each new cell at the unassigned point farthest
    from the seeds already chosen.
    """
    cost = as_cost(c)
    if space_x.metric is None:
        raise ValidationError("partitioning needs a metric on X")
    ctx = resolve_context(ctx, cost.values, space_x.metric, eps, lipschitz_bound)
    eps = ctx.number(eps)
    u = ctx.number(lipschitz_bound)
    if eps <= 0 or u <= 0:
        raise ValidationError("eps and the Lipschitz bound must be positive")
    values = ctx.matrix(cost.values)
    d = ctx.matrix(space_x.metric)
    m = len(values)
    if m != space_x.size:
        raise ValidationError("cost row count differs from the X point count")
    for x in range(m):
        for z in range(x + 1, m):
            spread = max(abs(a - b) for a, b in zip(values[x], values[z])) if values[x] else 0
            if not ctx.leq(spread, u * d[x][z]):
                raise LipschitzBoundViolated(
                    f"|c({x},.) - c({z},.)| reaches {spread} > {u} * d = {u * d[x][z]}",
                    pair=(x, z),
                )
    threshold = eps / u
    unassigned = set(range(m))
    seeds: list[int] = []
    cells: list[list[int]] = []
    while unassigned:
        if not seeds:
            seed = min(unassigned)
        else:
            seed = max(
                unassigned,
                key=lambda p: (min(d[p][s] for s in seeds), -p),
            )
        seeds.append(seed)
        members = [seed]
        unassigned.discard(seed)
        for z in sorted(unassigned):
            if all(d[w][z] < threshold for w in members):
                members.append(z)
                unassigned.discard(z)
        cells.append(sorted(members))
    masks = []
    for members in cells:
        bits = [False] * m
        for i in members:
            bits[i] = True
        masks.append(tuple(bits))
    return Partition(cells=tuple(masks), representatives=tuple(seeds))


def normalize_cost(c, lower: PotentialPair, ctx: Context | None = None) -> CostMatrix:
    """Subtract a feasible lower pair: h = c - (f+g), nonnegative entrywise."""
    cost = as_cost(c)
    ctx = resolve_context(ctx, cost.values, lower.f, lower.g)
    if lower.side != "lower":
        raise InfeasibleWitness("normalization needs a lower-side pair")
    defect = potential_defect(lower, ctx.matrix(cost.values), ctx)
    if not ctx.leq(defect, 0):
        raise InfeasibleWitness(f"pair exceeds the cost by {defect} somewhere")
    zero = ctx.number(0)
    rows = []
    for row, fi in zip(ctx.matrix(cost.values), ctx.vector(lower.f)):
        out = []
        for x, gj in zip(row, ctx.vector(lower.g)):
            h = x - fi - gj
            out.append(h if h > 0 else zero if ctx.nonneg(h) else h)
        rows.append(tuple(out))
    return CostMatrix(values=tuple(rows))


def lipschitz_modulus(c, metric: Matrix, ctx: Context | None = None) -> Number | None:
    """Smallest u with sup_y |c(x,y) - c(z,y)| <= u*d(x,z) for all pairs.

    Returns None when no finite u works (distinct rows at distance 0).
    """
    values = as_cost(c).values
    ctx = resolve_context(ctx, values, tuple(tuple(r) for r in metric))
    worst = ctx.number(0)
    for x in range(len(values)):
        for z in range(x + 1, len(values)):
            spread = max(abs(a - b) for a, b in zip(values[x], values[z])) if values[x] else 0
            dist = metric[x][z]
            if ctx.is_zero(dist):
                if not ctx.is_zero(spread):
                    return None
                continue
            ratio = spread / dist
            if ratio > worst:
                worst = ratio
    return worst


@dataclass(frozen=True)
class ApproximantSequence:
    """A base cost with staged approximants expected to increase toward it."""

    base_cost: CostMatrix
    stages: tuple[tuple[Number, CostMatrix], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "base_cost", as_cost(self.base_cost))
        object.__setattr__(
            self,
            "stages",
            tuple((param, as_cost(stage)) for param, stage in self.stages),
        )
        shape = self.base_cost.shape
        for _, stage in self.stages:
            if stage.shape != shape:
                raise ValidationError("stage shape differs from the base cost")


def infconv_sequence(
    c,
    space_x: ProbabilitySpace,
    n_values,
    anchor_set: Mask | None = None,
    ctx: Context | None = None,
) -> ApproximantSequence:
    base = as_cost(c)
    stages = tuple(
        (n, lipschitz_infconv(base, n, space_x, anchor_set=anchor_set, ctx=ctx))
        for n in n_values
    )
    return ApproximantSequence(base_cost=base, stages=stages)


@dataclass(frozen=True)
class BetaStarLimitReport:
    stage_values: tuple[Number, ...]
    base_value: Number
    final_gap: Number


def beta_star_limit_check(
    sequence: ApproximantSequence, mu, nu, ctx: Context | None = None
) -> BetaStarLimitReport:
    """beta* along a nondecreasing stage sequence, with the gap to the base.

    Raises NotMonotone when the stages fail to increase entrywise toward the
    base, or (float-mode pathology only) when the beta* values themselves
    fail to be nondecreasing.
    """
    base = sequence.base_cost
    ctx = resolve_context(ctx, base.values, tuple(mu), tuple(nu))
    previous = None
    for param, stage in sequence.stages:
        if previous is not None:
            for row_a, row_b in zip(previous.values, stage.values):
                for a, b in zip(row_a, row_b):
                    if not ctx.leq(a, b):
                        raise NotMonotone(f"stage {param} drops below its predecessor")
        for row_s, row_c in zip(stage.values, base.values):
            for s, x in zip(row_s, row_c):
                if not ctx.leq(s, x):
                    raise NotMonotone(f"stage {param} exceeds the base cost")
        previous = stage
    stage_values = tuple(
        solve_beta_star(stage, mu, nu, ctx).value for _, stage in sequence.stages
    )
    for a, b in zip(stage_values, stage_values[1:]):
        if not ctx.leq(a, b):
            raise NotMonotone("beta* values decreased along the stages")
    base_value = solve_beta_star(base, mu, nu, ctx).value
    final_gap = base_value - stage_values[-1] if stage_values else base_value
    return BetaStarLimitReport(
        stage_values=stage_values, base_value=base_value, final_gap=final_gap
    )
