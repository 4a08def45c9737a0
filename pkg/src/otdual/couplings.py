"""Coupling constructions: partition extension, Monge maps, product and
diagonal couplings."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import MarginalMismatch, NotMeasurePreserving, SpaceMismatch, ValidationError
from .numeric import Context, resolve_context
from .spaces import Matrix, Partition, ProbabilitySpace, Vector, mask_indices, pushforward
from .transport import Coupling


@dataclass(frozen=True)
class CoarseCoupling:
    """A coupling between the cells of a partition of X and the points of Y.

    Row k is the mass the coarse plan sends from cell k; row sums must equal
    the cell masses and column sums the target marginal nu.
    """

    partition: Partition
    matrix: Matrix
    nu: Vector

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", tuple(tuple(r) for r in self.matrix))
        object.__setattr__(self, "nu", tuple(self.nu))
        if len(self.matrix) != len(self.partition.cells):
            raise ValidationError("one coarse row per partition cell is required")
        if any(len(row) != len(self.nu) for row in self.matrix):
            raise ValidationError("coarse rows must match the length of nu")


def extend_coupling(coarse: CoarseCoupling, mu, ctx: Context | None = None) -> Coupling:
    """Extend a coarse plan to the full space: the mass a cell sends to y is
    spread over the cell's points proportionally to their conditional weight.

    The result has marginals exactly mu and nu and agrees with the coarse
    plan on every (union of cells) x (subset of Y) rectangle.  Cells of mass
    zero are skipped; their points receive zero rows.
    """
    ctx = resolve_context(ctx, coarse.matrix, coarse.nu, tuple(mu))
    mu = ctx.vector(mu)
    t = ctx.matrix(coarse.matrix)
    nu = ctx.vector(coarse.nu)
    partition = coarse.partition
    if partition.size != len(mu):
        raise ValidationError("mu length differs from the partition's space size")
    masses = partition.cell_masses(mu)
    for k, (mass, row) in enumerate(zip(masses, t)):
        row_sum = sum(row)
        if not ctx.eq(row_sum, mass):
            raise MarginalMismatch(
                f"coarse row {k} sums to {row_sum}, cell mass is {mass}"
            )
        for y, x in enumerate(row):
            if not ctx.nonneg(x):
                raise MarginalMismatch(f"coarse entry ({k}, {y}) = {x} is negative")
    for y in range(len(nu)):
        col = sum(row[y] for row in t)
        if not ctx.eq(col, nu[y]):
            raise MarginalMismatch(f"coarse column {y} sums to {col}, nu is {nu[y]}")
    zero = ctx.number(0)
    rows = [[zero] * len(nu) for _ in range(len(mu))]
    for k, cell in enumerate(partition.cells):
        if ctx.is_zero(masses[k]):
            continue
        for x in mask_indices(cell):
            share = mu[x] / masses[k]
            rows[x] = [share * v for v in t[k]]
    return Coupling(matrix=tuple(tuple(r) for r in rows), mu=mu, nu=nu)


def monge_coupling(
    space_x: ProbabilitySpace, mapping: Sequence[int], nu, ctx: Context | None = None
) -> Coupling:
    """The coupling concentrated on the graph of a measure-preserving map."""
    ctx = resolve_context(ctx, space_x.weights, tuple(nu))
    mu = ctx.vector(space_x.weights)
    nu = ctx.vector(nu)
    image = pushforward(space_x, mapping, len(nu), ctx)
    defect = tuple(b - a for a, b in zip(image, nu))
    if any(not ctx.is_zero(x) for x in defect):
        raise NotMeasurePreserving(
            f"pushforward of mu differs from nu; defect vector {defect}",
            defect=defect,
        )
    zero = ctx.number(0)
    rows = [[zero] * len(nu) for _ in range(len(mu))]
    for i, t in enumerate(mapping):
        rows[i][t] = mu[i]
    return Coupling(matrix=tuple(tuple(r) for r in rows), mu=mu, nu=nu)


def product_coupling(mu, nu, ctx: Context | None = None) -> Coupling:
    ctx = resolve_context(ctx, tuple(mu), tuple(nu))
    mu = ctx.vector(mu)
    nu = ctx.vector(nu)
    return Coupling(
        matrix=tuple(tuple(a * b for b in nu) for a in mu), mu=mu, nu=nu
    )


def diagonal_coupling(space, target=None, ctx: Context | None = None) -> Coupling:
    """diag(mu) on a common point set; both marginals are mu.

    Accepts a ProbabilitySpace or a bare weight vector.  When both ``space``
    and ``target`` are spaces their point sets must coincide.
    """
    if isinstance(space, ProbabilitySpace):
        weights = space.weights
        if isinstance(target, ProbabilitySpace) and target.points != space.points:
            raise SpaceMismatch("diagonal coupling needs X and Y to share points")
    else:
        weights = tuple(space)
        if target is not None and isinstance(target, ProbabilitySpace):
            if len(target.points) != len(weights):
                raise SpaceMismatch("diagonal coupling needs equal point counts")
    ctx = resolve_context(ctx, tuple(weights))
    mu = ctx.vector(weights)
    zero = ctx.number(0)
    n = len(mu)
    matrix = tuple(
        tuple(mu[i] if i == j else zero for j in range(n)) for i in range(n)
    )
    return Coupling(matrix=matrix, mu=mu, nu=mu)
