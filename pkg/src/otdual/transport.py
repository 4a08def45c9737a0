"""Exact transport values on finite spaces: alpha, alpha*, beta, beta*.

alpha(c) is the minimum of sum P*c over couplings P with marginals mu, nu;
alpha*(c) the maximum.  beta(c) is the best separable lower bound
sup{mu(f)+nu(g) : f+g <= c} and beta*(c) the best separable upper bound.
On finite spaces the LP duals close both gaps, so beta and beta* are read
off the same solve as the primal.

The primal algorithm is a network simplex specialized to the bipartite
transportation structure, pivoting with Bland's rule (smallest cell in
lexicographic order enters; smallest tying cell leaves) so it cannot cycle
even on degenerate instances.  Dual potentials are the node potentials at
optimality.  In rational mode every quantity is exact: flows live in the
lattice generated by the marginals and potentials are signed sums of cost
entries.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .costs import PotentialPair, as_cost, negate_matrix
from .errors import DimensionMismatch, DualityError, InfeasibleMarginals
from .numeric import Context, Number, resolve_context
from .spaces import Matrix, Vector

ALPHA = "alpha"
ALPHA_STAR = "alpha_star"
BETA = "beta"
BETA_STAR = "beta_star"


@dataclass(frozen=True)
class Coupling:
    """A joint matrix over X x Y claiming marginals mu and nu."""

    matrix: Matrix
    mu: Vector
    nu: Vector

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", tuple(tuple(r) for r in self.matrix))
        object.__setattr__(self, "mu", tuple(self.mu))
        object.__setattr__(self, "nu", tuple(self.nu))

    def row_sums(self) -> Vector:
        return tuple(sum(row) for row in self.matrix)

    def col_sums(self) -> Vector:
        if not self.matrix:
            return ()
        return tuple(sum(col) for col in zip(*self.matrix))


@dataclass(frozen=True)
class CouplingDefects:
    ok: bool
    max_row_defect: Number
    max_col_defect: Number
    min_entry: Number
    total_mass: Number


def coupling_defects(coupling: Coupling, ctx: Context | None = None) -> CouplingDefects:
    ctx = resolve_context(ctx, coupling.matrix, coupling.mu, coupling.nu)
    rows = coupling.row_sums()
    cols = coupling.col_sums()
    row_defect = max((abs(r - m) for r, m in zip(rows, coupling.mu)), default=0)
    col_defect = max((abs(c - n) for c, n in zip(cols, coupling.nu)), default=0)
    min_entry = min((x for row in coupling.matrix for x in row), default=0)
    total = sum(rows)
    ok = (
        ctx.is_zero(row_defect)
        and ctx.is_zero(col_defect)
        and ctx.nonneg(min_entry)
        and ctx.eq(total, 1)
        and len(rows) == len(coupling.mu)
        and len(cols) == len(coupling.nu)
    )
    return CouplingDefects(ok, row_defect, col_defect, min_entry, total)


def transport_value(coupling_or_matrix, values: Matrix) -> Number:
    matrix = (
        coupling_or_matrix.matrix
        if isinstance(coupling_or_matrix, Coupling)
        else coupling_or_matrix
    )
    if len(matrix) != len(values) or any(
        len(r) != len(v) for r, v in zip(matrix, values)
    ):
        raise DimensionMismatch("coupling and cost have different shapes")
    return sum(p * c for prow, crow in zip(matrix, values) for p, c in zip(prow, crow))


@dataclass(frozen=True)
class SolveReport:
    value: Number
    objective: str
    arithmetic_mode: str
    coupling: Coupling | None = None
    potentials: PotentialPair | None = None


@dataclass(frozen=True)
class ChainReport:
    beta: Number
    alpha: Number
    alpha_star: Number
    beta_star: Number
    ok: bool

    def as_tuple(self) -> tuple[Number, Number, Number, Number]:
        return (self.beta, self.alpha, self.alpha_star, self.beta_star)


# ---------------------------------------------------------------------------
# Network simplex
# ---------------------------------------------------------------------------

def _validated_inputs(c, mu, nu, ctx):
    cost = as_cost(c)
    ctx = resolve_context(ctx, cost.values, tuple(mu), tuple(nu))
    values = ctx.matrix(cost.values)
    mu = ctx.vector(mu)
    nu = ctx.vector(nu)
    m, n = len(mu), len(nu)
    if len(values) != m or any(len(row) != n for row in values):
        raise DimensionMismatch(
            f"cost is {len(values)}x{len(values[0]) if values else 0}, marginals are {m} and {n}"
        )
    for name, w in (("mu", mu), ("nu", nu)):
        for i, x in enumerate(w):
            if not ctx.nonneg(x):
                raise InfeasibleMarginals(f"{name}[{i}] = {x} is negative")
        if not ctx.eq(sum(w), 1):
            raise InfeasibleMarginals(f"{name} sums to {sum(w)}, not 1")
    return values, mu, nu, ctx


def _northwest_basis(mu, nu, ctx):
    """Northwest-corner start: m+n-1 basic cells forming a spanning tree."""
    m, n = len(mu), len(nu)
    s = list(mu)
    d = list(nu)
    if ctx.mode == "float":
        d[-1] += sum(s) - sum(d)  # absorb roundoff so the corner rule closes
    basis: list[tuple[int, int]] = []
    flow: dict[tuple[int, int], Number] = {}
    i = j = 0
    while True:
        q = s[i] if s[i] <= d[j] else d[j]
        if q < 0:
            q = ctx.number(0)
        basis.append((i, j))
        flow[(i, j)] = q
        s[i] -= q
        d[j] -= q
        if i == m - 1 and j == n - 1:
            break
        if s[i] == 0 and i < m - 1:
            i += 1
        elif j < n - 1:
            j += 1
        else:
            i += 1
    return basis, flow


def _potentials(basis, values, m, n, ctx):
    """Node potentials with u[0] = 0, solving u_i + v_j = c_ij on basic arcs."""
    adj: dict[int, list[tuple[int, int]]] = {k: [] for k in range(m + n)}
    for (i, j) in basis:
        adj[i].append((i, j))
        adj[m + j].append((i, j))
    u: list[Number | None] = [None] * m
    v: list[Number | None] = [None] * n
    u[0] = ctx.number(0)
    queue = deque([0])
    while queue:
        node = queue.popleft()
        for (i, j) in adj[node]:
            if node < m and v[j] is None:
                v[j] = values[i][j] - u[i]
                queue.append(m + j)
            elif node >= m and u[i] is None:
                u[i] = values[i][j] - v[j]
                queue.append(i)
    if any(x is None for x in u) or any(x is None for x in v):
        raise DualityError("basis does not span the bipartite node set")
    return u, v


def _tree_path(basis, m, start: int, goal: int):
    """Node path between two tree nodes; returns the list of arcs along it."""
    adj: dict[int, list[tuple[int, tuple[int, int]]]] = {}
    for (i, j) in basis:
        adj.setdefault(i, []).append((m + j, (i, j)))
        adj.setdefault(m + j, []).append((i, (i, j)))
    parent: dict[int, tuple[int, tuple[int, int]]] = {start: (start, (-1, -1))}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if node == goal:
            break
        for nxt, arc in adj.get(node, ()):
            if nxt not in parent:
                parent[nxt] = (node, arc)
                queue.append(nxt)
    arcs = []
    node = goal
    while node != start:
        prev, arc = parent[node]
        arcs.append(arc)
        node = prev
    arcs.reverse()
    return arcs


def _network_simplex(values, mu, nu, ctx):
    """Minimize sum P*c over the transportation polytope.

    Returns (value, coupling matrix, u, v) with u, v optimal dual potentials.
    """
    m, n = len(mu), len(nu)
    basis, flow = _northwest_basis(mu, nu, ctx)
    basis_set = set(basis)
    max_pivots = 1000 * (m + n) * max(m * n, 1)
    pivots = 0
    while True:
        u, v = _potentials(basis, values, m, n, ctx)
        entering = None
        for i in range(m):
            ui = u[i]
            row = values[i]
            for j in range(n):
                if (i, j) in basis_set:
                    continue
                if ctx.lt(row[j] - ui - v[j], 0):
                    entering = (i, j)
                    break
            if entering is not None:
                break
        if entering is None:
            break
        pivots += 1
        if pivots > max_pivots:
            raise DualityError("pivot limit exceeded; this should be unreachable")
        path = _tree_path(basis, m, entering[0], m + entering[1])
        minus_arcs = path[0::2]
        theta = None
        leaving = None
        for arc in minus_arcs:
            f = flow[arc]
            if theta is None or f < theta or (f == theta and arc < leaving):
                theta = f
                leaving = arc
        for arc in path[0::2]:
            flow[arc] -= theta
        for arc in path[1::2]:
            flow[arc] += theta
        flow[entering] = theta
        del flow[leaving]
        basis_set.remove(leaving)
        basis_set.add(entering)
        basis = [a for a in basis if a != leaving]
        basis.append(entering)
    zero = ctx.number(0)
    coupling = [[zero] * n for _ in range(m)]
    for (i, j), f in flow.items():
        coupling[i][j] = f if f > 0 else zero
    value = sum(values[i][j] * f for (i, j), f in flow.items())
    return value, tuple(tuple(r) for r in coupling), tuple(u), tuple(v)


# ---------------------------------------------------------------------------
# Public solvers
# ---------------------------------------------------------------------------

def solve_alpha(c, mu, nu, ctx: Context | None = None) -> SolveReport:
    """Exact minimum of sum P*c over couplings, with both optimality witnesses."""
    values, mu, nu, ctx = _validated_inputs(c, mu, nu, ctx)
    value, matrix, u, v = _network_simplex(values, mu, nu, ctx)
    return SolveReport(
        value=value,
        objective=ALPHA,
        arithmetic_mode=ctx.mode,
        coupling=Coupling(matrix=matrix, mu=mu, nu=nu),
        potentials=PotentialPair(f=u, g=v, side="lower"),
    )


def solve_alpha_star(c, mu, nu, ctx: Context | None = None) -> SolveReport:
    """Exact maximum of sum P*c, computed as -alpha(-c)."""
    values, mu, nu, ctx = _validated_inputs(c, mu, nu, ctx)
    value, matrix, u, v = _network_simplex(negate_matrix(values), mu, nu, ctx)
    return SolveReport(
        value=-value,
        objective=ALPHA_STAR,
        arithmetic_mode=ctx.mode,
        coupling=Coupling(matrix=matrix, mu=mu, nu=nu),
        potentials=PotentialPair(
            f=tuple(-x for x in u), g=tuple(-x for x in v), side="upper"
        ),
    )


def solve_beta(c, mu, nu, ctx: Context | None = None) -> SolveReport:
    """Best separable lower bound sup{mu(f)+nu(g) : f+g <= c}.

    Read off the LP dual of alpha; on finite spaces the value matches
    alpha(c) (exactly in rational mode).
    """
    values, mu, nu, ctx = _validated_inputs(c, mu, nu, ctx)
    _, matrix, u, v = _network_simplex(values, mu, nu, ctx)
    pair = PotentialPair(f=u, g=v, side="lower")
    return SolveReport(
        value=pair.dual_value(mu, nu),
        objective=BETA,
        arithmetic_mode=ctx.mode,
        coupling=Coupling(matrix=matrix, mu=mu, nu=nu),
        potentials=pair,
    )


def solve_beta_star(c, mu, nu, ctx: Context | None = None) -> SolveReport:
    """Best separable upper bound, computed as -beta(-c)."""
    values, mu, nu, ctx = _validated_inputs(c, mu, nu, ctx)
    _, matrix, u, v = _network_simplex(negate_matrix(values), mu, nu, ctx)
    pair = PotentialPair(f=tuple(-x for x in u), g=tuple(-x for x in v), side="upper")
    return SolveReport(
        value=pair.dual_value(mu, nu),
        objective=BETA_STAR,
        arithmetic_mode=ctx.mode,
        coupling=Coupling(matrix=matrix, mu=mu, nu=nu),
        potentials=pair,
    )


def check_chain(c, mu, nu, ctx: Context | None = None) -> ChainReport:
    """All four values in the order (beta, alpha, alpha*, beta*).

    ``ok`` states whether the chain beta <= alpha <= alpha* <= beta* holds
    within the mode tolerance; with exact arithmetic it cannot fail.
    """
    values, mu, nu, ctx = _validated_inputs(c, mu, nu, ctx)
    value, _, u, v = _network_simplex(values, mu, nu, ctx)
    beta = sum(w * x for w, x in zip(mu, u)) + sum(w * x for w, x in zip(nu, v))
    neg_value, _, nu_pot, nv_pot = _network_simplex(negate_matrix(values), mu, nu, ctx)
    alpha_star = -neg_value
    beta_star = -(
        sum(w * x for w, x in zip(mu, nu_pot)) + sum(w * x for w, x in zip(nu, nv_pot))
    )
    ok = (
        ctx.leq(beta, value)
        and ctx.leq(value, alpha_star)
        and ctx.leq(alpha_star, beta_star)
    )
    return ChainReport(
        beta=beta, alpha=value, alpha_star=alpha_star, beta_star=beta_star, ok=ok
    )
