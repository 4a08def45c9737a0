"""Independent brute-force oracle for the transport solvers.

Enumerates every basic solution of the transportation polytope by walking
all spanning trees of the complete bipartite support (every subset of
m+n-1 cells that is acyclic), solving the unique tree flow by leaf
stripping, and keeping the nonnegative ones.  Degenerate bases are
included; distinct extreme couplings are deduplicated by matrix.

This code path shares nothing with the network simplex and exists to
check it.
"""
from __future__ import annotations

from collections import deque
from itertools import combinations

from .errors import InstanceTooLarge
from .numeric import Context, Number, resolve_context
from .spaces import Matrix
from .transport import ALPHA, ALPHA_STAR, _validated_inputs

DEFAULT_CELL_CAP = 16


def _tree_flow(cells, mu, nu, ctx):
    """Unique flow on a spanning tree, or None if some flow is negative."""
    m, n = len(mu), len(nu)
    degree = [0] * (m + n)
    incident: dict[int, list[tuple[int, int]]] = {k: [] for k in range(m + n)}
    for (i, j) in cells:
        degree[i] += 1
        degree[m + j] += 1
        incident[i].append((i, j))
        incident[m + j].append((i, j))
    s = list(mu)
    d = list(nu)
    used = set()
    flow = {}
    leaves = deque(k for k in range(m + n) if degree[k] == 1)
    while leaves:
        node = leaves.popleft()
        arc = next(((i, j) for (i, j) in incident[node] if (i, j) not in used), None)
        if arc is None:
            continue
        i, j = arc
        q = s[i] if node < m else d[j]
        if not ctx.nonneg(q):
            return None
        flow[arc] = q if q > 0 else ctx.number(0)
        s[i] -= q
        d[j] -= q
        used.add(arc)
        for end in (i, m + j):
            degree[end] -= 1
            if degree[end] == 1:
                leaves.append(end)
    if len(used) != len(cells):
        return None
    return flow


def transport_polytope_vertices(
    mu, nu, cap: int = DEFAULT_CELL_CAP, ctx: Context | None = None
) -> tuple[Matrix, ...]:
    """All distinct extreme couplings of the polytope with marginals mu, nu."""
    ctx = resolve_context(ctx, tuple(mu), tuple(nu))
    mu = ctx.vector(mu)
    nu = ctx.vector(nu)
    m, n = len(mu), len(nu)
    if m * n > cap:
        raise InstanceTooLarge(f"{m}x{n} = {m * n} cells exceeds the cap of {cap}")
    cells = [(i, j) for i in range(m) for j in range(n)]
    zero = ctx.number(0)
    seen = {}
    for subset in combinations(cells, m + n - 1):
        parent = list(range(m + n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        acyclic = True
        for (i, j) in subset:
            ri, rj = find(i), find(m + j)
            if ri == rj:
                acyclic = False
                break
            parent[ri] = rj
        if not acyclic:
            continue
        flow = _tree_flow(subset, mu, nu, ctx)
        if flow is None:
            continue
        matrix = [[zero] * n for _ in range(m)]
        for (i, j), f in flow.items():
            matrix[i][j] = f
        key = tuple(tuple(r) for r in matrix)
        seen.setdefault(key, key)
    return tuple(seen.values())


def oracle_enumerate(
    c, mu, nu, objective: str, cap: int = DEFAULT_CELL_CAP, ctx: Context | None = None
) -> Number:
    """Extreme of sum P*c over all enumerated basic feasible couplings."""
    if objective not in (ALPHA, ALPHA_STAR):
        raise ValueError(f"objective must be 'alpha' or 'alpha_star', got {objective!r}")
    values, mu, nu, ctx = _validated_inputs(c, mu, nu, ctx)
    vertices = transport_polytope_vertices(mu, nu, cap=cap, ctx=ctx)
    totals = [
        sum(p * x for prow, crow in zip(v, values) for p, x in zip(prow, crow))
        for v in vertices
    ]
    return min(totals) if objective == ALPHA else max(totals)
