"""Wasserstein-1 on a finite metric space, computed along both dual routes.

The primal route treats the metric as a transport cost and minimizes over
couplings (network simplex).  The dual route maximizes mu(f) - nu(f) over
1-Lipschitz vectors f, i.e. the LP with constraints f(x) - f(z) <= d(x, z)
on every ordered pair, solved by the dense simplex after pinning f at the
first point.  On finite spaces the two values agree (exactly in rational
mode); both are reported so the agreement stays checkable.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError
from .lp import simplex_maximize
from .numeric import Context, Number, resolve_context
from .spaces import Matrix, Vector
from .transport import Coupling, solve_alpha


@dataclass(frozen=True)
class WassersteinReport:
    primal_value: Number
    dual_value: Number
    lipschitz_witness: Vector
    coupling: Coupling
    arithmetic_mode: str

    @property
    def gap(self) -> Number:
        return self.primal_value - self.dual_value


def lipschitz_dual(metric: Matrix, mu, nu, ctx: Context | None = None) -> tuple[Number, Vector]:
    """sup of |mu(f) - nu(f)| over 1-Lipschitz f, with a maximizing f.

    The feasible set is symmetric under f -> -f, so the absolute value is
    the plain maximum of (mu - nu)(f).  Adding constants changes nothing,
    so f is pinned to 0 at point 0 and shifted into the box
    0 <= f_i + d(i,0) <= 2 d(i,0), which makes the origin feasible for the
    slack-basis simplex (the right-hand sides are nonnegative exactly by
    the triangle inequality).
    """
    ctx = resolve_context(ctx, tuple(tuple(r) for r in metric), tuple(mu), tuple(nu))
    d = ctx.matrix(metric)
    mu = ctx.vector(mu)
    nu = ctx.vector(nu)
    n = len(mu)
    if len(nu) != n or len(d) != n or any(len(row) != n for row in d):
        raise ValidationError("metric and marginals must share one point set")
    p = [a - b for a, b in zip(mu, nu)]
    zero = ctx.number(0)
    if n == 1:
        return zero, (zero,)

    objective = [p[i] for i in range(1, n)]
    lhs = []
    rhs = []
    for i in range(1, n):
        for j in range(1, n):
            if i == j:
                continue
            row = [zero] * (n - 1)
            row[i - 1] = ctx.number(1)
            row[j - 1] = ctx.number(-1)
            lhs.append(row)
            bound = d[i][j] + d[i][0] - d[j][0]
            rhs.append(bound if bound > 0 else zero)
    for i in range(1, n):
        row = [zero] * (n - 1)
        row[i - 1] = ctx.number(1)
        lhs.append(row)
        rhs.append(2 * d[i][0])
    _, g = simplex_maximize(objective, lhs, rhs, ctx)
    f = (zero,) + tuple(g[i - 1] - d[i][0] for i in range(1, n))
    value = sum(pi * fi for pi, fi in zip(p, f))
    return value, f


def wasserstein1(metric: Matrix, mu, nu, ctx: Context | None = None) -> WassersteinReport:
    ctx = resolve_context(ctx, tuple(tuple(r) for r in metric), tuple(mu), tuple(nu))
    primal = solve_alpha(metric, mu, nu, ctx)
    dual_value, witness = lipschitz_dual(metric, mu, nu, ctx)
    return WassersteinReport(
        primal_value=primal.value,
        dual_value=dual_value,
        lipschitz_witness=witness,
        coupling=primal.coupling,
        arithmetic_mode=ctx.mode,
    )


def lipschitz_violations(metric: Matrix, f, ctx: Context | None = None) -> tuple[tuple[int, int], ...]:
    """Pairs (i, j) where |f_i - f_j| exceeds d(i, j)."""
    ctx = resolve_context(ctx, tuple(tuple(r) for r in metric), tuple(f))
    bad = []
    for i in range(len(f)):
        for j in range(len(f)):
            if i != j and not ctx.leq(abs(f[i] - f[j]), metric[i][j]):
                bad.append((i, j))
    return tuple(bad)
