"""Command-line batch surface: load an instance, run a scenario, emit JSON.

Exit codes: 0 on success, 1 when an invariant check fails (the interesting
outcome when hunting for counterexamples on random instances), 2 on input
errors.  Reports are deterministic for a fixed instance and seed except for
the ``elapsed_seconds`` field.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from .approx import (
    beta_star_limit_check,
    infconv_sequence,
    lipschitz_modulus,
    oscillation,
    oscillation_partition,
    partition_discretize,
)
from .costs import potential_defect
from .couplings import CoarseCoupling, extend_coupling
from .errors import DualityError, ParseError, ValidationError
from .instances import (
    Instance,
    generate_instance,
    instance_to_jsonable,
    load_instance,
)
from .numeric import Context, format_number
from .oracle import oracle_enumerate
from .rectangles import (
    Cover,
    arveson_witness,
    covers,
    indicator_cost,
    min_cover,
)
from .spaces import mask_indices, mask_mass
from .transport import (
    check_chain,
    coupling_defects,
    solve_alpha,
    solve_alpha_star,
    solve_beta,
    solve_beta_star,
    transport_value,
)
from .wasserstein import lipschitz_violations, wasserstein1

def _fmt(ctx: Context):
    return lambda x: format_number(x, ctx.mode)


def _fmt_vector(ctx, xs):
    f = _fmt(ctx)
    return [f(x) for x in xs]


def _fmt_matrix(ctx, rows):
    f = _fmt(ctx)
    return [[f(x) for x in row] for row in rows]


def _check(name, ok, **detail):
    entry = {"name": name, "ok": bool(ok)}
    if detail:
        entry["detail"] = detail
    return entry


def _need_cost(instance: Instance):
    if instance.cost is None:
        raise ValidationError("this scenario needs a 'cost' field in the instance")
    return instance.cost


def _coupling_checks(ctx, name, coupling):
    d = coupling_defects(coupling, ctx)
    f = _fmt(ctx)
    return _check(
        name,
        d.ok,
        max_row_defect=f(d.max_row_defect),
        max_col_defect=f(d.max_col_defect),
        min_entry=f(d.min_entry),
        total_mass=f(d.total_mass),
    )


def _scenario_solve(instance, ctx, options):
    cost = _need_cost(instance)
    mu, nu = instance.space_x.weights, instance.space_y.weights
    f = _fmt(ctx)
    low = solve_alpha(cost, mu, nu, ctx)
    high = solve_alpha_star(cost, mu, nu, ctx)
    beta = solve_beta(cost, mu, nu, ctx)
    beta_star = solve_beta_star(cost, mu, nu, ctx)
    chain = check_chain(cost, mu, nu, ctx)
    result = {
        "beta": f(beta.value),
        "alpha": f(low.value),
        "alpha_star": f(high.value),
        "beta_star": f(beta_star.value),
        "chain": [f(x) for x in chain.as_tuple()],
        "coupling_alpha": _fmt_matrix(ctx, low.coupling.matrix),
        "coupling_alpha_star": _fmt_matrix(ctx, high.coupling.matrix),
        "potentials_beta": {
            "f": _fmt_vector(ctx, beta.potentials.f),
            "g": _fmt_vector(ctx, beta.potentials.g),
        },
        "potentials_beta_star": {
            "f": _fmt_vector(ctx, beta_star.potentials.f),
            "g": _fmt_vector(ctx, beta_star.potentials.g),
        },
    }
    checks = [
        _check("chain_inequality", chain.ok, chain=[f(x) for x in chain.as_tuple()]),
        _coupling_checks(ctx, "alpha_coupling_marginals", low.coupling),
        _coupling_checks(ctx, "alpha_star_coupling_marginals", high.coupling),
        _check(
            "beta_potentials_feasible",
            ctx.leq(potential_defect(beta.potentials, cost.values, ctx), 0),
        ),
        _check(
            "beta_star_potentials_feasible",
            ctx.leq(potential_defect(beta_star.potentials, cost.values, ctx), 0),
        ),
        _check("lower_duality_gap_zero", ctx.eq(low.value, beta.value)),
        _check("upper_duality_gap_zero", ctx.eq(high.value, beta_star.value)),
    ]
    return result, checks


def _scenario_chain(instance, ctx, options):
    cost = _need_cost(instance)
    chain = check_chain(cost, instance.space_x.weights, instance.space_y.weights, ctx)
    f = _fmt(ctx)
    result = {
        "beta": f(chain.beta),
        "alpha": f(chain.alpha),
        "alpha_star": f(chain.alpha_star),
        "beta_star": f(chain.beta_star),
    }
    return result, [_check("chain_inequality", chain.ok)]


def _parse_n_list(text, ctx):
    out = []
    for part in text.split(","):
        part = part.strip()
        if part:
            out.append(ctx.number(part))
    if not out:
        raise ValidationError("--n produced an empty stage list")
    return out


def _scenario_approx(instance, ctx, options):
    cost = _need_cost(instance)
    if instance.space_x.metric is None:
        raise ValidationError("the approx scenario needs a metric on space_x")
    mu, nu = instance.space_x.weights, instance.space_y.weights
    modulus = lipschitz_modulus(cost, instance.space_x.metric, ctx)
    if options.get("n"):
        ns = _parse_n_list(options["n"], ctx)
    else:
        if modulus is None:
            raise ValidationError(
                "cost has no finite Lipschitz modulus; pass --n explicitly"
            )
        ns = [ctx.number(1)]
        while ns[-1] < max(modulus, 1):
            ns.append(ns[-1] * 2)
    sequence = infconv_sequence(cost, instance.space_x, ns, ctx=ctx)
    f = _fmt(ctx)
    try:
        report = beta_star_limit_check(sequence, mu, nu, ctx)
    except DualityError as exc:
        return {"stages": [f(n) for n in ns]}, [
            _check("stages_monotone", False, error=str(exc))
        ]
    reaches = modulus is not None and ns[-1] >= max(modulus, 0)
    result = {
        "stages": [f(n) for n in ns],
        "beta_star_stages": [f(v) for v in report.stage_values],
        "beta_star_base": f(report.base_value),
        "final_gap": f(report.final_gap),
        "lipschitz_modulus": None if modulus is None else f(modulus),
        "last_stage_reaches_modulus": reaches,
    }
    checks = [_check("stages_monotone", True)]
    if reaches:
        checks.append(_check("final_gap_zero", ctx.is_zero(report.final_gap)))
    return result, checks


def _scenario_partition(instance, ctx, options):
    cost = _need_cost(instance)
    if instance.space_x.metric is None:
        raise ValidationError("the partition scenario needs a metric on space_x")
    eps = ctx.number(options["eps"])
    bound = ctx.number(options["lipschitz"])
    mu, nu = instance.space_x.weights, instance.space_y.weights
    part = oscillation_partition(cost, eps, instance.space_x, bound, ctx)
    osc = oscillation(cost, part, ctx)
    actual = max((x for x in osc if x is not None), default=ctx.number(0))
    coarse_cost = partition_discretize(cost, part, ctx)
    alpha = solve_alpha(cost, mu, nu, ctx).value
    alpha0 = solve_alpha(coarse_cost, mu, nu, ctx).value
    beta = solve_beta(cost, mu, nu, ctx).value
    beta0 = solve_beta(coarse_cost, mu, nu, ctx).value
    f = _fmt(ctx)
    result = {
        "cells": [list(mask_indices(c)) for c in part.cells],
        "representatives": list(part.representatives),
        "oscillation_per_cell": [None if x is None else f(x) for x in osc],
        "oscillation_max": f(actual),
        "alpha": f(alpha),
        "alpha_discretized": f(alpha0),
        "beta": f(beta),
        "beta_discretized": f(beta0),
    }
    checks = [
        _check("oscillation_within_eps", ctx.leq(actual, eps)),
        _check("alpha_transfer_within_eps", ctx.leq(abs(alpha - alpha0), eps)),
        _check("beta_transfer_within_eps", ctx.leq(abs(beta - beta0), eps)),
        _check("alpha_below_beta_plus_3eps", ctx.leq(alpha, beta + 3 * actual)),
    ]
    return result, checks


def _scenario_extend(instance, ctx, options):
    cost = _need_cost(instance)
    if instance.partition is None:
        raise ValidationError("the extend scenario needs a 'partition' field")
    part = instance.partition
    mu, nu = instance.space_x.weights, instance.space_y.weights
    masses = part.cell_masses(mu)
    null = part.null_cell_index
    if null is not None and not ctx.is_zero(masses[null]):
        raise ValidationError(
            f"the null cell has mass {masses[null]}; coarse solving needs mass 0"
        )
    # Coarse cost: each non-null cell is collapsed onto its representative row.
    zero_row = tuple(ctx.number(0) for _ in range(instance.space_y.size))
    rows = []
    for k, cell in enumerate(part.cells):
        members = mask_indices(cell)
        if k == null or not members:
            rows.append(zero_row)
            continue
        rep = part.representatives[k]
        if rep is None:
            raise ValidationError(f"cell {k} has no representative")
        rows.append(tuple(ctx.number(x) for x in cost.values[rep]))
    coarse_report = solve_alpha(tuple(rows), masses, nu, ctx)
    coarse = CoarseCoupling(partition=part, matrix=coarse_report.coupling.matrix, nu=ctx.vector(nu))
    fine = extend_coupling(coarse, mu, ctx)
    alpha = solve_alpha(cost, mu, nu, ctx).value
    fine_value = transport_value(fine, ctx.matrix(cost.values))
    agreement_ok = True
    for k, cell in enumerate(part.cells):
        members = mask_indices(cell)
        for y in range(instance.space_y.size):
            lhs = sum(fine.matrix[x][y] for x in members)
            if not ctx.eq(lhs, coarse.matrix[k][y]):
                agreement_ok = False
    f = _fmt(ctx)
    result = {
        "cell_masses": _fmt_vector(ctx, masses),
        "coarse_value": f(coarse_report.value),
        "coarse_coupling": _fmt_matrix(ctx, coarse.matrix),
        "extended_coupling": _fmt_matrix(ctx, fine.matrix),
        "extended_cost": f(fine_value),
        "alpha": f(alpha),
    }
    checks = [
        _coupling_checks(ctx, "extended_marginals", fine),
        _check("coarse_agreement", agreement_ok),
        _check("extension_feasible_above_alpha", ctx.leq(alpha, fine_value)),
    ]
    return result, checks


def _need_rectangles(instance):
    if instance.rectangles is None:
        raise ValidationError("this scenario needs a 'rectangles' field")
    return instance.rectangles


def _scenario_cover(instance, ctx, options):
    family = _need_rectangles(instance)
    mu, nu = instance.space_x.weights, instance.space_y.weights
    cover = min_cover(family, mu, nu, ctx)
    best = solve_alpha_star(indicator_cost(family), mu, nu, ctx)
    f = _fmt(ctx)
    result = {
        "cover_a": list(mask_indices(cover.a)),
        "cover_b": list(mask_indices(cover.b)),
        "cover_value": f(cover.value),
        "alpha_star": f(best.value),
    }
    checks = [
        _check("cover_contains_union", covers(family, cover.a, cover.b)),
        _check("cover_matches_alpha_star", ctx.eq(cover.value, best.value)),
    ]
    return result, checks


def _scenario_arveson(instance, ctx, options):
    family = _need_rectangles(instance)
    mu, nu = instance.space_x.weights, instance.space_y.weights
    outcome = arveson_witness(family, mu, nu, ctx)
    f = _fmt(ctx)
    if isinstance(outcome, Cover):
        result = {
            "null_cover": {
                "a": list(mask_indices(outcome.a)),
                "b": list(mask_indices(outcome.b)),
                "value": f(outcome.value),
            }
        }
        checks = [
            _check(
                "cover_is_null",
                ctx.is_zero(mask_mass(instance.space_x.weights, outcome.a))
                and ctx.is_zero(mask_mass(instance.space_y.weights, outcome.b)),
            ),
            _check("cover_contains_union", covers(family, outcome.a, outcome.b)),
        ]
    else:
        result = {
            "alpha_star": f(outcome.alpha_star),
            "maximizing_coupling": _fmt_matrix(ctx, outcome.coupling.matrix),
        }
        checks = [
            _check("alpha_star_positive", not ctx.is_zero(outcome.alpha_star)),
            _coupling_checks(ctx, "maximizing_coupling_marginals", outcome.coupling),
        ]
    return result, checks


def _scenario_wasserstein(instance, ctx, options):
    if instance.space_x.metric is None:
        raise ValidationError("the wasserstein scenario needs a metric on space_x")
    if instance.space_x.size != instance.space_y.size:
        raise ValidationError(
            "wasserstein needs mu and nu on one point set; the spaces differ in size"
        )
    mu, nu = instance.space_x.weights, instance.space_y.weights
    report = wasserstein1(instance.space_x.metric, mu, nu, ctx)
    f = _fmt(ctx)
    violations = lipschitz_violations(instance.space_x.metric, report.lipschitz_witness, ctx)
    result = {
        "alpha": f(report.primal_value),
        "beta_lipschitz": f(report.dual_value),
        "witness_f": _fmt_vector(ctx, report.lipschitz_witness),
        "coupling": _fmt_matrix(ctx, report.coupling.matrix),
    }
    checks = [
        _check("duality_gap_zero", ctx.eq(report.primal_value, report.dual_value)),
        _check("witness_is_1_lipschitz", not violations, violations=list(violations)),
        _coupling_checks(ctx, "coupling_marginals", report.coupling),
    ]
    return result, checks


def _scenario_oracle_check(instance, ctx, options):
    cost = _need_cost(instance)
    mu, nu = instance.space_x.weights, instance.space_y.weights
    cap = options.get("cap", 16)
    low = solve_alpha(cost, mu, nu, ctx).value
    high = solve_alpha_star(cost, mu, nu, ctx).value
    oracle_low = oracle_enumerate(cost, mu, nu, "alpha", cap=cap, ctx=ctx)
    oracle_high = oracle_enumerate(cost, mu, nu, "alpha_star", cap=cap, ctx=ctx)
    exact = low == oracle_low and high == oracle_high
    ok = ctx.eq(low, oracle_low) and ctx.eq(high, oracle_high)
    f = _fmt(ctx)
    result = {
        "alpha": f(low),
        "alpha_oracle": f(oracle_low),
        "alpha_star": f(high),
        "alpha_star_oracle": f(oracle_high),
        "match": "exact" if exact else ("within-tolerance" if ok else "mismatch"),
    }
    return result, [_check("solver_matches_oracle", ok)]


_SCENARIOS = {
    "solve": _scenario_solve,
    "chain": _scenario_chain,
    "approx": _scenario_approx,
    "partition": _scenario_partition,
    "extend": _scenario_extend,
    "cover": _scenario_cover,
    "arveson": _scenario_arveson,
    "wasserstein": _scenario_wasserstein,
    "oracle-check": _scenario_oracle_check,
}


def run_scenario(instance: Instance, command: str, ctx: Context | None = None,
                 options: dict | None = None) -> dict:
    """Execute one scenario and return the full report document."""
    if command not in _SCENARIOS:
        raise ValidationError(f"unknown command {command!r}; known: {sorted(_SCENARIOS)}")
    if ctx is None:
        ctx = Context(instance.arithmetic)
    started = time.perf_counter()
    result, checks = _SCENARIOS[command](instance, ctx, options or {})
    elapsed = time.perf_counter() - started
    return {
        "command": command,
        "arithmetic": ctx.mode,
        "tolerance": None if ctx.mode == "rational" else ctx.tolerance,
        "sizes": {"x": instance.space_x.size, "y": instance.space_y.size},
        "result": result,
        "checks": checks,
        "ok": all(c["ok"] for c in checks),
        "elapsed_seconds": elapsed,
    }


def _emit(document, output):
    text = json.dumps(document, indent=2)
    if output:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=["rational", "float"], default=None,
                        help="override the instance's arithmetic mode")
    common.add_argument("--tolerance", type=float, default=None,
                        help="absolute tolerance for float mode (default 1e-9)")
    common.add_argument("--output", "-o", default=None, help="write the report here")

    parser = argparse.ArgumentParser(
        prog="otdual",
        description="Exact transport duality values and constructions on finite instances.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("solve", "all four values with optimality witnesses"),
        ("chain", "the ordered quadruple (beta, alpha, alpha*, beta*)"),
        ("extend", "solve the coarse problem and extend its plan to the full space"),
        ("cover", "minimal cover of the rectangle union"),
        ("arveson", "null cover or counter-evidence for the rectangle union"),
        ("wasserstein", "metric cost solved along both dual routes"),
    ):
        p = sub.add_parser(name, help=help_text, parents=[common])
        p.add_argument("instance", help="path to the instance JSON file")

    p = sub.add_parser("approx", help="infimal-convolution stages and beta* limits",
                       parents=[common])
    p.add_argument("instance")
    p.add_argument("--n", default=None, help="comma-separated stage parameters")

    p = sub.add_parser("partition", help="oscillation partition and value transfer",
                       parents=[common])
    p.add_argument("instance")
    p.add_argument("--eps", required=True, help="oscillation level")
    p.add_argument("--lipschitz", required=True, help="uniform Lipschitz bound")

    p = sub.add_parser("oracle-check", help="compare the solver with enumeration",
                       parents=[common])
    p.add_argument("instance")
    p.add_argument("--cap", type=int, default=16, help="max cell count to enumerate")

    p = sub.add_parser("gen", help="emit a random instance", parents=[common])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--size", required=True, help="RxC, e.g. 3x4")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            try:
                m_text, n_text = args.size.lower().split("x")
                m, n = int(m_text), int(n_text)
            except ValueError:
                raise ParseError(f"--size must look like 3x4, got {args.size!r}") from None
            instance = generate_instance(args.seed, m, n, mode=args.mode or "rational")
            _emit(instance_to_jsonable(instance), args.output)
            return 0
        instance = load_instance(
            args.instance, mode_override=args.mode, tolerance=args.tolerance
        )
        ctx = (
            Context(instance.arithmetic)
            if args.tolerance is None
            else Context(instance.arithmetic, args.tolerance)
        )
        options = {
            key: getattr(args, key.replace("-", "_"))
            for key in ("n", "eps", "lipschitz", "cap")
            if hasattr(args, key.replace("-", "_"))
        }
        report = run_scenario(instance, args.command, ctx, options)
        _emit(report, args.output)
        return 0 if report["ok"] else 1
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DualityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
