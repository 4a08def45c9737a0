"""Instance files: the JSON schema shared by the CLI, plus seeded random
instance generators used by ``otdual gen`` and the test suite.

Numbers are encoded as exact "p/q" strings (or plain integers) in rational
mode and as decimal literals in float mode; see the README for the full
schema.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Sequence

from .costs import CostMatrix
from .errors import DualityError, ParseError, ValidationError
from .numeric import Context, Number, format_number
from .rectangles import RectangleFamily
from .spaces import (
    Matrix,
    Partition,
    ProbabilitySpace,
    Vector,
    mask_from_indices,
    mask_indices,
    metric_repair,
    validate_space,
)

FORMULAS = ("absolute-difference", "squared-difference", "equality-indicator")


@dataclass(frozen=True)
class Instance:
    arithmetic: str
    space_x: ProbabilitySpace
    space_y: ProbabilitySpace
    cost: CostMatrix | None = None
    cost_formula: str | None = None
    coords_x: Vector | None = None
    coords_y: Vector | None = None
    rectangles: RectangleFamily | None = None
    partition: Partition | None = None
    mapping: tuple[int, ...] | None = None


def _need(data, key, kind, where, optional=False):
    if key not in data or data[key] is None:
        if optional:
            return None
        raise ParseError(f"missing field {key!r} in {where}")
    value = data[key]
    if not isinstance(value, kind):
        raise ParseError(f"field {key!r} in {where} has the wrong type")
    return value


def _parse_number(value, ctx: Context, where: str) -> Number:
    if not isinstance(value, (int, float, str)) or isinstance(value, bool):
        raise ParseError(f"{where} is not a number or 'p/q' string")
    try:
        return ctx.number(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ParseError(f"cannot read number {value!r} in {where}: {exc}") from None


def _parse_vector(values, ctx, where) -> Vector:
    if not isinstance(values, list):
        raise ParseError(f"{where} must be a list")
    return tuple(_parse_number(v, ctx, f"{where}[{i}]") for i, v in enumerate(values))


def _parse_matrix(rows, ctx, where) -> Matrix:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ParseError(f"{where} must be a list of lists")
    return tuple(_parse_vector(r, ctx, f"{where}[{i}]") for i, r in enumerate(rows))


def _parse_space(data, ctx, where) -> tuple[ProbabilitySpace, Vector | None]:
    if not isinstance(data, dict):
        raise ParseError(f"{where} must be an object")
    weights = _parse_vector(_need(data, "weights", list, where), ctx, f"{where}.weights")
    points = data.get("points")
    if points is None:
        points = [f"{where[-1]}{i}" for i in range(len(weights))]
    elif not isinstance(points, list):
        raise ParseError(f"{where}.points must be a list")
    metric = data.get("metric")
    if metric is not None:
        metric = _parse_matrix(metric, ctx, f"{where}.metric")
    coords = data.get("coords")
    if coords is not None:
        coords = _parse_vector(coords, ctx, f"{where}.coords")
        if len(coords) != len(weights):
            raise ValidationError(f"{where}.coords length differs from weights")
    try:
        space = ProbabilitySpace(points=tuple(points), weights=weights, metric=metric)
    except DualityError as exc:
        raise ValidationError(f"{where}: {exc}") from None
    return space, coords


def _formula_cost(formula, coords_x, coords_y, m, n, ctx) -> CostMatrix:
    cx = coords_x if coords_x is not None else tuple(ctx.number(i) for i in range(m))
    cy = coords_y if coords_y is not None else tuple(ctx.number(j) for j in range(n))
    one, zero = ctx.number(1), ctx.number(0)
    if formula == "absolute-difference":
        rows = [[abs(a - b) for b in cy] for a in cx]
    elif formula == "squared-difference":
        rows = [[(a - b) * (a - b) for b in cy] for a in cx]
    elif formula == "equality-indicator":
        rows = [[one if a == b else zero for b in cy] for a in cx]
    else:
        raise ParseError(f"unknown cost formula {formula!r}; known: {FORMULAS}")
    return CostMatrix(values=tuple(tuple(r) for r in rows))


def parse_instance(data: dict, mode_override: str | None = None, tolerance: float | None = None) -> Instance:
    if not isinstance(data, dict):
        raise ParseError("instance document must be a JSON object")
    arithmetic = data.get("arithmetic", "rational")
    if arithmetic not in ("rational", "float"):
        raise ParseError(f"arithmetic must be 'rational' or 'float', got {arithmetic!r}")
    if mode_override is not None:
        arithmetic = mode_override
    ctx = Context(arithmetic) if tolerance is None else Context(arithmetic, tolerance)

    space_x, coords_x = _parse_space(_need(data, "space_x", dict, "instance"), ctx, "space_x")
    space_y, coords_y = _parse_space(_need(data, "space_y", dict, "instance"), ctx, "space_y")
    m, n = space_x.size, space_y.size

    for name, space in (("space_x", space_x), ("space_y", space_y)):
        report = validate_space(space, ctx)
        if not report.ok:
            raise ValidationError(
                f"{name} is invalid: normalization defect {report.normalization_defect}, "
                f"negative weights {report.negative_weights}, "
                f"metric violations (symmetry {report.symmetry_violations}, "
                f"diagonal {report.diagonal_violations}, "
                f"negative {report.negative_distances}, "
                f"triangle {report.triangle_violations})"
            )

    cost = None
    cost_formula = None
    raw_cost = data.get("cost")
    if raw_cost is not None:
        if not isinstance(raw_cost, dict):
            raise ParseError("cost must be an object with 'matrix' or 'formula'")
        if "matrix" in raw_cost:
            values = _parse_matrix(raw_cost["matrix"], ctx, "cost.matrix")
            if len(values) != m or any(len(r) != n for r in values):
                raise ValidationError(
                    f"cost.matrix is {len(values)}x{len(values[0]) if values else 0}, "
                    f"spaces are {m} and {n}"
                )
            cost = CostMatrix(values=values)
        elif "formula" in raw_cost:
            cost_formula = raw_cost["formula"]
            cost = _formula_cost(cost_formula, coords_x, coords_y, m, n, ctx)
        else:
            raise ParseError("cost needs either 'matrix' or 'formula'")

    rectangles = None
    raw_rects = data.get("rectangles")
    if raw_rects is not None:
        if not isinstance(raw_rects, list):
            raise ParseError("rectangles must be a list")
        rects = []
        for k, r in enumerate(raw_rects):
            if not isinstance(r, dict):
                raise ParseError(f"rectangles[{k}] must be an object")
            xs = _need(r, "x", list, f"rectangles[{k}]")
            ys = _need(r, "y", list, f"rectangles[{k}]")
            try:
                rects.append((mask_from_indices(m, xs), mask_from_indices(n, ys)))
            except DualityError as exc:
                raise ValidationError(f"rectangles[{k}]: {exc}") from None
        rectangles = RectangleFamily(nx=m, ny=n, rects=tuple(rects))

    partition = None
    raw_partition = data.get("partition")
    if raw_partition is not None:
        if not isinstance(raw_partition, dict):
            raise ParseError("partition must be an object")
        raw_cells = _need(raw_partition, "cells", list, "partition")
        try:
            cells = tuple(mask_from_indices(m, cell) for cell in raw_cells)
            partition = Partition(
                cells=cells,
                null_cell_index=raw_partition.get("null_cell_index"),
                representatives=(
                    tuple(raw_partition["representatives"])
                    if raw_partition.get("representatives") is not None
                    else None
                ),
            )
        except DualityError as exc:
            raise ValidationError(f"partition: {exc}") from None

    mapping = None
    raw_map = data.get("map")
    if raw_map is not None:
        if not isinstance(raw_map, list) or not all(isinstance(t, int) for t in raw_map):
            raise ParseError("map must be a list of target point indices")
        if len(raw_map) != m:
            raise ValidationError(f"map has {len(raw_map)} entries for {m} points")
        if any(not 0 <= t < n for t in raw_map):
            raise ValidationError("map sends a point outside space_y")
        mapping = tuple(raw_map)

    return Instance(
        arithmetic=arithmetic,
        space_x=space_x,
        space_y=space_y,
        cost=cost,
        cost_formula=cost_formula,
        coords_x=coords_x,
        coords_y=coords_y,
        rectangles=rectangles,
        partition=partition,
        mapping=mapping,
    )


def load_instance(path, mode_override: str | None = None, tolerance: float | None = None) -> Instance:
    """Parse and fully validate an instance file."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from None
    return parse_instance(data, mode_override=mode_override, tolerance=tolerance)


def instance_to_jsonable(instance: Instance) -> dict:
    mode = instance.arithmetic
    fmt = lambda x: format_number(x, mode)  # noqa: E731

    def space_doc(space: ProbabilitySpace, coords):
        doc = {"points": list(space.points), "weights": [fmt(w) for w in space.weights]}
        if space.metric is not None:
            doc["metric"] = [[fmt(x) for x in row] for row in space.metric]
        if coords is not None:
            doc["coords"] = [fmt(x) for x in coords]
        return doc

    doc = {
        "arithmetic": mode,
        "space_x": space_doc(instance.space_x, instance.coords_x),
        "space_y": space_doc(instance.space_y, instance.coords_y),
    }
    if instance.cost_formula is not None:
        doc["cost"] = {"formula": instance.cost_formula}
    elif instance.cost is not None:
        doc["cost"] = {"matrix": [[fmt(x) for x in row] for row in instance.cost.values]}
    if instance.rectangles is not None:
        doc["rectangles"] = [
            {"x": list(mask_indices(a)), "y": list(mask_indices(b))}
            for a, b in instance.rectangles.rects
        ]
    if instance.partition is not None:
        doc["partition"] = {
            "cells": [list(mask_indices(c)) for c in instance.partition.cells],
            "null_cell_index": instance.partition.null_cell_index,
            "representatives": list(instance.partition.representatives),
        }
    if instance.mapping is not None:
        doc["map"] = list(instance.mapping)
    return doc


def save_instance(instance: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(instance_to_jsonable(instance), handle, indent=2)
        handle.write("\n")


# ---------------------------------------------------------------------------
# Seeded random generation (exact rationals; float instances are converted)
# ---------------------------------------------------------------------------

def random_weights(rng: Random, n: int, denominator: int = 24, zeros: bool = False) -> Vector:
    """A random rational weight vector summing exactly to 1."""
    if n == 1:
        return (Fraction(1),)
    d = max(denominator, n)
    if zeros:
        cuts = sorted(rng.randrange(0, d + 1) for _ in range(n - 1))
        parts = []
        prev = 0
        for c in cuts:
            parts.append(c - prev)
            prev = c
        parts.append(d - prev)
    else:
        cuts = sorted(rng.sample(range(1, d), n - 1))
        parts = []
        prev = 0
        for c in cuts:
            parts.append(c - prev)
            prev = c
        parts.append(d - prev)
    return tuple(Fraction(p, d) for p in parts)


def random_cost_matrix(rng: Random, m: int, n: int, low: int = -12, high: int = 12,
                       denominator: int = 4) -> Matrix:
    return tuple(
        tuple(Fraction(rng.randint(low, high), denominator) for _ in range(n))
        for _ in range(m)
    )


def random_metric(rng: Random, n: int, denominator: int = 4) -> Matrix:
    """A valid rational metric: random positive generator, then repaired."""
    gen = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            gen[i][j] = gen[j][i] = Fraction(rng.randint(1, 2 * denominator), denominator)
    return metric_repair(gen)


def random_rectangles(rng: Random, nx: int, ny: int, count: int = 3) -> RectangleFamily:
    rects = []
    for _ in range(count):
        xs = [i for i in range(nx) if rng.random() < 0.5]
        ys = [j for j in range(ny) if rng.random() < 0.5]
        rects.append((mask_from_indices(nx, xs), mask_from_indices(ny, ys)))
    return RectangleFamily(nx=nx, ny=ny, rects=tuple(rects))


def random_partition(rng: Random, n: int, cells: int | None = None) -> Partition:
    k = cells if cells is not None else max(1, (n + 1) // 2)
    k = min(k, n)
    owner = list(range(k)) + [rng.randrange(k) for _ in range(n - k)]
    rng.shuffle(owner)
    members: dict[int, list[int]] = {c: [] for c in range(k)}
    for i, c in enumerate(owner):
        members[c].append(i)
    masks = tuple(mask_from_indices(n, members[c]) for c in range(k))
    reps = tuple(rng.choice(members[c]) for c in range(k))
    return Partition(cells=masks, representatives=reps)


def _northwest_matrix(mu: Sequence[Fraction], nu: Sequence[Fraction]) -> list[list[Fraction]]:
    m, n = len(mu), len(nu)
    s = list(mu)
    d = list(nu)
    rows = [[Fraction(0)] * n for _ in range(m)]
    i = j = 0
    while True:
        q = min(s[i], d[j])
        rows[i][j] += q
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
    return rows


def random_coupling(rng: Random, mu, nu, mixes: int = 3) -> Matrix:
    """A random exact coupling: a convex mix of permuted corner solutions."""
    mu = tuple(Fraction(x) for x in mu)
    nu = tuple(Fraction(x) for x in nu)
    m, n = len(mu), len(nu)
    lam_raw = [rng.randint(1, 6) for _ in range(mixes)]
    total = sum(lam_raw)
    out = [[Fraction(0)] * n for _ in range(m)]
    for weight in lam_raw:
        sigma = list(range(m))
        tau = list(range(n))
        rng.shuffle(sigma)
        rng.shuffle(tau)
        base = _northwest_matrix([mu[i] for i in sigma], [nu[j] for j in tau])
        lam = Fraction(weight, total)
        for a in range(m):
            for b in range(n):
                out[sigma[a]][tau[b]] += lam * base[a][b]
    return tuple(tuple(r) for r in out)


def random_coarse_matrix(rng: Random, masses, nu) -> Matrix:
    """A random coarse plan with row sums ``masses`` and column sums ``nu``."""
    return random_coupling(rng, masses, nu)


def generate_instance(seed: int, m: int, n: int, mode: str = "rational") -> Instance:
    """A deterministic random instance exercising every CLI verb.

    nu is the pushforward of mu under the generated map, so Monge and
    extension scenarios are runnable; this can make some nu entries zero,
    which the solvers support.
    """
    if m < 1 or n < 1:
        raise ValidationError("instance sizes must be at least 1x1")
    rng = Random(seed)
    mu = random_weights(rng, m)
    mapping = tuple(rng.randrange(n) for _ in range(m))
    nu_map: list[Fraction] = [Fraction(0)] * n
    for i, t in enumerate(mapping):
        nu_map[t] += mu[i]
    metric = random_metric(rng, m)
    cost = random_cost_matrix(rng, m, n)
    rectangles = random_rectangles(rng, m, n)
    partition = random_partition(rng, m)
    ctx = Context(mode)
    space_x = ProbabilitySpace(
        points=tuple(f"x{i}" for i in range(m)),
        weights=ctx.vector(mu),
        metric=ctx.matrix(metric),
    )
    space_y = ProbabilitySpace(
        points=tuple(f"y{j}" for j in range(n)),
        weights=ctx.vector(nu_map),
    )
    return Instance(
        arithmetic=mode,
        space_x=space_x,
        space_y=space_y,
        cost=CostMatrix(values=ctx.matrix(cost)),
        cost_formula=None,
        coords_x=None,
        coords_y=None,
        rectangles=rectangles,
        partition=partition,
        mapping=mapping,
    )
