"""Finite probability spaces, subset masks, partitions, and measure primitives.

All types are immutable after construction; every operation is a pure
function, so values can be shared freely between concurrent workers.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import IndexOutOfRange, ValidationError, ZeroMassCell
from .numeric import Context, Number, resolve_context

Mask = tuple[bool, ...]
Vector = tuple[Number, ...]
Matrix = tuple[tuple[Number, ...], ...]


# ---------------------------------------------------------------------------
# Subset masks
# ---------------------------------------------------------------------------

def full_mask(n: int) -> Mask:
    return (True,) * n


def empty_mask(n: int) -> Mask:
    return (False,) * n


def mask_from_indices(n: int, indices) -> Mask:
    bits = [False] * n
    for i in indices:
        if not 0 <= i < n:
            raise IndexOutOfRange(f"point index {i} outside space of size {n}")
        bits[i] = True
    return tuple(bits)


def mask_indices(mask: Mask) -> tuple[int, ...]:
    return tuple(i for i, b in enumerate(mask) if b)


def mask_union(*masks: Mask) -> Mask:
    if not masks:
        raise ValidationError("union of zero masks has no length")
    return tuple(any(bits) for bits in zip(*masks))


def mask_intersection(*masks: Mask) -> Mask:
    if not masks:
        raise ValidationError("intersection of zero masks has no length")
    return tuple(all(bits) for bits in zip(*masks))


def mask_complement(mask: Mask) -> Mask:
    return tuple(not b for b in mask)


def mask_mass(weights: Sequence[Number], mask: Mask) -> Number:
    if len(weights) != len(mask):
        raise ValidationError("mask length differs from weight vector length")
    return sum(w for w, b in zip(weights, mask) if b)


# ---------------------------------------------------------------------------
# Probability spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProbabilitySpace:
    """A finite point set with a weight vector and an optional metric.

    Construction only checks shapes; numeric invariants (weights summing
    to 1, metric axioms) are reported by :func:`validate_space` so that
    deliberately broken spaces can be built and diagnosed.
    """

    points: tuple
    weights: Vector
    metric: Matrix | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "weights", tuple(self.weights))
        if self.metric is not None:
            object.__setattr__(
                self, "metric", tuple(tuple(row) for row in self.metric)
            )
        if len(self.weights) != len(self.points):
            raise ValidationError(
                f"{len(self.points)} points but {len(self.weights)} weights"
            )
        if self.metric is not None:
            n = len(self.points)
            if len(self.metric) != n or any(len(row) != n for row in self.metric):
                raise ValidationError("metric matrix is not square of the point count")

    @property
    def size(self) -> int:
        return len(self.points)

    def mass(self, mask: Mask) -> Number:
        return mask_mass(self.weights, mask)


def make_space(weights, metric=None, points=None, prefix: str = "x") -> ProbabilitySpace:
    weights = tuple(weights)
    if points is None:
        points = tuple(f"{prefix}{i}" for i in range(len(weights)))
    return ProbabilitySpace(points=tuple(points), weights=weights, metric=metric)


def uniform_space(n: int, metric=None, prefix: str = "x") -> ProbabilitySpace:
    return make_space([Fraction(1, n)] * n, metric=metric, prefix=prefix)


@dataclass(frozen=True)
class SpaceValidation:
    """Diagnostic report from :func:`validate_space`."""

    ok: bool
    normalization_defect: Number
    negative_weights: tuple[int, ...]
    symmetry_violations: tuple[tuple[int, int], ...]
    diagonal_violations: tuple[int, ...]
    negative_distances: tuple[tuple[int, int], ...]
    triangle_violations: tuple[tuple[int, int, int], ...]


def validate_space(space: ProbabilitySpace, ctx: Context | None = None) -> SpaceValidation:
    """Report the normalization defect and any metric axiom violation.

    A triangle violation is recorded as (i, k, j) meaning
    d(i, j) > d(i, k) + d(k, j).
    """
    ctx = resolve_context(ctx, space.weights, space.metric)
    w = ctx.vector(space.weights)
    defect = abs(sum(w) - 1)
    negative = tuple(i for i, x in enumerate(w) if not ctx.nonneg(x))

    sym: list[tuple[int, int]] = []
    diag: list[int] = []
    negd: list[tuple[int, int]] = []
    tri: list[tuple[int, int, int]] = []
    if space.metric is not None:
        d = ctx.matrix(space.metric)
        n = len(d)
        for i in range(n):
            if not ctx.is_zero(d[i][i]):
                diag.append(i)
            for j in range(n):
                if d[i][j] < -ctx.atol:
                    negd.append((i, j))
                if i < j and not ctx.eq(d[i][j], d[j][i]):
                    sym.append((i, j))
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if not ctx.leq(d[i][j], d[i][k] + d[k][j]):
                        tri.append((i, k, j))
    ok = (
        ctx.is_zero(defect)
        and not negative
        and not sym
        and not diag
        and not negd
        and not tri
    )
    return SpaceValidation(
        ok=ok,
        normalization_defect=defect,
        negative_weights=negative,
        symmetry_violations=tuple(sym),
        diagonal_violations=tuple(diag),
        negative_distances=tuple(negd),
        triangle_violations=tuple(tri),
    )


def conditional_measure(space: ProbabilitySpace, cell: Mask, ctx: Context | None = None) -> Vector:
    """Weights conditioned on ``cell``: restricted, renormalized, zero outside."""
    ctx = resolve_context(ctx, space.weights)
    w = ctx.vector(space.weights)
    if len(cell) != len(w):
        raise ValidationError("cell mask length differs from the space size")
    total = mask_mass(w, cell)
    if ctx.is_zero(total):
        raise ZeroMassCell("cannot condition on a cell of mass 0")
    zero = ctx.number(0)
    return tuple(x / total if b else zero for x, b in zip(w, cell))


def pushforward(
    space: ProbabilitySpace, mapping: Sequence[int], target_size: int, ctx: Context | None = None
) -> Vector:
    """Image weights under a total point map into a space of ``target_size``."""
    ctx = resolve_context(ctx, space.weights)
    w = ctx.vector(space.weights)
    if len(mapping) != len(w):
        raise ValidationError("map must be total: one target index per point")
    out = [ctx.number(0)] * target_size
    for i, t in enumerate(mapping):
        if not 0 <= t < target_size:
            raise IndexOutOfRange(f"map sends point {i} to {t}, outside the target space")
        out[t] += w[i]
    return tuple(out)


def limsup_mass(
    space: ProbabilitySpace, sets: Sequence[Mask], from_index: int, ctx: Context | None = None
) -> Number:
    """Mass of the tail union of a finite set sequence.

    With the sequence numbered A_1, A_2, ... this is mu(union of A_j for
    j > from_index), i.e. the union of ``sets[from_index:]``.  It is the
    finite-truncation surrogate of a tail union: the true limsup
    (intersection over n of the unions past n) needs the infinite sequence
    and cannot be represented here.
    """
    ctx = resolve_context(ctx, space.weights)
    if not 0 <= from_index < len(sets):
        raise IndexOutOfRange(f"from_index {from_index} outside 0..{len(sets) - 1}")
    for s in sets:
        if len(s) != space.size:
            raise ValidationError("set mask length differs from the space size")
    tail = sets[from_index:]
    union = mask_union(*tail) if tail else empty_mask(space.size)
    return mask_mass(ctx.vector(space.weights), union)


def metric_repair(matrix, ctx: Context | None = None) -> Matrix:
    """Shortest-path closure of a nonnegative symmetric generator matrix.

    Symmetrizes by the smaller of the two directions, zeroes the diagonal,
    then closes under the triangle inequality (Floyd-Warshall).  Never
    applied silently by any other operation.
    """
    rows = [list(r) for r in matrix]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValidationError("metric generator must be square")
    ctx = resolve_context(ctx, tuple(tuple(r) for r in rows))
    d = [[ctx.number(x) for x in r] for r in rows]
    for i in range(n):
        for j in range(n):
            if d[i][j] < 0:
                raise ValidationError(f"negative generator entry at ({i}, {j})")
    for i in range(n):
        d[i][i] = ctx.number(0)
        for j in range(i + 1, n):
            m = min(d[i][j], d[j][i])
            d[i][j] = m
            d[j][i] = m
    for k in range(n):
        dk = d[k]
        for i in range(n):
            dik = d[i][k]
            row = d[i]
            for j in range(n):
                alt = dik + dk[j]
                if alt < row[j]:
                    row[j] = alt
    return tuple(tuple(r) for r in d)


# ---------------------------------------------------------------------------
# Partitions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    """Disjoint cells covering a space, with an optional designated null cell.

    The null cell plays the role of the exceptional cell A_0 of a countable
    partition; a finite artifact models the mass-0 case by a cell whose mass
    is 0 (or exactly the leftover mass, which callers can report).
    ``representatives`` is aligned with ``cells``; entries may be None (in
    particular at the null cell).
    """

    cells: tuple[Mask, ...]
    null_cell_index: int | None = None
    representatives: tuple[int | None, ...] | None = None

    def __post_init__(self) -> None:
        cells = tuple(tuple(c) for c in self.cells)
        object.__setattr__(self, "cells", cells)
        if not cells:
            raise ValidationError("a partition needs at least one cell")
        n = len(cells[0])
        if any(len(c) != n for c in cells):
            raise ValidationError("all cells must have the same mask length")
        counts = [0] * n
        for c in cells:
            for i, b in enumerate(c):
                if b:
                    counts[i] += 1
        if any(k != 1 for k in counts):
            bad = [i for i, k in enumerate(counts) if k != 1]
            raise ValidationError(
                f"cells must partition the point set; points {bad} are not covered exactly once"
            )
        if self.null_cell_index is not None and not 0 <= self.null_cell_index < len(cells):
            raise ValidationError("null cell index outside the cell list")
        reps = self.representatives
        if reps is None:
            reps = (None,) * len(cells)
        reps = tuple(reps)
        if len(reps) != len(cells):
            raise ValidationError("representatives must align with cells")
        for k, r in enumerate(reps):
            if r is None:
                continue
            if not 0 <= r < n or not cells[k][r]:
                raise ValidationError(f"representative {r} does not belong to cell {k}")
        object.__setattr__(self, "representatives", reps)

    @property
    def size(self) -> int:
        return len(self.cells[0])

    def cell_masses(self, weights: Sequence[Number]) -> Vector:
        return tuple(mask_mass(weights, c) for c in self.cells)

    def non_null_cells(self) -> tuple[int, ...]:
        return tuple(k for k in range(len(self.cells)) if k != self.null_cell_index)

    def cell_of(self) -> tuple[int, ...]:
        owner = [0] * self.size
        for k, c in enumerate(self.cells):
            for i, b in enumerate(c):
                if b:
                    owner[i] = k
        return tuple(owner)


def singleton_partition(n: int) -> Partition:
    cells = tuple(mask_from_indices(n, [i]) for i in range(n))
    return Partition(cells=cells, representatives=tuple(range(n)))
