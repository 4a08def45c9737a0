"""Arithmetic modes shared by every solver.

Two modes exist: ``rational`` (exact ``fractions.Fraction`` arithmetic, all
comparisons exact) and ``float`` (IEEE doubles with a single global absolute
tolerance, default 1e-9).  Every operation in the package takes an optional
:class:`Context`; when omitted, the mode is inferred from the input data
(any float anywhere selects float mode).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Number = Union[int, Fraction, float]

RATIONAL_MODE = "rational"
FLOAT_MODE = "float"
DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Context:
    mode: str = RATIONAL_MODE
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self) -> None:
        if self.mode not in (RATIONAL_MODE, FLOAT_MODE):
            raise ValueError(f"unknown arithmetic mode: {self.mode!r}")
        if self.tolerance < 0:
            raise ValueError("tolerance must be nonnegative")

    @property
    def atol(self) -> Number:
        """Absolute comparison slack: exactly 0 in rational mode."""
        return 0 if self.mode == RATIONAL_MODE else self.tolerance

    def number(self, value) -> Number:
        """Coerce ``value`` into this mode's number type.

        Strings are read exactly ("3/4", "0.25", "2").  In rational mode a
        bare float is read through its shortest decimal representation, so
        0.1 becomes 1/10, matching the decimal literal in an instance file.
        """
        if self.mode == RATIONAL_MODE:
            if isinstance(value, bool):
                return Fraction(int(value))
            if isinstance(value, (int, Fraction)):
                return Fraction(value)
            if isinstance(value, str):
                return Fraction(value)
            if isinstance(value, float):
                if not math.isfinite(value):
                    raise ValueError(f"non-finite value {value!r} in rational mode")
                return Fraction(str(value))
            raise TypeError(f"cannot read {value!r} as a rational number")
        if isinstance(value, str):
            return float(Fraction(value))
        return float(value)

    def vector(self, values) -> tuple[Number, ...]:
        return tuple(self.number(v) for v in values)

    def matrix(self, rows) -> tuple[tuple[Number, ...], ...]:
        return tuple(tuple(self.number(v) for v in row) for row in rows)

    # Comparisons.  "lt" means strictly below beyond the tolerance.
    def eq(self, a, b) -> bool:
        return abs(a - b) <= self.atol

    def leq(self, a, b) -> bool:
        return a <= b + self.atol

    def geq(self, a, b) -> bool:
        return b <= a + self.atol

    def lt(self, a, b) -> bool:
        return a < b - self.atol

    def is_zero(self, a) -> bool:
        return abs(a) <= self.atol

    def nonneg(self, a) -> bool:
        return a >= -self.atol


RATIONAL = Context(RATIONAL_MODE)
FLOAT = Context(FLOAT_MODE)


def infer_context(*objects) -> Context:
    """RATIONAL unless a float is found anywhere in the (nested) inputs."""
    stack = list(objects)
    while stack:
        obj = stack.pop()
        if isinstance(obj, float):
            return FLOAT
        if isinstance(obj, (tuple, list)):
            stack.extend(obj)
    return RATIONAL


def resolve_context(ctx: Context | None, *objects) -> Context:
    return ctx if ctx is not None else infer_context(*objects)


def format_number(value: Number, mode: str):
    """Render a number for a report: exact "p/q" string in rational mode."""
    if mode == RATIONAL_MODE:
        return str(Fraction(value))
    return float(value)
