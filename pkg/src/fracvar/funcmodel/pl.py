"""Piecewise-linear functions and sequence-defined (accumulating) functions."""

from __future__ import annotations

import bisect
from functools import cached_property
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .sets import Interval


@dataclass(frozen=True)
class PLFunction:
    """Affine interpolant through ``(breakpoints[i], values[i])``.

    Breakpoints and values may be ``fractions.Fraction``; evaluation then
    stays exact.
    """

    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        bp, vals = tuple(self.breakpoints), tuple(self.values)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        if len(bp) != len(vals):
            raise ValueError("breakpoints and values differ in length")
        if len(bp) < 2:
            raise ValueError("need at least two breakpoints")
        if any(x0 >= x1 for x0, x1 in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")

    @property
    def domain(self) -> Interval:
        return Interval(self.breakpoints[0], self.breakpoints[-1])

    def __call__(self, x):
        bp, vals = self.breakpoints, self.values
        if not bp[0] <= x <= bp[-1]:
            raise ValueError(f"{x} outside domain [{bp[0]}, {bp[-1]}]")
        i = bisect.bisect_right(bp, x) - 1
        if i >= len(bp) - 1:
            return vals[-1]
        x0, x1 = bp[i], bp[i + 1]
        if x == x0:
            return vals[i]
        return vals[i] + (vals[i + 1] - vals[i]) * (x - x0) / (x1 - x0)

    def eval_many(self, xs) -> np.ndarray:
        return np.interp(np.asarray(xs, float), np.asarray(self.breakpoints, float),
                         np.asarray(self.values, float))

    def slopes(self) -> list:
        bp, vals = self.breakpoints, self.values
        return [(vals[i + 1] - vals[i]) / (bp[i + 1] - bp[i]) for i in range(len(bp) - 1)]

    def breakpoints_in(self, lo, hi) -> list:
        return [x for x in self.breakpoints if lo <= x <= hi]

    def is_constant_on(self, lo, hi) -> bool:
        return self(lo) == self(hi) and all(self(x) == self(lo) for x in self.breakpoints_in(lo, hi))

    def inverse_on(self, lo, hi, y):
        """Inverse of ``f`` restricted to [lo, hi], where ``f`` is strictly monotone."""
        xs = [lo] + [x for x in self.breakpoints if lo < x < hi] + [hi]
        ys = [self(x) for x in xs]
        inc = ys[-1] > ys[0]
        for i in range(len(xs) - 1):
            y0, y1 = ys[i], ys[i + 1]
            if (y0 <= y <= y1) if inc else (y1 <= y <= y0):
                if y1 == y0:
                    return xs[i]
                return xs[i] + (xs[i + 1] - xs[i]) * (y - y0) / (y1 - y0)
        return xs[-1] if (y > ys[-1]) == inc else xs[0]

    def compose_affine(self, scale, shift) -> "PLFunction":
        """``f(scale * t + shift)`` for ``scale > 0``."""
        if scale <= 0:
            raise ValueError("only increasing affine maps are supported")
        return PLFunction(tuple((x - shift) / scale for x in self.breakpoints), self.values)

    def to_pl(self) -> "PLFunction":
        return self

    def to_json(self) -> dict:
        return {"kind": "pl", "breakpoints": [float(x) for x in self.breakpoints],
                "values": [float(v) for v in self.values]}


def identity(a=0.0, b=1.0) -> PLFunction:
    return PLFunction((a, b), (a, b))


def hat(a=0.0, b=1.0, height=1.0) -> PLFunction:
    return PLFunction((a, (a + b) / 2, b), (0.0, height, 0.0))


@dataclass(frozen=True, eq=False)
class SeqPLFunction:
    """Function affine between the points of a sequence ``a_m`` decreasing to ``anchor``.

    Only the truncation at index ``M`` is ever evaluated.  ``family`` and
    ``params`` are carried for serialization of built-in families.
    """

    anchor: float
    seq: Callable[[int], float]
    vals: Callable[[int], float]
    M: int
    closure_value: float
    upper: float = 1.0
    upper_value: Optional[float] = None
    family: Optional[str] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("truncation M must be positive")
        pts = [self.seq(m) for m in range(1, self.M + 1)]
        if any(p0 <= p1 for p0, p1 in zip(pts, pts[1:])):
            raise ValueError("sequence must be strictly decreasing")
        if not (self.anchor < pts[-1] and pts[0] <= self.upper):
            raise ValueError("sequence must lie in (anchor, upper]")
        if pts[0] < self.upper and self.upper_value is None:
            raise ValueError("upper_value required when a_1 < upper")

    @property
    def domain(self) -> Interval:
        return Interval(self.anchor, self.upper)

    def sequence_points(self) -> list:
        return [self.seq(m) for m in range(1, self.M + 1)]

    def truncate(self, M: int) -> "SeqPLFunction":
        return SeqPLFunction(self.anchor, self.seq, self.vals, M, self.closure_value,
                             self.upper, self.upper_value, self.family, dict(self.params))

    def to_pl(self) -> PLFunction:
        return self._pl

    @cached_property
    def _pl(self) -> PLFunction:
        xs = [self.anchor] + [self.seq(m) for m in range(self.M, 0, -1)]
        ys = [self.closure_value] + [self.vals(m) for m in range(self.M, 0, -1)]
        if xs[-1] < self.upper:
            xs.append(self.upper)
            ys.append(self.upper_value)
        return PLFunction(tuple(xs), tuple(ys))

    def __call__(self, x):
        return self.to_pl()(x)

    def eval_many(self, xs):
        return self.to_pl().eval_many(xs)

    def to_json(self) -> dict:
        if self.family is None:
            return self.to_pl().to_json()
        return {"kind": "seq", "anchor": self.anchor, "family": self.family, "M": self.M, **self.params}
