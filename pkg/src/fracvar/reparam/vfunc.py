"""Monotone variation functions ``v`` (right) and ``v~`` (left) on a finite set ``K``."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from ..funcmodel.sets import ClosedSetDesc, contiguous_intervals
from ..variation import GVContext, as_pl, total_variation


class ReparamInputError(ValueError):
    pass


@dataclass(frozen=True)
class VariationFunction:
    """Table of values on the points of ``K``, affine in between.

    ``direction='right'``: ``v(x) = rGV^delta(f, A cap [a,x], K cap [a,x])``.
    ``direction='left'``:  ``v(x) = lGV^delta(f, A cap [x,b], K cap [x,b])``.
    """

    direction: str
    xs: tuple
    values: tuple
    A: ClosedSetDesc
    K: ClosedSetDesc
    delta: float
    n: int

    def __call__(self, x) -> float:
        xs, vs = self.xs, self.values
        if not xs[0] <= x <= xs[-1]:
            raise ValueError(f"{x} outside [{xs[0]}, {xs[-1]}]")
        i = bisect.bisect_right(xs, x) - 1
        if i >= len(xs) - 1:
            return vs[-1]
        x0, x1 = xs[i], xs[i + 1]
        return vs[i] + (vs[i + 1] - vs[i]) * (x - x0) / (x1 - x0)

    @property
    def total(self) -> float:
        return abs(self.values[-1] - self.values[0])

    def to_json(self) -> dict:
        return {"direction": self.direction, "delta": self.delta, "n": self.n,
                "table": [[float(x), float(v)] for x, v in zip(self.xs, self.values)]}


def _finite_K(K: ClosedSetDesc):
    if not K.is_finite:
        raise ReparamInputError("K must be a finite point set; pass component endpoints instead")


def build_v(f, A: ClosedSetDesc, K: ClosedSetDesc, delta: float, n: int, direction: str = "right",
            ctx: Optional[GVContext] = None) -> VariationFunction:
    if direction not in ("right", "left"):
        raise ValueError("direction must be 'right' or 'left'")
    if not A.issubset(K):
        raise ReparamInputError("A must be a subset of K")
    K2, _ = K.with_endpoints()
    _finite_K(K2)
    ctx = ctx or GVContext(f, K2, n)
    xs = ctx.cand.x
    if A.is_empty:
        vals = [0.0] * len(xs)
    elif direction == "right":
        vals = [float(v) for v in ctx.solve(A, "right", delta)[0]]
    else:
        vals = [float(v) for v in ctx.suffix_values(A, delta)]
    if any(math.isinf(v) for v in vals):
        raise ReparamInputError("windowed generalized variation is infinite")
    return VariationFunction(direction, tuple(xs), tuple(vals), A, K2, delta, n)


@dataclass
class GrowthReport:
    max_ratio: float
    count: int
    holds: bool


def check_growth_bound(v: VariationFunction, f, triples: Sequence, slack: float = 1e-10) -> GrowthReport:
    """Ratios ``|f(y)-f(z)| / (n^(n-1) |v(z)-v(y)|^(n-1) |v(z)-v(x)|)`` over admissible triples.

    Right: ``x in A``, ``y, z in K``, ``x <= y <= z < x + delta``.
    Left: ``x in A``, ``y, z in K``, ``x - delta < z <= y <= x``.
    """
    n = v.n
    worst = 0.0
    for x, y, z in triples:
        if not v.A.contains(x) or not (v.K.contains(y) and v.K.contains(z)):
            raise ReparamInputError(f"triple ({x}, {y}, {z}): x must lie in A and y, z in K")
        if v.direction == "right":
            ok = x <= y <= z and z - x < v.delta
        else:
            ok = z <= y <= x and x - z < v.delta
        if not ok:
            raise ReparamInputError(f"triple ({x}, {y}, {z}) violates the ordering constraint")
        lhs = abs(f(y) - f(z))
        if lhs == 0:
            continue
        rhs = n ** (n - 1) * abs(v(z) - v(y)) ** (n - 1) * abs(v(z) - v(x))
        worst = max(worst, lhs / rhs if rhs > 0 else math.inf)
    return GrowthReport(worst, len(triples), worst <= 1 + slack)


def admissible_triples(v: VariationFunction, limit: Optional[int] = None, rng=None) -> list:
    """All (or ``limit`` random) admissible triples over the points of ``A`` and ``K``."""
    ks = v.K.points()
    out = []
    for x in v.A.points():
        if v.direction == "right":
            zs = [k for k in ks if x <= k and k - x < v.delta]
            out.extend((x, y, z) for i, z in enumerate(zs) for y in zs[: i + 1])
        else:
            zs = [k for k in ks if k <= x and x - k < v.delta]
            out.extend((x, y, z) for i, z in enumerate(zs) for y in zs[i:])
    if limit is not None and len(out) > limit:
        idx = rng.choice(len(out), size=limit, replace=False)
        out = [out[i] for i in sorted(idx)]
    return out


def monotone_on_gaps(f, K: ClosedSetDesc, tol: float = 1e-12) -> Optional[tuple]:
    """First contiguous interval on which ``f`` is not monotone, or ``None``."""
    for g in contiguous_intervals(K):
        if as_pl(f) is None:
            continue
        if abs(total_variation(f, g).value - abs(f(g.hi) - f(g.lo))) > tol:
            return (g.lo, g.hi)
    return None


def measure_zero_check(v: VariationFunction, f=None) -> float:
    """``lambda(v(K)) = (v(b) - v(a)) - sum over contiguous intervals of the increments``."""
    if f is not None:
        bad = monotone_on_gaps(f, v.K)
        if bad is not None:
            raise ReparamInputError(f"f is not monotone on the contiguous interval {bad}")
    a, b = v.K.domain.lo, v.K.domain.hi
    gaps = contiguous_intervals(v.K)
    return abs(v(b) - v(a)) - sum(abs(v(g.hi) - v(g.lo)) for g in gaps)
