"""Closed intervals and finite descriptions of closed subsets of [a, b]."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

ABS_TOL = 1e-12


@dataclass(frozen=True, order=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"interval with lo > hi: [{self.lo}, {self.hi}]")

    @property
    def length(self):
        return self.hi - self.lo

    @property
    def degenerate(self) -> bool:
        return self.lo == self.hi

    def contains(self, x, tol: float = 0.0) -> bool:
        if not tol:   # keep exact arithmetic exact
            return self.lo <= x <= self.hi
        return self.lo - tol <= x <= self.hi + tol

    def as_list(self) -> list:
        return [self.lo, self.hi]


def point(x) -> Interval:
    return Interval(x, x)


@dataclass(frozen=True)
class ClosedSetDesc:
    """A closed subset of ``domain`` given as a finite union of closed intervals.

    Degenerate components are points.  ``accumulation`` lists points that are
    accumulation points of the untruncated set this description stands for
    (e.g. the anchor of a sequence truncated at finite index).
    """

    domain: Interval
    components: tuple[Interval, ...] = ()
    accumulation: tuple[float, ...] = field(default=())

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "accumulation", tuple(self.accumulation))
        for c in comps:
            if not (self.domain.lo <= c.lo and c.hi <= self.domain.hi):
                raise ValueError(f"component {c} outside domain {self.domain}")
        for c0, c1 in zip(comps, comps[1:]):
            if not c0.hi < c1.lo:
                raise ValueError(f"components {c0} and {c1} overlap or are unsorted")

    # -- constructors -------------------------------------------------------
    @classmethod
    def from_points(cls, domain: Interval, pts: Iterable, accumulation=()) -> "ClosedSetDesc":
        xs = sorted(set(pts))
        return cls(domain, tuple(Interval(x, x) for x in xs), tuple(accumulation))

    @classmethod
    def from_intervals(cls, domain: Interval, items: Iterable, accumulation=()) -> "ClosedSetDesc":
        """Build from possibly overlapping, unsorted ``(lo, hi)`` pairs (merged)."""
        ivs = sorted((Interval(*it) if not isinstance(it, Interval) else it) for it in items)
        merged: list[Interval] = []
        for iv in ivs:
            if merged and iv.lo <= merged[-1].hi:
                last = merged.pop()
                merged.append(Interval(last.lo, max(last.hi, iv.hi)))
            else:
                merged.append(iv)
        return cls(domain, tuple(merged), tuple(accumulation))

    @classmethod
    def empty(cls, domain: Interval) -> "ClosedSetDesc":
        return cls(domain, ())

    # -- queries ------------------------------------------------------------
    @property
    def is_empty(self) -> bool:
        return not self.components

    @property
    def is_finite(self) -> bool:
        return all(c.degenerate for c in self.components)

    def points(self) -> list:
        """Sorted list of degenerate points and component endpoints."""
        out = []
        for c in self.components:
            out.append(c.lo)
            if not c.degenerate:
                out.append(c.hi)
        return out

    def contains(self, x, tol: float = 0.0) -> bool:
        return any(c.contains(x, tol) for c in self.components)

    def component_of(self, x):
        for c in self.components:
            if c.contains(x):
                return c
        return None

    def total_length(self):
        return sum((c.length for c in self.components), 0)

    def issubset(self, other: "ClosedSetDesc", tol: float = 0.0) -> bool:
        for c in self.components:
            if not any(o.contains(c.lo, tol) and o.contains(c.hi, tol) for o in other.components):
                return False
        return True

    def union(self, other: "ClosedSetDesc") -> "ClosedSetDesc":
        acc = tuple(sorted(set(self.accumulation) | set(other.accumulation)))
        return ClosedSetDesc.from_intervals(self.domain, self.components + other.components, acc)

    def add_points(self, pts: Iterable) -> "ClosedSetDesc":
        return self.union(ClosedSetDesc.from_points(self.domain, pts))

    def restrict(self, lo, hi) -> "ClosedSetDesc":
        """Intersection with [lo, hi]; the domain is kept."""
        comps = []
        for c in self.components:
            l, h = max(c.lo, lo), min(c.hi, hi)
            if l <= h:
                comps.append(Interval(l, h))
        acc = tuple(x for x in self.accumulation if lo <= x <= hi)
        return ClosedSetDesc(self.domain, tuple(comps), acc)

    def with_endpoints(self) -> tuple["ClosedSetDesc", bool]:
        """Return the set augmented by {a, b} and whether anything was added."""
        a, b = self.domain.lo, self.domain.hi
        missing = [x for x in (a, b) if not self.contains(x)]
        if not missing:
            return self, False
        return self.add_points(missing), True

    def to_json(self) -> dict:
        out = {"domain": self.domain.as_list(), "components": [c.as_list() for c in self.components]}
        if self.accumulation:
            out["accumulation"] = list(self.accumulation)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "ClosedSetDesc":
        dom = Interval(*obj["domain"])
        return cls.from_intervals(dom, [tuple(c) for c in obj.get("components", [])],
                                  obj.get("accumulation", ()))


def contiguous_intervals(K: ClosedSetDesc, report: bool = False):
    """Maximal open components of ``domain \\ K``, sorted.

    The ambient endpoints are added to ``K`` first.  With ``report=True`` the
    return value is ``(intervals, augmented)``.
    """
    K2, augmented = K.with_endpoints()
    comps = K2.components
    gaps = [Interval(c0.hi, c1.lo) for c0, c1 in zip(comps, comps[1:])]
    return (gaps, augmented) if report else gaps


def derived_set(K: ClosedSetDesc) -> ClosedSetDesc:
    """Accumulation points: non-degenerate components plus flagged points."""
    keep = [c for c in K.components if not c.degenerate]
    for x in K.accumulation:
        c = K.component_of(x)
        if c is not None and c.degenerate:
            keep.append(c)
    keep.sort()
    return ClosedSetDesc(K.domain, tuple(keep), tuple(x for x in K.accumulation if K.contains(x)))


def cantor_prefix(depth: int, domain: Sequence = (0.0, 1.0), as_points: bool = False) -> ClosedSetDesc:
    """Level-``depth`` middle-thirds prefix: 2**depth closed intervals.

    With ``as_points=True`` only the interval endpoints are kept, which is a
    finite subset of the Cantor set itself.
    """
    a, b = domain
    ivs = [(a, b)]
    for _ in range(depth):
        nxt = []
        for lo, hi in ivs:
            t = (hi - lo) / 3
            nxt.append((lo, lo + t))
            nxt.append((hi - t, hi))
        ivs = nxt
    dom = Interval(a, b)
    if as_points:
        return ClosedSetDesc.from_points(dom, [x for iv in ivs for x in iv])
    return ClosedSetDesc(dom, tuple(Interval(lo, hi) for lo, hi in ivs))


def cantor_depth_groups(depth: int, domain: Sequence = (0.0, 1.0)) -> list[list[float]]:
    """Endpoints of the Cantor prefix grouped by the level at which they appear."""
    groups = []
    seen: set = set()
    for d in range(depth + 1):
        pts = cantor_prefix(d, domain, as_points=True).points()
        new = [x for x in pts if x not in seen]
        seen.update(new)
        groups.append(new)
    return groups
