"""Fractional and generalized variations as maximizations over interval families.

Every functional here is a supremum of ``sum_i term(x_i, y_i)`` over finite
families of non-overlapping closed intervals (disjoint interiors; touching
endpoints allowed) whose endpoints lie in a closed set.  On a finite
candidate set the supremum is a maximum and is found by a weighted
interval-scheduling DP over the sorted candidates:

    best[j] = max(best[j-1], max_{k<j admissible} best[k] + term(k, j)).

Families are summed left to right, so re-evaluating a witness reproduces the
reported value bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .funcmodel.expr import ExprFunction
from .funcmodel.pl import PLFunction, SeqPLFunction
from .funcmodel.sets import ClosedSetDesc, Interval, contiguous_intervals

MODES = ("frac", "full", "bar", "right", "left")
BRUTE_FORCE_LIMIT = 14
REFINE_LIMIT = 100_000
SHIFT_LEVELS = 3
SLACK = 1e-12


class NonFiniteCandidates(ValueError):
    """The supremum cannot be reduced to a finite candidate set."""


class CandidateLimitError(ValueError):
    pass


@dataclass(frozen=True)
class VariationQuery:
    alpha: float = 1.0
    delta: float = math.inf
    n: int = 2

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")


@dataclass(frozen=True)
class FamilyInterval:
    lo: float
    hi: float
    lo_in_A: bool = True
    hi_in_A: bool = True

    def to_json(self) -> dict:
        return {"interval": [float(self.lo), float(self.hi)],
                "endpoint_in_A": [self.lo_in_A, self.hi_in_A]}


@dataclass(frozen=True)
class VariationResult:
    value: float
    witness: tuple = ()
    query: VariationQuery = field(default_factory=VariationQuery)
    exact: bool = True
    mode: str = "frac"

    def to_json(self) -> dict:
        v = self.value
        return {
            "mode": self.mode,
            "value": "inf" if v == math.inf else float(v),
            "exact": self.exact,
            "query": {"alpha": self.query.alpha,
                      "delta": "inf" if self.query.delta == math.inf else self.query.delta,
                      "n": self.query.n},
            "witness": [iv.to_json() for iv in self.witness],
        }


# -- candidate sets -------------------------------------------------------------

def as_pl(f) -> Optional[PLFunction]:
    if isinstance(f, PLFunction):
        return f
    if isinstance(f, SeqPLFunction):
        return f.to_pl()
    return None


@dataclass
class Candidates:
    """Sorted candidate endpoints with values and structure flags.

    ``active[k]`` marks that the open segment between candidates ``k`` and
    ``k+1`` lies inside ``K`` and ``f`` is not constant on it; there, any
    exponent below one makes the supremum infinite.
    """

    x: list
    y: list
    in_A: list
    active: list
    A_active: bool = False

    def __len__(self):
        return len(self.x)

    def active_between(self, i: int, j: int) -> bool:
        return self._active_prefix[j] - self._active_prefix[i] > 0

    def __post_init__(self):
        acc = [0]
        for a in self.active:
            acc.append(acc[-1] + int(a))
        self._active_prefix = acc


def build_candidates(f, K: ClosedSetDesc, A: Optional[ClosedSetDesc] = None, *,
                     delta: float = math.inf, refine: bool = False,
                     shifts: bool = False, splits: bool = False) -> Candidates:
    """Finite candidate set on which the supremum over ``K`` is attained.

    Degenerate points and component endpoints of ``K`` always enter.  Inside a
    non-degenerate component the breakpoints of the piecewise-linear ``f``
    are added, and optionally:

    * ``shifts``: points ``p +- k*delta`` (``k <= SHIFT_LEVELS``) landing in a
      component, from ``p`` in ``A`` (or every candidate when ``A`` is None);
      window constraints pin free endpoints there;
    * ``splits``: the maximizer of ``sqrt(V(x,y)) + sqrt(V(y,z))`` over a free
      endpoint ``y`` shared by intervals anchored at ``x, z`` in ``A``
      (exponent one inside, square root outside);
    * ``refine``: component segments split to length ``<= delta`` (valid for
      exponent one only, where splitting an affine piece keeps the sum).
    """
    nd = [c for c in K.components if not c.degenerate]
    pts = set(K.points())
    if A is not None:
        pts.update(A.points())
    pl = as_pl(f)
    if nd:
        if pl is None:
            raise NonFiniteCandidates("K has non-degenerate components and f is not piecewise linear")
        for c in nd:
            pts.update(pl.breakpoints_in(c.lo, c.hi))
        if shifts and math.isfinite(delta):
            frontier = set(A.points()) if A is not None else set(pts)
            for _ in range(SHIFT_LEVELS):
                new = set()
                for p in frontier:
                    for q in (p - delta, p + delta):
                        if q not in pts and any(c.lo < q < c.hi for c in nd):
                            new.add(q)
                pts.update(new)
                frontier = new
        if splits and A is not None:
            pts.update(_split_points(f, sorted(pts), nd, A.points(), delta))
        if refine and math.isfinite(delta):
            extra = []
            xs = sorted(pts)
            for x0, x1 in zip(xs, xs[1:]):
                if x1 - x0 > delta and any(c.lo <= x0 and x1 <= c.hi for c in nd):
                    pieces = math.ceil((x1 - x0) / delta)
                    if len(extra) + pieces > REFINE_LIMIT:
                        raise CandidateLimitError("window refinement needs too many points")
                    extra.extend(x0 + (x1 - x0) * k / pieces for k in range(1, pieces))
            pts.update(extra)
    xs = sorted(pts)
    ys = [f(x) for x in xs]
    in_A = [A.contains(x) for x in xs] if A is not None else [False] * len(xs)
    active = []
    for k in range(len(xs) - 1):
        inside = any(c.lo <= xs[k] and xs[k + 1] <= c.hi for c in nd)
        active.append(inside and ys[k] != ys[k + 1])
    A_active = False
    if A is not None:
        for c in A.components:
            if not c.degenerate and not pl.is_constant_on(c.lo, c.hi):
                A_active = True
    return Candidates(xs, ys, in_A, active, A_active)


def _split_points(f, xs: list, nd, A_pts, delta) -> list:
    ys = [f(x) for x in xs]
    S = [0]
    for y0, y1 in zip(ys, ys[1:]):
        S.append(S[-1] + abs(y1 - y0))
    index = {x: i for i, x in enumerate(xs)}
    out = []
    for x in A_pts:
        for z in A_pts:
            if not (x < z and z - x <= 2 * delta):
                continue
            lo, hi = max(x, z - delta), min(z, x + delta)
            ix, iz = index[x], index[z]
            for k in range(ix, iz):
                s0, s1 = xs[k], xs[k + 1]
                L = abs(ys[k + 1] - ys[k])
                if L == 0 or s1 <= lo or s0 >= hi or not any(c.lo <= s0 and s1 <= c.hi for c in nd):
                    continue
                P, Q = S[k] - S[ix], S[iz] - S[k + 1]
                t = min(max((Q + L - P) / 2, 0), L)
                y = s0 + (s1 - s0) * t / L
                if s0 < y < s1 and lo <= y <= hi:
                    out.append(y)
    return out


# -- the DP and the exhaustive oracle -------------------------------------------

def _power(d, alpha):
    d = abs(d)
    return d if alpha == 1 else float(d) ** alpha


def _maximize(N: int, weight: Callable, admissible: Callable):
    """Prefix DP; returns (best, witness index pairs).

    Ties prefer fewer intervals, then not closing an interval at ``j``.
    """
    best = [0] * N
    cnt = [0] * N
    back: list = [None] * N
    for j in range(1, N):
        bv, bc, bb = best[j - 1], cnt[j - 1], None
        for k in range(j):
            if not admissible(k, j):
                continue
            v = best[k] + weight(k, j)
            c = cnt[k] + 1
            if v > bv or (v == bv and c < bc):
                bv, bc, bb = v, c, k
        best[j], cnt[j], back[j] = bv, bc, bb
    fam = []
    j = N - 1
    while j > 0:
        if back[j] is None:
            j -= 1
        else:
            fam.append((back[j], j))
            j = back[j]
    fam.reverse()
    return best, fam


def _prefix_best(y: list, lo: int, alpha) -> list:
    """Unconstrained inner variation over candidates lo..N-1, for every right end."""
    N = len(y)
    best = [0] * (N - lo)
    for j in range(lo + 1, N):
        bv = best[j - 1 - lo]
        yj = y[j]
        for k in range(lo, j):
            v = best[k - lo] + _power(yj - y[k], alpha)
            if v > bv:
                bv = v
        best[j - lo] = bv
    return best


def _enumerate(N: int, weight: Callable, admissible: Callable):
    """Exhaustive search over all families; same tie rule as :func:`_maximize`."""
    best = [0, ()]

    def rec(start, acc, fam):
        if acc > best[0] or (acc == best[0] and len(fam) < len(best[1])):
            best[0], best[1] = acc, fam
        for c in range(start, N):
            for d in range(c + 1, N):
                if admissible(c, d):
                    rec(d, acc + weight(c, d), fam + ((c, d),))

    rec(0, 0, ())
    return best[0], list(best[1])


def _admissible(mode: str, c: Candidates, delta) -> Callable:
    x, inA = c.x, c.in_A
    # float windows get a relative slack so that shifted candidates p + delta stay admissible
    if isinstance(delta, float):
        delta = delta * (1 + SLACK)
    if mode == "frac":
        return lambda i, j: x[j] - x[i] <= delta
    if mode == "full":
        return lambda i, j: inA[i] and inA[j]
    if mode == "bar":
        return lambda i, j: x[j] - x[i] <= delta and (inA[i] or inA[j])
    if mode == "right":
        return lambda i, j: x[j] - x[i] <= delta and inA[i]
    if mode == "left":
        return lambda i, j: x[j] - x[i] <= delta and inA[j]
    raise ValueError(f"unknown mode {mode!r}")


def _family(c: Candidates, pairs) -> tuple:
    return tuple(FamilyInterval(c.x[i], c.x[j], c.in_A[i], c.in_A[j]) for i, j in pairs)


# -- generalized variation context ----------------------------------------------

class GVContext:
    """Caches the candidate set and the table of inner variations for (f, K, n).

    ``term(i, j) = V_{1/(n-1)}(f, K cap [x_i, x_j]) ** ((n-1)/n)``.
    """

    def __init__(self, f, K: ClosedSetDesc, n: int, cand: Optional[Candidates] = None):
        if n < 2:
            raise ValueError("n must be >= 2")
        self.f, self.K, self.n = f, K, n
        self.cand = cand if cand is not None else build_candidates(f, K)
        self.alpha_in = 1 if n == 2 else 1.0 / (n - 1)
        self.outer = (n - 1) / n
        self._inner = None
        self._terms = None

    @property
    def inner(self) -> list:
        """``inner[i][j] = V_{1/(n-1)}(f, K cap [x_i, x_j])`` for ``i <= j``."""
        if self._inner is None:
            c = self.cand
            N = len(c)
            table = []
            for i in range(N):
                row = [0] * i + _prefix_best(c.y, i, self.alpha_in)
                if self.alpha_in < 1:
                    for j in range(i + 1, N):
                        if c.active_between(i, j):
                            row[j] = math.inf
                table.append(row)
            self._inner = table
        return self._inner

    @property
    def terms(self) -> list:
        if self._terms is None:
            p = self.outer
            self._terms = [[float(v) ** p for v in row] for row in self.inner]
        return self._terms

    def with_A(self, A: ClosedSetDesc) -> Candidates:
        c = self.cand
        in_A = [A.contains(x) for x in c.x]
        probe = build_candidates(self.f, A) if any(not k.degenerate for k in A.components) else None
        A_active = False
        if probe is not None:
            pl = as_pl(self.f)
            A_active = any(not k.degenerate and not pl.is_constant_on(k.lo, k.hi) for k in A.components)
        return Candidates(c.x, c.y, in_A, c.active, A_active)

    def solve(self, A: ClosedSetDesc, mode: str, delta: float = math.inf):
        """Return ``(best prefix array, witness pairs, candidates with A flags)``."""
        if mode not in ("full", "bar", "right", "left"):
            raise ValueError(f"unknown mode {mode!r}")
        c = self.with_A(A)
        T = self.terms
        N = len(c)
        if N == 0:
            return [], [], c
        best, pairs = _maximize(N, lambda i, j: T[i][j], _admissible(mode, c, delta))
        if c.A_active:
            best = [math.inf] * N
        return best, pairs, c

    def value(self, A: ClosedSetDesc, mode: str, delta: float = math.inf) -> float:
        if A.is_empty:
            return 0.0
        best, _, _ = self.solve(A, mode, delta)
        return best[-1] if best else 0.0

    def suffix_values(self, A: ClosedSetDesc, delta: float) -> list:
        """``lGV^delta(f, A cap [x_i, b], K cap [x_i, b])`` for every candidate ``i``."""
        c = self.with_A(A)
        T = self.terms
        N = len(c)
        x = c.x
        # reflected problem: index r <-> N-1-r; a left-anchored interval becomes right-anchored
        def adm(i, j):
            lo, hi = N - 1 - j, N - 1 - i
            return x[hi] - x[lo] <= delta and c.in_A[hi]

        best, _ = _maximize(N, lambda i, j: T[N - 1 - j][N - 1 - i], adm)
        if c.A_active:
            best = [math.inf] * N
        return best[::-1]


def _check_subset(A: ClosedSetDesc, K: ClosedSetDesc):
    if not A.issubset(K):
        raise ValueError("A must be a subset of K")


def _needs_custom(K: ClosedSetDesc, mode: str) -> bool:
    """Windowed modes over components need candidates that depend on ``A``."""
    return mode != "full" and any(not c.degenerate for c in K.components)


def _gv_candidates(f, A, K, n, mode, delta) -> Candidates:
    return build_candidates(f, K, A, delta=delta, shifts=True, splits=(mode == "bar" and n == 2))


# -- public functionals ---------------------------------------------------------

def frac_variation(f, K: ClosedSetDesc, q: Optional[VariationQuery] = None) -> VariationResult:
    """``V_alpha^delta(f, K)``: max of ``sum |f(d_i) - f(c_i)|^alpha`` over
    non-overlapping ``[c_i, d_i]`` with ``c_i, d_i`` in ``K`` and ``d_i - c_i <= delta``."""
    q = q or VariationQuery()
    if K.is_empty:
        return VariationResult(0.0, (), q, True, "frac")
    c = build_candidates(f, K, delta=q.delta, refine=(q.alpha == 1), shifts=True)
    if q.alpha < 1 and any(c.active):
        return VariationResult(math.inf, (), q, True, "frac")
    N = len(c)
    y = c.y
    best, pairs = _maximize(N, lambda i, j: _power(y[j] - y[i], q.alpha), _admissible("frac", c, q.delta))
    return VariationResult(best[-1], _family(c, pairs), q, True, "frac")


def gen_variation(f, A: ClosedSetDesc, K: ClosedSetDesc, n: int, mode: str = "full",
                  delta: float = math.inf, ctx: Optional[GVContext] = None) -> VariationResult:
    """Generalized variation with terms ``V_{1/(n-1)}(f, K cap [x_i, y_i]) ** ((n-1)/n)``.

    ``mode``: ``full`` (both endpoints in A, no window), ``bar`` (window,
    endpoints in K, at least one in A), ``right`` (left endpoint in A),
    ``left`` (right endpoint in A).
    """
    if mode == "full":
        delta = math.inf
    q = VariationQuery(alpha=1.0 / n, delta=delta, n=n)
    _check_subset(A, K)
    if A.is_empty:
        return VariationResult(0.0, (), q, True, mode)
    if _needs_custom(K, mode):
        ctx = GVContext(f, K, n, _gv_candidates(f, A, K, n, mode, delta))
    elif ctx is None or not set(A.points()) <= set(ctx.cand.x):
        ctx = GVContext(f, K, n, build_candidates(f, K, A))
    best, pairs, c = ctx.solve(A, mode, delta)
    if c.A_active:
        return VariationResult(math.inf, (), q, True, mode)
    return VariationResult(best[-1], _family(c, pairs), q, True, mode)


def oracle_candidates(f, A: Optional[ClosedSetDesc], K: ClosedSetDesc, q: VariationQuery, mode: str = "frac"):
    """The candidate points that :func:`brute_force_variation` enumerates for ``mode``."""
    delta = math.inf if mode == "full" else q.delta
    if mode == "frac":
        return build_candidates(f, K, delta=delta, refine=(q.alpha == 1), shifts=True)
    if _needs_custom(K, mode):
        return _gv_candidates(f, A, K, q.n, mode, delta)
    return build_candidates(f, K, A)


def brute_force_variation(f, A: Optional[ClosedSetDesc], K: ClosedSetDesc,
                          q: VariationQuery, mode: str = "frac") -> VariationResult:
    """Exhaustive enumeration oracle for :func:`frac_variation` and :func:`gen_variation`.

    Inner variations are enumerated as well, so no DP is involved.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    delta = math.inf if mode == "full" else q.delta
    if K.is_empty or (mode != "frac" and (A is None or A.is_empty)):
        return VariationResult(0.0, (), q, True, mode)
    if mode != "frac":
        _check_subset(A, K)
    c = oracle_candidates(f, A, K, q, mode)
    N = len(c)
    if N > BRUTE_FORCE_LIMIT:
        raise CandidateLimitError(f"{N} candidates exceed the brute-force limit {BRUTE_FORCE_LIMIT}")
    y = c.y
    if mode == "frac":
        if q.alpha < 1 and any(c.active):
            return VariationResult(math.inf, (), q, True, mode)
        val, pairs = _enumerate(N, lambda i, j: _power(y[j] - y[i], q.alpha), _admissible(mode, c, delta))
        return VariationResult(val, _family(c, pairs), q, True, mode)
    if c.A_active:
        return VariationResult(math.inf, (), q, True, mode)
    alpha_in = 1 if q.n == 2 else 1.0 / (q.n - 1)
    outer = (q.n - 1) / q.n
    cache: dict = {}

    def term(i, j):
        if (i, j) not in cache:
            if alpha_in < 1 and c.active_between(i, j):
                inner = math.inf
            else:
                inner, _ = _enumerate(j - i + 1, lambda a, b: _power(y[i + b] - y[i + a], alpha_in),
                                      lambda a, b: True)
            cache[i, j] = float(inner) ** outer
        return cache[i, j]

    val, pairs = _enumerate(N, term, _admissible(mode, c, delta))
    return VariationResult(val, _family(c, pairs), q, True, mode)


def evaluate_family(f, K: ClosedSetDesc, family: Sequence, q: VariationQuery, mode: str = "frac"):
    """Sum of the functional's terms over ``family``, left to right."""
    total = 0
    for iv in family:
        lo, hi = (iv.lo, iv.hi) if isinstance(iv, FamilyInterval) else iv
        if mode == "frac":
            total = total + _power(f(hi) - f(lo), q.alpha)
        else:
            alpha_in = 1 if q.n == 2 else 1.0 / (q.n - 1)
            sub = K.restrict(lo, hi)
            inner = frac_variation(f, sub, VariationQuery(alpha=alpha_in)).value
            total = total + float(inner) ** ((q.n - 1) / q.n)
    return total


def total_variation(f, I: Optional[Interval] = None) -> VariationResult:
    """``V(f, I)``; exact for piecewise-linear models, grid-based for expressions."""
    I = I or f.domain
    pl = as_pl(f)
    exact = pl is not None
    if exact:
        xs = [I.lo] + [x for x in pl.breakpoints if I.lo < x < I.hi] + [I.hi]
    else:
        from .funcmodel.detect import detect_K
        Kf = detect_K(f).restrict(I.lo, I.hi)
        xs = sorted({I.lo, I.hi, *Kf.points()})
    ys = [f(x) for x in xs]
    runs = []
    start = 0
    for i in range(1, len(xs) - 1):
        if (ys[i] - ys[i - 1]) * (ys[i + 1] - ys[i]) < 0:
            runs.append((start, i))
            start = i
    if len(xs) > 1:
        runs.append((start, len(xs) - 1))
    value = 0
    for i in range(len(xs) - 1):
        value = value + abs(ys[i + 1] - ys[i])
    fam = tuple(FamilyInterval(xs[a], xs[b]) for a, b in runs if ys[a] != ys[b])
    return VariationResult(value, fam, VariationQuery(delta=I.hi - I.lo if I.hi > I.lo else math.inf),
                           exact, "total")


@dataclass
class SVReport:
    alpha: float
    schedule: list
    values: list
    trend: str

    @property
    def last(self):
        return self.values[-1] if self.values else None

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "trend": self.trend,
                "schedule": [{"delta": d, "value": float(v)} for d, v in zip(self.schedule, self.values)]}


def sv_variation(f, K: ClosedSetDesc, alpha: float, schedule: Sequence[float]) -> SVReport:
    """``V_alpha^delta`` along a decreasing window schedule; a trend, never a limit claim."""
    sched = list(schedule)
    if any(d1 >= d0 for d0, d1 in zip(sched, sched[1:])):
        raise ValueError("delta schedule must be strictly decreasing")
    vals = [frac_variation(f, K, VariationQuery(alpha=alpha, delta=d)).value for d in sched]
    if vals and vals[-1] <= SLACK:
        trend = "converging-to-zero"
    elif len(vals) >= 3 and vals[-1] < vals[-2] < vals[-3]:
        trend = "converging-to-zero"
    else:
        trend = "plateau"
    return SVReport(alpha, sched, vals, trend)


@dataclass
class AdditivityReport:
    ok: bool
    total: float
    left: float
    right: float
    side: str


def additivity_check(f, A: ClosedSetDesc, K: ClosedSetDesc, delta: float, x, n: int = 2,
                     side: str = "right", tol: float = 1e-10) -> AdditivityReport:
    """Check that the unilateral variation splits additively at ``x`` in ``A``."""
    if not A.contains(x):
        raise ValueError(f"{x} is not in A")
    a, b = K.domain.lo, K.domain.hi
    total = gen_variation(f, A, K, n, side, delta).value
    left = gen_variation(f, A.restrict(a, x), K.restrict(a, x), n, side, delta).value
    right = gen_variation(f, A.restrict(x, b), K.restrict(x, b), n, side, delta).value
    return AdditivityReport(abs(total - (left + right)) <= tol, total, left, right, side)


def _pieces(K: ClosedSetDesc, mesh: float):
    """Split K along the grid lo + k*mesh into pieces, as (lo, hi) sub-intervals."""
    lo0 = K.domain.lo
    cells: dict = {}
    for c in K.components:
        if c.degenerate:
            k = min(int((c.lo - lo0) // mesh), max(0, math.ceil((K.domain.hi - lo0) / mesh) - 1))
            cells.setdefault(k, []).append((c.lo, c.lo))
            continue
        k0, k1 = int((c.lo - lo0) // mesh), int((c.hi - lo0) // mesh)
        for k in range(k0, k1 + 1):
            l, h = max(c.lo, lo0 + k * mesh), min(c.hi, lo0 + (k + 1) * mesh)
            if l <= h:
                cells.setdefault(k, []).append((l, h))
    return cells


def image_measure_bound(f, K: ClosedSetDesc, mesh: float) -> float:
    """Upper bound on the Lebesgue measure of ``f(K)`` from a grid covering of ``K``.

    ``K`` is cut along the grid ``a + k*mesh``; each cell contributes the
    range ``[min f, max f]`` of ``f`` over its part of ``K`` and the bound is
    the measure of the union of these ranges.  Refining the grid can only
    shrink the union.
    """
    if mesh <= 0:
        raise ValueError("mesh must be positive")
    pl = as_pl(f)
    ranges = []
    for parts in _pieces(K, mesh).values():
        vals = []
        for l, h in parts:
            vals.append(f(l))
            if h > l:
                vals.append(f(h))
                if pl is not None:
                    vals.extend(f(x) for x in pl.breakpoints_in(l, h))
        ranges.append((float(min(vals)), float(max(vals))))
    ranges.sort()
    total = 0.0
    cur_lo = cur_hi = None
    for lo, hi in ranges:
        if cur_hi is None or lo > cur_hi:
            if cur_hi is not None:
                total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    if cur_hi is not None:
        total += cur_hi - cur_lo
    return total


@dataclass
class BoundReport:
    holds: bool
    total_variation: float
    bound: float
    N: int
    M: float
    frac_value: float


class HypothesisError(ValueError):
    pass


def variation_bound_check(f, K: ClosedSetDesc, q: VariationQuery, tol: float = 1e-12) -> BoundReport:
    """Check ``V(f,[a,b]) <= 2*N*M + V_alpha^delta(f, K)`` after verifying that
    ``f`` is monotone on every interval contiguous to ``K``."""
    K2, _ = K.with_endpoints()
    gaps = contiguous_intervals(K2)
    for g in gaps:
        if abs(total_variation(f, g).value - abs(f(g.hi) - f(g.lo))) > tol:
            raise HypothesisError(f"f is not monotone on the contiguous interval ({g.lo}, {g.hi})")
    V = total_variation(f).value
    N = sum(1 for g in gaps if abs(f(g.hi) - f(g.lo)) > 1 or g.length >= q.delta)
    pl = as_pl(f)
    if pl is not None:
        M = max(abs(v) for v in pl.values)
    else:
        import numpy as np
        M = float(np.max(np.abs(f.eval_many(np.linspace(f.domain.lo, f.domain.hi, 4097)))))
    Vf = frac_variation(f, K2, q).value
    bound = 2 * N * M + Vf
    return BoundReport(V <= bound + tol, V, bound, N, M, Vf)
