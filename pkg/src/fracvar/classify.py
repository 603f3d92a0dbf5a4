"""Decomposition witnesses for the generalized-variation smoothness classes.

Nothing here decides class membership of a limit object.  Witnesses are
checked on finite truncations and the per-index values are summarized by a
trend verdict across an increasing truncation schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .funcmodel.detect import detect_K
from .funcmodel.expr import ExprFunction, taylor_eval
from .funcmodel.pl import SeqPLFunction
from .funcmodel.sets import ClosedSetDesc, Interval, derived_set
from .variation import GVContext, VariationQuery, frac_variation

BOUNDED_SLOPE = 0.05
DIVERGENT_SLOPE = 0.5
GEOMETRIC_RATIO = 0.9
BKM_GRID = 1024


class WitnessError(ValueError):
    """A decomposition witness violates its structural invariants."""


class BudgetExhausted(RuntimeError):
    pass


class HypothesisFailure(ValueError):
    def __init__(self, clause: str, detail: str):
        super().__init__(f"{clause}: {detail}")
        self.clause = clause


@dataclass(frozen=True)
class DecompositionWitness:
    """``kind`` is ``cbvg``, ``sbvg`` or ``sbvg-bar``.

    For ``sbvg-bar`` the sets and deltas are rows indexed by ``k``, each row a
    list indexed by ``m``.
    """

    kind: str
    sets: tuple
    deltas: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in ("cbvg", "sbvg", "sbvg-bar"):
            raise WitnessError(f"unknown witness kind {self.kind!r}")
        object.__setattr__(self, "sets", tuple(tuple(r) if isinstance(r, list) else r for r in self.sets))
        if self.deltas is not None:
            object.__setattr__(self, "deltas", tuple(tuple(r) if isinstance(r, list) else r
                                                     for r in self.deltas))
        if self.kind != "cbvg" and self.deltas is None:
            raise WitnessError(f"{self.kind} witness needs deltas")
        if self.kind == "sbvg" and len(self.deltas) != len(self.sets):
            raise WitnessError("one delta per set required")

    def to_json(self) -> dict:
        if self.kind == "sbvg-bar":
            sets = [[A.to_json() for A in row] for row in self.sets]
            deltas = [list(r) for r in self.deltas]
        else:
            sets = [A.to_json() for A in self.sets]
            deltas = list(self.deltas) if self.deltas is not None else None
        out = {"kind": self.kind, "sets": sets}
        if deltas is not None:
            out["deltas"] = deltas
        return out


@dataclass(frozen=True)
class EstimateConstants:
    k: int
    n: int

    @property
    def C_kn(self) -> float:
        return self.k ** (1 / self.n) * (2 * self.n) ** ((self.n - 1) / self.n)


@dataclass(frozen=True)
class PointwiseLipschitzSet:
    k: int
    m: int
    points: ClosedSetDesc


# -- the example family ---------------------------------------------------------

def make_difex(n: int, M: int, seq: Optional[Callable[[int], float]] = None) -> SeqPLFunction:
    """Teeth of height ``m**-n`` at ``a_{2m}``, zeros at ``a_{2m-1}``; ``a_m = 1/m`` by default."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if M < 2:
        raise ValueError("truncation M must be >= 2")
    rule = seq or (lambda m: 1.0 / m)

    def vals(m):
        return (m // 2) ** (-n) if m % 2 == 0 else 0.0

    upper_value = None if rule(1) == 1.0 else 0.0
    params = {"n": n} if seq is None else {"n": n, "custom_sequence": True}
    return SeqPLFunction(0.0, rule, vals, M, 0.0, 1.0, upper_value, "difex", params)


def difex_cbvg_witness(f: SeqPLFunction) -> DecompositionWitness:
    """``A_1 = {0, 1}`` and ``A_m = {a_{2m-2}, a_{2m-3}}``, cut at the truncation."""
    dom = f.domain
    sets = [ClosedSetDesc.from_points(dom, [f.anchor, f.upper])]
    m = 2
    while 2 * m - 3 <= f.M:
        idx = [i for i in (2 * m - 2, 2 * m - 3) if i <= f.M]
        sets.append(ClosedSetDesc.from_points(dom, [f.seq(i) for i in idx]))
        m += 1
    return DecompositionWitness("cbvg", tuple(sets))


def difex_sbvg_witness(f: SeqPLFunction, count: Optional[int] = None) -> DecompositionWitness:
    """Growing prefixes ``{0, 1, a_1..a_{2m}}`` with windows below the gap after ``a_{2m}``."""
    count = count or f.M // 2
    dom = f.domain
    sets, deltas = [], []
    for m in range(1, count + 1):
        pts = [f.anchor, f.upper] + [f.seq(i) for i in range(1, min(2 * m, f.M) + 1)]
        sets.append(ClosedSetDesc.from_points(dom, pts))
        deltas.append(0.5 * (f.seq(2 * m) - f.seq(2 * m + 1)))
    return DecompositionWitness("sbvg", tuple(sets), tuple(deltas))


# -- trends ---------------------------------------------------------------------

@dataclass
class Trend:
    verdict: str   # bounded | divergent | inconclusive
    slope: float
    ratios: list

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "slope": self.slope, "increment_ratios": self.ratios}


def trend_verdict(Ms: Sequence[int], values: Sequence[float]) -> Trend:
    """Classify a value sequence along a truncation schedule.

    The least-squares slope against ``log M`` flags growth; in addition a
    non-negative increment sequence whose consecutive ratios stay below
    ``GEOMETRIC_RATIO`` is a geometric tail and counts as bounded.
    """
    vals = [float(v) for v in values]
    if any(math.isinf(v) for v in vals):
        return Trend("divergent", math.inf, [])
    if len(vals) < 2:
        return Trend("bounded" if vals else "inconclusive", 0.0, [])
    logs = np.log(np.asarray(Ms, float))
    slope = float(np.polyfit(logs, np.asarray(vals), 1)[0])
    inc = [v1 - v0 for v0, v1 in zip(vals, vals[1:])]
    scale = max(1.0, max(abs(v) for v in vals))
    tiny = 1e-12 * scale
    ratios = [i1 / i0 if i0 > tiny else (0.0 if i1 <= tiny else math.inf) for i0, i1 in zip(inc, inc[1:])]
    if all(i >= -tiny for i in inc) and all(r <= GEOMETRIC_RATIO for r in ratios) and (ratios or inc[0] <= tiny):
        return Trend("bounded", slope, ratios)
    if abs(slope) < BOUNDED_SLOPE:
        return Trend("bounded", slope, ratios)
    if slope > DIVERGENT_SLOPE:
        return Trend("divergent", slope, ratios)
    return Trend("inconclusive", slope, ratios)


# -- witness checks -------------------------------------------------------------

def _kf(f) -> ClosedSetDesc:
    return detect_K(f)


def _require_subsets(sets, K: ClosedSetDesc):
    for i, A in enumerate(sets, start=1):
        if not A.issubset(K):
            raise WitnessError(f"witness set {i} is not contained in K_f")


def covers(K: ClosedSetDesc, sets) -> bool:
    if not sets:
        return K.is_empty
    union = sets[0]
    for A in sets[1:]:
        union = union.union(A)
    return K.issubset(union)


@dataclass
class CBVGReport:
    n: int
    truncations: list
    inner_values: list          # V_{1/(n-1)}(f, K_f) per truncation
    coverage: list
    per_m: dict                 # m -> list of (M, GV value)
    inner_trend: Trend
    per_m_trends: dict
    verdict: str

    def to_json(self) -> dict:
        def num(v):
            return "inf" if v == math.inf else float(v)
        return {
            "n": self.n, "verdict": self.verdict, "truncations": self.truncations,
            "inner_variation": [num(v) for v in self.inner_values],
            "inner_trend": self.inner_trend.to_json(),
            "coverage": self.coverage,
            "per_set": {str(m): {"values": [[M, num(v)] for M, v in vals],
                                 "trend": self.per_m_trends[m].to_json()}
                        for m, vals in self.per_m.items()},
        }


def _instances(f, w, truncations, witness_rule):
    if truncations is None:
        return [(getattr(f, "M", 0), f, w)]
    if not isinstance(f, SeqPLFunction):
        raise ValueError("truncation schedules need a sequence-defined function")
    if any(b <= a for a, b in zip(truncations, truncations[1:])):
        raise ValueError("truncation schedule must be strictly increasing")
    out = []
    for M in truncations:
        fM = f.truncate(M)
        out.append((M, fM, witness_rule(fM) if witness_rule else w))
    return out


def _combine(trends) -> str:
    verdicts = [t.verdict for t in trends]
    if "divergent" in verdicts:
        return "not consistent with CBVG"
    if all(v == "bounded" for v in verdicts):
        return "consistent with CBVG"
    return "inconclusive"


def check_cbvg(f, w: Optional[DecompositionWitness], n: int, truncations: Optional[Sequence[int]] = None,
               witness_rule: Optional[Callable] = None) -> CBVGReport:
    """Evaluate ``GV_{1/n}(f, A_m, K_f)`` for every witness set, per truncation."""
    if w is not None and w.kind != "cbvg":
        raise WitnessError("check_cbvg needs a cbvg witness")
    inst = _instances(f, w, list(truncations) if truncations else None, witness_rule)
    alpha_in = 1 if n == 2 else 1.0 / (n - 1)
    Ms, inner, cov = [], [], []
    per_m: dict = {}
    for M, fM, wM in inst:
        K = _kf(fM)
        _require_subsets(wM.sets, K)
        ctx = GVContext(fM, K, n)
        Ms.append(M)
        inner.append(frac_variation(fM, K, VariationQuery(alpha=alpha_in)).value)
        cov.append(covers(K, list(wM.sets)))
        for m, A in enumerate(wM.sets, start=1):
            per_m.setdefault(m, []).append((M, ctx.value(A, "full")))
    inner_trend = trend_verdict(Ms, inner)
    trends = {m: trend_verdict([M for M, _ in v], [x for _, x in v]) for m, v in per_m.items()}
    verdict = _combine([inner_trend, *trends.values()])
    if not all(cov) and verdict == "consistent with CBVG":
        verdict = "inconclusive"
    return CBVGReport(n, Ms, inner, cov, per_m, inner_trend, trends, verdict)


@dataclass
class SBVGReport:
    n: int
    deltas: list
    values: list
    verdict: str

    def to_json(self) -> dict:
        return {"n": self.n, "verdict": self.verdict, "deltas": list(self.deltas),
                "values": ["inf" if v == math.inf else float(v) for v in self.values]}


def validate_sbvg(w: DecompositionWitness, K: Optional[ClosedSetDesc] = None):
    if w.kind != "sbvg":
        raise WitnessError("expected an sbvg witness")
    for m, (A0, A1) in enumerate(zip(w.sets, w.sets[1:]), start=1):
        if not A0.issubset(A1):
            raise WitnessError(f"nesting fails: A_{m} is not contained in A_{m + 1}")
    for m, (d0, d1) in enumerate(zip(w.deltas, w.deltas[1:]), start=1):
        if not d1 < d0:
            raise WitnessError(f"windows not strictly decreasing at index {m}")
    if any(d <= 0 for d in w.deltas):
        raise WitnessError("windows must be positive")
    if K is not None:
        _require_subsets(w.sets, K)


def check_sbvg(f, w: DecompositionWitness, n: int, K: Optional[ClosedSetDesc] = None) -> SBVGReport:
    """Sequence of ``GV-bar^{delta_m}_{1/n}(f, A_m, K_f)`` with a decay verdict."""
    K = K if K is not None else _kf(f)
    validate_sbvg(w, K)
    ctx = GVContext(f, K, n)
    vals = [_bar_value(ctx, f, A, K, n, d) for A, d in zip(w.sets, w.deltas)]
    slack = 1e-12 * max([1.0] + [v for v in vals if math.isfinite(v)])
    noninc = all(v1 <= v0 + slack for v0, v1 in zip(vals, vals[1:]))
    decreasing = noninc and (vals[-1] <= slack or (len(vals) > 1 and vals[-1] < vals[0]))
    return SBVGReport(n, list(w.deltas), vals, "decreasing toward 0" if decreasing else "not decreasing")


def _bar_value(ctx: GVContext, f, A, K, n, delta) -> float:
    if any(not c.degenerate for c in K.components):
        from .variation import gen_variation
        return gen_variation(f, A, K, n, "bar", delta).value
    return ctx.value(A, "bar", delta)


@dataclass
class CollapseResult:
    witness: DecompositionWitness
    chosen: list        # per p: {row index: column index}, 1-based
    values: list        # GV-bar^{delta_p}(f, A_p, K_f)
    ok: bool


def collapse_sbvg_bar(f, w: DecompositionWitness, n: int, P: Optional[int] = None,
                      K: Optional[ClosedSetDesc] = None) -> CollapseResult:
    """Diagonalize a doubly indexed witness into a single nested one.

    For ``p = 1..P`` pick in every row ``i <= p`` the first column
    ``l_i > N_{p-1}`` with windowed variation at most ``p**-2``; then
    ``A_p`` is the union of the picked sets, ``delta_p = min(1/p, picked
    windows)`` and ``N_p = 1 + max l_i``.  Empty rows are skipped: the union
    bound needs only the rows present.
    """
    if w.kind != "sbvg-bar":
        raise WitnessError("collapse needs an sbvg-bar witness")
    K = K if K is not None else _kf(f)
    rows = [list(zip(r, d)) for r, d in zip(w.sets, w.deltas)]
    for r in rows:
        for A, _ in r:
            _require_subsets([A], K)
    ctx = GVContext(f, K, n)
    P = P or max((len(r) for r in rows), default=0)
    sets, deltas, chosen, values = [], [], [], []
    N_prev = 0
    for p in range(1, P + 1):
        picks = {}
        for i, row in enumerate(rows[:p], start=1):
            if not row:
                continue
            for l in range(N_prev + 1, len(row) + 1):
                A, d = row[l - 1]
                if _bar_value(ctx, f, A, K, n, d) <= p ** -2:
                    picks[i] = l
                    break
            else:
                raise BudgetExhausted(f"row {i}: no column beyond {N_prev} reaches {p ** -2:g} at p={p}")
        if not picks:
            break
        A_p = None
        for i, l in picks.items():
            A = rows[i - 1][l - 1][0]
            A_p = A if A_p is None else A_p.union(A)
        d_p = min([1.0 / p] + [rows[i - 1][l - 1][1] for i, l in picks.items()])
        N_prev = 1 + max(picks.values())
        sets.append(A_p)
        deltas.append(d_p)
        chosen.append(picks)
        values.append(_bar_value(ctx, f, A_p, K, n, d_p))
    out = DecompositionWitness("sbvg", tuple(sets), tuple(deltas))
    ok = all(v <= 1.0 / p + 1e-12 for p, v in enumerate(values, start=1))
    return CollapseResult(out, chosen, values, ok)


# -- pointwise Lipschitz sets ---------------------------------------------------

def _radii(grid: int, m: int) -> np.ndarray:
    # a fixed lattice of radii per unit length keeps B^k_m nested in m
    r = np.arange(1, grid + 1) / grid
    return r[r < 1.0 / m]


def build_Bkm(f, n: int, k: float, m: int, points: Optional[Sequence[float]] = None,
              grid: int = BKM_GRID) -> PointwiseLipschitzSet:
    """Points ``x`` of ``K_f'`` with ``|f^(n-1)(y)| <= k |y - x|`` at all sampled ``|y - x| < 1/m``.

    Candidate points default to the derived set of the detected ``K_f``;
    pass ``points`` explicitly for flats that grid detection cannot resolve.
    """
    if not isinstance(f, ExprFunction):
        raise TypeError("build_Bkm needs an expression-defined function")
    dom = f.domain
    if points is None:
        cands = derived_set(detect_K(f)).points()
    else:
        cands = list(points)
    radii = _radii(grid, m)
    keep = []
    for x in cands:
        ok = abs(taylor_eval(f, x, n - 1)[n - 1]) <= 1e-12
        for r in radii:
            if not ok:
                break
            for y in (x - r, x + r):
                if dom.lo <= y <= dom.hi and abs(taylor_eval(f, y, n - 1)[n - 1]) > k * r * (1 + 1e-12):
                    ok = False
                    break
        if ok:
            keep.append(x)
    return PointwiseLipschitzSet(k, m, ClosedSetDesc.from_points(dom, keep))


# -- the key estimate -----------------------------------------------------------

@dataclass
class KeyEstimateReport:
    lhs: float
    rhs: float
    holds: bool
    constants: EstimateConstants
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "holds": self.holds,
                "k": self.constants.k, "n": self.constants.n, "C_kn": self.constants.C_kn,
                "notes": self.notes}


def _derivative(f, x, order):
    if isinstance(f, ExprFunction):
        return taylor_eval(f, x, order)[order]
    return f.derivative(x, order)


def check_key_estimate(f, K: ClosedSetDesc, A: ClosedSetDesc, x, xp, n: int, k: int,
                       m: Optional[int] = None, tol: float = 1e-9) -> KeyEstimateReport:
    """Check ``(V_{1/(n-1)}(f, K cap [x,x']))^((n-1)/n) <= C_kn (x'-x)^(1/n) (gap length)^((n-1)/n)``.

    The hypotheses are verified first; a failing clause raises
    :class:`HypothesisFailure`.
    """
    notes = []
    if not x < xp:
        raise HypothesisFailure("order", f"need x < x', got {x}, {xp}")
    if not (A.contains(x) or A.contains(xp)):
        raise HypothesisFailure("anchor", "neither x nor x' lies in A")
    if m is not None and not xp - x < 1.0 / m:
        raise HypothesisFailure("radius", f"x' - x = {xp - x} is not below 1/m = {1 / m}")
    sub = K.restrict(x, xp)
    if not (sub.contains(x) and sub.contains(xp)):
        raise HypothesisFailure("membership", "x and x' must lie in K")
    if hasattr(f, "derivative"):
        for p in sub.points():
            d = _derivative(f, p, 1)
            if abs(d) > tol:
                raise HypothesisFailure("critical", f"f'({p}) = {d} is not zero")
    else:
        notes.append("no derivative available; flatness on K not checked")
    gaps = [Interval(c0.hi, c1.lo) for c0, c1 in zip(sub.components, sub.components[1:])]
    for g in gaps:
        ys = [f(t) for t in np.linspace(g.lo, g.hi, 65)]
        d = np.diff(ys)
        if not (np.all(d >= -tol) or np.all(d <= tol)):
            raise HypothesisFailure("monotone", f"f is not monotone on ({g.lo}, {g.hi})")
    alpha_in = 1 if n == 2 else 1.0 / (n - 1)
    inner = frac_variation(f, sub, VariationQuery(alpha=alpha_in)).value
    lhs = float(inner) ** ((n - 1) / n)
    gap_len = sum(g.length for g in gaps)
    c = EstimateConstants(k, n)
    rhs = c.C_kn * (xp - x) ** (1 / n) * gap_len ** ((n - 1) / n)
    return KeyEstimateReport(lhs, rhs, lhs <= rhs * (1 + 1e-12) + 1e-15, c, notes)


def estimate_lipschitz_k(f, x, lo, hi, n: int, samples: int = BKM_GRID) -> int:
    """Smallest integer ``k`` with ``|f^(n-1)(y)| <= k |y - x|`` on a sample grid of ``[lo, hi]``."""
    best = 0.0
    for y in np.linspace(lo, hi, samples):
        if y != x:
            best = max(best, abs(_derivative(f, float(y), n - 1)) / abs(y - x))
    return max(1, math.ceil(best * (1 + 1e-9)))


# -- heuristic witnesses --------------------------------------------------------

def heuristic_witness(f, n: int, k: int = 1, m: int = 1, points=None) -> DecompositionWitness:
    """Isolated points of ``K_f`` as singletons; for expressions, also the ``B^k_m`` grouping."""
    K = _kf(f)
    dom = K.domain
    sets = [ClosedSetDesc(dom, (c,)) for c in K.components]
    if isinstance(f, ExprFunction) and points is not None:
        B = build_Bkm(f, n, k, m, points).points
        if not B.is_empty:
            sets.append(B)
    return DecompositionWitness("cbvg", tuple(sets))


def difex_total_variation(n: int, M: int) -> float:
    """Reference value ``2 * sum_{m <= M/2} m**-n``."""
    return 2 * sum(m ** -n for m in range(1, M // 2 + 1))


__all__ = [
    "BudgetExhausted", "CBVGReport", "CollapseResult", "DecompositionWitness", "EstimateConstants",
    "HypothesisFailure", "KeyEstimateReport", "PointwiseLipschitzSet", "SBVGReport", "Trend",
    "WitnessError", "build_Bkm", "check_cbvg", "check_key_estimate", "check_sbvg",
    "collapse_sbvg_bar", "covers", "difex_sbvg_witness", "difex_total_variation",
    "estimate_lipschitz_k", "heuristic_witness", "make_difex", "difex_cbvg_witness",
    "trend_verdict", "validate_sbvg",
]
