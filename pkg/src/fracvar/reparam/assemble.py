"""Assembly of the homeomorphism ``h`` and the reparametrized function ``g = f o h``.

With ``K`` finite every variation function is piecewise linear with
breakpoints in ``K``, so the weighted sum ``v_total`` is itself piecewise
linear and strictly increasing (its slope is at least one).  The new
coordinates are ``t = eta^-1(v_total(x))`` on ``K``; each contiguous interval of
``K`` becomes a smooth bridge between the neighbouring values of ``f``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..classify import DecompositionWitness, WitnessError, covers, validate_sbvg
from ..funcmodel.detect import detect_K
from ..funcmodel.pl import PLFunction
from ..funcmodel.sets import ClosedSetDesc
from ..variation import GVContext, as_pl
from .bridge import QUAD_TOL, SmoothBridge, make_bridge
from .vfunc import ReparamInputError, VariationFunction, build_v


class WitnessRejected(ValueError):
    pass


class WeightScheduleError(ValueError):
    pass


@dataclass
class Reparametrization:
    source: object
    n: int
    K: ClosedSetDesc
    xs: tuple                 # points of K
    V: tuple                  # v_total on xs
    bridges: tuple            # bridges of F, in v-coordinates
    weights: tuple
    vfuncs: tuple             # (v_m, v~_m) pairs
    path: str
    quad_tol: float = QUAD_TOL
    tK: tuple = field(init=False)
    _tb: tuple = field(init=False, repr=False)
    _fx: tuple = field(init=False, repr=False)

    def __post_init__(self):
        a, b = self.xs[0], self.xs[-1]
        c, d = self.V[0], self.V[-1]
        tk = [a + (v - c) * (b - a) / (d - c) for v in self.V]
        tk[0], tk[-1] = a, b
        if any(t1 <= t0 for t0, t1 in zip(tk, tk[1:])):
            raise ReparamInputError("v_total collapses two points of K in floating point")
        self.tK = tuple(tk)
        self._fx = tuple(float(self.source(x)) for x in self.xs)
        self._tb = tuple(make_bridge(t0, t1, f0, f1, self.n, self.quad_tol)
                         for t0, t1, f0, f1 in zip(tk, tk[1:], self._fx, self._fx[1:]))

    # -- coordinates ----------------------------------------------------------
    @property
    def domain(self) -> tuple:
        return self.xs[0], self.xs[-1]

    @property
    def eta(self) -> tuple:
        """``(c, d)``: ``eta`` maps ``[a, b]`` increasingly and affinely onto ``[c, d]``."""
        return self.V[0], self.V[-1]

    @property
    def v_total(self) -> PLFunction:
        return PLFunction(self.xs, self.V)

    @property
    def K_g(self) -> list:
        return list(self.tK)

    @staticmethod
    def _locate(pts, t):
        """``(i, on_point)``: ``t == pts[i]``, or ``t`` lies in ``(pts[i], pts[i+1])``."""
        if not pts[0] <= t <= pts[-1]:
            raise ValueError(f"{t} outside [{pts[0]}, {pts[-1]}]")
        i = bisect.bisect_right(pts, t) - 1
        return i, pts[i] == t

    def gap_is_constant(self, p: int) -> bool:
        return self._fx[p] == self._fx[p + 1]

    # -- evaluators -----------------------------------------------------------
    def g(self, t) -> float:
        p, on_k = self._locate(self.tK, t)
        return self._fx[p] if on_k else self._tb[p](t)

    def g_increment(self, t, p: int) -> float:
        """``g(t) - g(tK[p])``, free of cancellation for ``t`` in a gap next to ``tK[p]``."""
        q, on_k = self._locate(self.tK, t)
        if on_k:
            return self._fx[q] - self._fx[p]
        br = self._tb[q]
        if q == p:
            return (br.B_val - br.A_val) * _w(br, t)
        if q == p - 1:
            return -(br.B_val - br.A_val) * (1.0 - _w(br, t))
        return self.g(t) - self._fx[p]

    def g_derivative(self, t, i: int) -> float:
        if i == 0:
            return self.g(t)
        p, on_k = self._locate(self.tK, t)
        return 0.0 if on_k else self._tb[p].derivative(t, i)

    def h(self, t) -> float:
        p, on_k = self._locate(self.tK, t)
        if on_k:
            return self.xs[p]
        x0, x1 = self.xs[p], self.xs[p + 1]
        if self.gap_is_constant(p):
            t0, t1 = self.tK[p], self.tK[p + 1]
            return x0 + (x1 - x0) * (t - t0) / (t1 - t0)
        return float(self._pl.inverse_on(x0, x1, self._tb[p](t)))

    def h_inv(self, x) -> float:
        p, on_k = self._locate(self.xs, x)
        if on_k:
            return self.tK[p]
        t0, t1 = self.tK[p], self.tK[p + 1]
        if self.gap_is_constant(p):
            x0, x1 = self.xs[p], self.xs[p + 1]
            return t0 + (t1 - t0) * (x - x0) / (x1 - x0)
        return self._tb[p].inverse(float(self.source(x)))

    def log_h_prime(self, t) -> float:
        """``log h'(t)``; finite exactly where ``h' != 0``, ``-inf`` on ``K_g``."""
        p, on_k = self._locate(self.tK, t)
        if on_k:
            return -math.inf
        t0, t1 = self.tK[p], self.tK[p + 1]
        x0, x1 = self.xs[p], self.xs[p + 1]
        if self.gap_is_constant(p):
            return math.log((x1 - x0) / (t1 - t0))
        slope = _slope_within(self._pl, self.h(t), x0, x1)
        return self._tb[p].log_abs_derivative(t) - math.log(abs(slope))

    @property
    def _pl(self) -> PLFunction:
        return as_pl(self.source)

    # -- output ---------------------------------------------------------------
    def to_json(self) -> dict:
        c, d = self.eta
        return {
            "n": self.n, "path": self.path,
            "domain": [float(self.xs[0]), float(self.xs[-1])],
            "eta": {"c": float(c), "d": float(d)},
            "weights": [float(w) for w in self.weights],
            "v_table": [[float(x), float(v)] for x, v in zip(self.xs, self.V)],
            "K_g": [float(t) for t in self.tK],
            "bridges": [b.to_json() for b in self.bridges],
        }

    def samples(self, count: int = 2049) -> list:
        a, b = self.domain
        ts = np.linspace(a, b, count)
        return [(float(t), self.h(float(t)), self.g(float(t))) for t in ts]


def _w(br: SmoothBridge, t) -> float:
    from .bridge import w
    return w((t - br.alpha) / br.length, br.quad_tol)


def _slope_within(pl: PLFunction, x, lo, hi) -> float:
    """Slope of the piece of ``pl`` through ``x`` that overlaps ``(lo, hi)``."""
    bp = pl.breakpoints
    x = min(max(x, lo), hi)
    i = bisect.bisect_right(bp, x) - 1
    if i >= len(bp) - 1 or bp[i] >= hi:
        i = bisect.bisect_left(bp, hi) - 1
    return pl.slopes()[i]


# -- construction ---------------------------------------------------------------

def _prepare_K(f, K: Optional[ClosedSetDesc]) -> ClosedSetDesc:
    if as_pl(f) is None:
        raise ReparamInputError("assembly needs a piecewise-linear or sequence-defined function")
    K = K if K is not None else detect_K(f)
    K2, _ = K.with_endpoints()
    if not K2.is_finite:
        raise ReparamInputError("K must be a finite point set (a truncation or a set of endpoints)")
    if len(K2.points()) < 2:
        raise ReparamInputError("K must contain both ends of a non-degenerate domain")
    return K2


def _check_witness(w: DecompositionWitness, K: ClosedSetDesc):
    try:
        if w.kind == "sbvg":
            validate_sbvg(w, K)
        elif w.kind == "cbvg":
            for i, A in enumerate(w.sets, start=1):
                if not A.issubset(K):
                    raise WitnessError(f"witness set {i} is not contained in K")
        else:
            raise WitnessError("collapse an sbvg-bar witness before assembly")
    except WitnessError as exc:
        raise WitnessRejected(str(exc)) from exc
    if not covers(K, list(w.sets)):
        raise WitnessRejected("witness sets do not cover K")


def sbvg_subsequence(values: Sequence[float], limit: Optional[int] = None) -> list:
    """Indices ``m_1 < m_2 < ...`` with ``values[m_j] <= j**-3``, so ``sum j * value`` converges."""
    picks = []
    start = 0
    j = 1
    while limit is None or len(picks) < limit:
        found = None
        for m in range(start, len(values)):
            if values[m] <= j ** -3:
                found = m
                break
        if found is None:
            break
        picks.append(found)
        start = found + 1
        j += 1
    return picks


def assemble(f, witness: DecompositionWitness, n: int, weights: Optional[Sequence[float]] = None,
             K: Optional[ClosedSetDesc] = None, P: Optional[int] = None,
             quad_tol: float = QUAD_TOL) -> Reparametrization:
    """Build ``h`` and ``g = f o h`` from a verified decomposition witness.

    ``P`` truncates the witness to its first ``P`` sets (all by default).
    """
    K = _prepare_K(f, K)
    _check_witness(witness, K)
    a, b = K.domain.lo, K.domain.hi
    ctx = GVContext(f, K, n)
    sets = list(witness.sets)
    if witness.kind == "cbvg":
        sets = sets[:P] if P else sets
        path = "cbvg"
        deltas = [b - a] * len(sets)
        if weights is None:
            weights = []
            for m, A in enumerate(sets, start=1):
                gv = ctx.value(A.add_points([a, b]), "full")
                weights.append(2.0 ** -m / (1.0 + float(gv)))
        chosen = sets
    else:
        path = "sbvg"
        bars = [float(ctx.value(A, "bar", d)) for A, d in zip(sets, witness.deltas)]
        idx = sbvg_subsequence(bars, P)
        if not idx:
            raise WeightScheduleError("no witness index reaches the summability threshold")
        chosen = [sets[m] for m in idx]
        deltas = [witness.deltas[m] for m in idx]
        if weights is None:
            weights = [float(j) for j in range(1, len(idx) + 1)]
    if len(weights) != len(chosen):
        raise WeightScheduleError("one weight per witness set required")
    if any(not wt > 0 for wt in weights):
        raise WeightScheduleError("weights must be positive")
    vf = []
    xs = ctx.cand.x
    total = [float(x) for x in xs]
    for A, d, wt in zip(chosen, deltas, weights):
        v = build_v(f, A, K, d, n, "right", ctx)
        vt = build_v(f, A, K, d, n, "left", ctx)
        vf.append((v, vt))
        for i in range(len(xs)):
            total[i] += wt * (v.values[i] - vt.values[i])
    bridges = tuple(make_bridge(v0, v1, float(f(x0)), float(f(x1)), n, quad_tol)
                    for v0, v1, x0, x1 in zip(total, total[1:], xs, xs[1:]))
    return Reparametrization(f, n, K, tuple(xs), tuple(total), bridges, tuple(weights), tuple(vf),
                             path, quad_tol)


@dataclass
class HomeomorphismReport:
    increasing: bool
    round_trip: float
    min_log_h_prime: float
    ok: bool


def verify_homeomorphism(r: Reparametrization, grid: int = 1000, tol: float = 1e-9) -> HomeomorphismReport:
    """Strict monotonicity of ``v_total``, ``h(h^-1(x)) = x`` on a grid, ``h' != 0`` off ``K_g``."""
    inc = all(v1 > v0 for v0, v1 in zip(r.V, r.V[1:]))
    a, b = r.domain
    err = max(abs(r.h(r.h_inv(float(x))) - x) for x in np.linspace(a, b, grid))
    kg = set(r.tK)
    logs = [r.log_h_prime(float(t)) for t in np.linspace(a, b, grid + 1) if float(t) not in kg]
    lo = min(logs) if logs else math.inf
    return HomeomorphismReport(inc, err, lo, inc and err <= tol and math.isfinite(lo))


def key_estimate_instances(r: Reparametrization, limit: int = 50) -> list:
    """Key-estimate reports on consecutive ``K_g`` pairs with the exact derivatives of ``g``."""
    from ..classify import check_key_estimate, estimate_lipschitz_k

    class _G:
        def __call__(self, t):
            return r.g(t)

        def derivative(self, t, i):
            return r.g_derivative(t, i)

    g = _G()
    Kg = ClosedSetDesc.from_points(r.K.domain, r.tK)
    out = []
    step = max(1, (len(r.tK) - 1) // limit)
    for p in range(0, len(r.tK) - 1, step):
        x, xp = r.tK[p], r.tK[min(p + 2, len(r.tK) - 1)]
        A = ClosedSetDesc.from_points(Kg.domain, [x])
        k = estimate_lipschitz_k(g, x, x, xp, r.n)
        out.append(check_key_estimate(g, Kg, A, x, xp, r.n, k))
    return out
