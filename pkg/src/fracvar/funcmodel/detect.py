"""Detection of the set of points of varying monotonicity."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .expr import ExprEvalError, ExprFunction
from .pl import PLFunction, SeqPLFunction
from .sets import ClosedSetDesc

EXPR_GRID = 4096
EXPR_ROOT_WIDTH = 1e-10


def _sign(v) -> int:
    return (v > 0) - (v < 0)


@dataclass(frozen=True)
class KReport:
    """Result of :func:`detect_K` with provenance flags."""

    K: ClosedSetDesc
    conventional: tuple = ()   # endpoints included only by convention
    approximate: bool = False
    warning: str = ""
    notes: list = field(default_factory=list)


def _pl_K(f: PLFunction) -> tuple[list, tuple]:
    bp = f.breakpoints
    sl = [_sign(s) for s in f.slopes()]
    pts = [bp[0]]
    for i in range(1, len(bp) - 1):
        if not (sl[i - 1] == sl[i]):
            pts.append(bp[i])
    pts.append(bp[-1])
    # the first and last pieces are constant or strictly monotone, so the
    # endpoints are in K_f only by convention
    return pts, (bp[0], bp[-1])


def detect_K_report(f) -> KReport:
    if isinstance(f, SeqPLFunction):
        seq = f.sequence_points()
        pts = set(seq) | {f.anchor, f.upper}
        K = ClosedSetDesc.from_points(f.domain, pts, accumulation=(f.anchor,))
        return KReport(K, notes=[f"truncated at M={f.M}; anchor {f.anchor} is an accumulation point"])
    if isinstance(f, PLFunction):
        pts, conv = _pl_K(f)
        return KReport(ClosedSetDesc.from_points(f.domain, pts), conventional=conv)
    if isinstance(f, ExprFunction):
        return _expr_K(f)
    raise TypeError(f"unsupported function model {type(f).__name__}")


def detect_K(f) -> ClosedSetDesc:
    return detect_K_report(f).K


def _expr_K(f: ExprFunction, cells: int = EXPR_GRID) -> KReport:
    a, b = f.domain.lo, f.domain.hi
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValueError("K_f detection needs a bounded domain")
    xs = np.linspace(a, b, cells + 1)
    try:
        d = np.array([f.derivative(float(x), 1) for x in xs])
    except ExprEvalError as exc:
        raise ExprEvalError(f"derivative undefined on the detection grid: {exc}") from exc
    signs = np.sign(d)
    roots = []
    warn = []
    last_nonzero = None
    for i, s in enumerate(signs):
        if s == 0:
            continue
        if last_nonzero is not None and signs[last_nonzero] != s:
            lo, hi = float(xs[last_nonzero]), float(xs[i])
            if i - last_nonzero > 1:
                warn.append(f"f' vanishes on grid nodes in [{lo}, {hi}]")
            roots.append(_bisect_sign_change(f, lo, hi))
        last_nonzero = i
    if last_nonzero is None:
        warn.append("f' vanishes at every grid node; f treated as constant")
    # two changes in neighbouring cells cannot be certified as isolated
    for r0, r1 in zip(roots, roots[1:]):
        if r1 - r0 < 2 * (b - a) / cells:
            warn.append(f"sign changes near {r0} and {r1} are not certified isolated")
    pts = sorted({a, b, *roots})
    K = ClosedSetDesc.from_points(f.domain, pts)
    return KReport(K, conventional=(a, b), approximate=True, warning="; ".join(warn))


def _bisect_sign_change(f: ExprFunction, lo: float, hi: float) -> float:
    slo = _sign(f.derivative(lo, 1))
    while hi - lo > EXPR_ROOT_WIDTH:
        mid = 0.5 * (lo + hi)
        sm = _sign(f.derivative(mid, 1))
        if sm == 0:
            return mid
        if sm == slo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
