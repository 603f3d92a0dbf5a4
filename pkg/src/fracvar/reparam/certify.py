"""Divided-difference certificates standing in for "the i-th derivative vanishes here"."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Optional, Sequence

from ..funcmodel.detect import detect_K

CERT_TOL = 1e-4
WINDOW_STEPS = 4
FLOOR_RATIO = 1e-3
GROWTH_NEIGHBOURS = 16


class CertificateInputError(ValueError):
    pass


@dataclass
class DerivativeCertificate:
    point: float
    orders: list
    windows: list
    estimates: list          # estimates[i-1][j]: order i, window j
    verdict: str
    eps: list = field(default_factory=list)   # per-window epsilon of |g(y)-g(z)| <= eps |y-z|^(n-1) |x-z|

    def to_json(self) -> dict:
        return {"point": self.point, "orders": self.orders, "windows": self.windows,
                "estimates": self.estimates, "verdict": self.verdict, "eps": self.eps}


@dataclass
class Certifiable:
    """What certification needs: values, a cancellation-free increment, the set ``K_g``."""

    fn: Callable
    points: list
    n: int
    domain: tuple
    increment: Optional[Callable] = None    # (t, index of K point) -> fn(t) - fn(K[index])

    def diff(self, t, p: int) -> float:
        if self.increment is not None:
            return self.increment(t, p)
        return self.fn(t) - self.fn(self.points[p])


def from_reparametrization(r) -> Certifiable:
    return Certifiable(r.g, list(r.tK), r.n, r.domain, r.g_increment)


def from_function(f, n: int) -> Certifiable:
    """Wrap an un-reparametrized function; its own ``K_f`` plays the role of ``K_g``."""
    K, _ = detect_K(f).with_endpoints()
    dom = f.domain
    return Certifiable(lambda t: float(f(t)), [float(x) for x in K.points()], n, (dom.lo, dom.hi))


def default_windows(c: Certifiable, p: int) -> list:
    pts = c.points
    gaps = [pts[i + 1] - pts[i] for i in range(len(pts) - 1)]
    local = [gaps[i] for i in (p - 1, p) if 0 <= i < len(gaps)]
    base = min(local) / (8 * c.n)
    floor = min(gaps) * FLOOR_RATIO
    return [max(base * 2.0 ** -j, floor) for j in range(WINDOW_STEPS)]


def _estimate(c: Certifiable, p: int, i: int, s: float) -> float:
    x = c.points[p]
    a, b = c.domain
    best = 0.0
    if x + i * s <= b:
        fwd = sum((-1) ** (i - k) * comb(i, k) * c.diff(x + k * s, p) for k in range(1, i + 1))
        best = max(best, abs(fwd) / s ** i)
    if x - i * s >= a:
        bwd = sum((-1) ** k * comb(i, k) * c.diff(x - k * s, p) for k in range(1, i + 1))
        best = max(best, abs(bwd) / s ** i)
    return best


def _growth_eps(c: Certifiable, p: int, radii: Sequence[float]) -> list:
    pts = c.points
    x = pts[p]
    n = c.n
    lo, hi = max(0, p - GROWTH_NEIGHBOURS), min(len(pts), p + GROWTH_NEIGHBOURS + 1)
    vals = {q: c.fn(pts[q]) for q in range(lo, hi)}
    out = []
    for rho in radii:
        eps = 0.0
        right = [q for q in range(p, hi) if pts[q] - x < rho]
        left = [q for q in range(lo, p + 1) if x - pts[q] < rho]
        for side in (right, left):
            for qy in side:
                for qz in side:
                    y, z = pts[qy], pts[qz]
                    if abs(z - x) <= abs(y - x) or z == x:
                        continue
                    eps = max(eps, abs(vals[qy] - vals[qz]) / (abs(y - z) ** (n - 1) * abs(x - z)))
        out.append(eps)
    return out


def certify_derivatives(target, points: Sequence[float], windows: Optional[Sequence[float]] = None,
                        tol: float = CERT_TOL) -> list:
    """Certificates at each point of ``K_g``; ``target`` is a Reparametrization or a Certifiable."""
    c = target if isinstance(target, Certifiable) else from_reparametrization(target)
    span = c.domain[1] - c.domain[0]
    certs = []
    for x in points:
        p = bisect.bisect_left(c.points, x)
        if p >= len(c.points) or abs(c.points[p] - x) > 1e-12 * max(1.0, abs(x)):
            raise CertificateInputError(f"{x} is not a point of K_g")
        ws = list(windows) if windows is not None else default_windows(c, p)
        if any(w1 >= w0 for w0, w1 in zip(ws, ws[1:])):
            raise CertificateInputError("windows must be strictly decreasing")
        est = [[_estimate(c, p, i, s) for s in ws] for i in range(1, c.n + 1)]
        ok = all(row[-1] <= tol and all(e1 <= e0 for e0, e1 in zip(row, row[1:])) for row in est)
        eps = _growth_eps(c, p, [span / 4 * 2.0 ** -j for j in range(WINDOW_STEPS)])
        certs.append(DerivativeCertificate(float(c.points[p]), list(range(1, c.n + 1)), ws, est,
                                           "decaying" if ok else "violated", eps))
    return certs


def all_decaying(certs: Sequence[DerivativeCertificate]) -> bool:
    return all(c.verdict == "decaying" for c in certs)
