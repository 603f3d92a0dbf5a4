"""Monotone C-infinity connectors built from the normalized integral of a flat bump.

``w(u) = c * int_0^u exp(-t**-2 - (1-t)**-2) dt`` with ``w(1) = 1``.  Values of
``w`` come from adaptive Simpson quadrature over a cached cumulative grid;
derivatives of every order ``>= 1`` are closed-form: the ``j``-th derivative of
the bump is ``bump * R_j`` where ``R_j`` is a finite sum of terms
``u**-p * (1-u)**-q`` obtained from ``R_{j+1} = R_j' + R_j * (2u**-3 - 2(1-u)**-3)``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from functools import lru_cache

QUAD_TOL = 1e-12
GRID_CELLS = 512
MAX_DEPTH = 48


class QuadratureError(RuntimeError):
    pass


def bump(u: float) -> float:
    if u <= 0.0 or u >= 1.0:
        return 0.0
    return math.exp(-1.0 / (u * u) - 1.0 / ((1.0 - u) * (1.0 - u)))


def log_bump(u: float) -> float:
    return -1.0 / (u * u) - 1.0 / ((1.0 - u) * (1.0 - u))


# -- quadrature -----------------------------------------------------------------

def _simpson(fn, a, fa, b, fb):
    m = 0.5 * (a + b)
    fm = fn(m)
    return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(fn, a: float, b: float, tol: float) -> float:
    """Integral of ``fn`` over ``[a, b]`` to absolute tolerance ``tol``."""
    if b <= a:
        return 0.0
    fa, fb = fn(a), fn(b)
    m, fm, whole = _simpson(fn, a, fa, b, fb)
    total = 0.0
    # explicit stack keeps deep refinements off the Python recursion limit
    stack = [(a, fa, b, fb, m, fm, whole, tol, 0)]
    while stack:
        a, fa, b, fb, m, fm, whole, eps, depth = stack.pop()
        lm, flm, left = _simpson(fn, a, fa, m, fm)
        rm, frm, right = _simpson(fn, m, fm, b, fb)
        delta = left + right - whole
        if abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
        elif depth >= MAX_DEPTH:
            raise QuadratureError(f"adaptive Simpson did not reach {tol:g} on [{a}, {b}]")
        else:
            stack.append((a, fa, m, fm, lm, flm, left, eps / 2.0, depth + 1))
            stack.append((m, fm, b, fb, rm, frm, right, eps / 2.0, depth + 1))
    return total


@lru_cache(maxsize=None)
def _cumulative(tol: float) -> tuple:
    """Nodes on ``[0, 1/2]`` and the unnormalized integral of the bump at each."""
    nodes = [0.5 * k / GRID_CELLS for k in range(GRID_CELLS + 1)]
    cum = [0.0]
    # the bump integrates to about 1e-4, so scale the absolute tolerance accordingly
    cell_tol = tol * 1e-4 / GRID_CELLS
    for u0, u1 in zip(nodes, nodes[1:]):
        cum.append(cum[-1] + adaptive_simpson(bump, u0, u1, cell_tol))
    return tuple(nodes), tuple(cum)


@lru_cache(maxsize=None)
def c_norm(tol: float = QUAD_TOL) -> float:
    """Normalization with ``w(1) = 1``: the bump is symmetric, so ``1 / (2 int_0^{1/2})``."""
    return 0.5 / _cumulative(tol)[1][-1]


def w(u: float, tol: float = QUAD_TOL) -> float:
    if u <= 0.0:
        return 0.0
    if u >= 1.0:
        return 1.0
    if u > 0.5:
        return 1.0 - w(1.0 - u, tol)
    nodes, cum = _cumulative(tol)
    k = min(int(u * 2 * GRID_CELLS), GRID_CELLS - 1)
    part = adaptive_simpson(bump, nodes[k], u, tol * 1e-4 / GRID_CELLS)
    return c_norm(tol) * (cum[k] + part)


def w_inverse(y: float, tol: float = QUAD_TOL) -> float:
    """Bisection inverse of ``w`` on ``[0, 1]``."""
    if y <= 0.0:
        return 0.0
    if y >= 1.0:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if w(mid, tol) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# -- exact derivatives ----------------------------------------------------------

@lru_cache(maxsize=None)
def bump_factor(j: int) -> tuple:
    """``R_j`` as sorted ``((p, q), coeff)`` pairs for ``bump^(j) = bump * R_j``."""
    if j < 0:
        raise ValueError("order must be non-negative")
    R = {(0, 0): 1.0}
    for _ in range(j):
        nxt: dict = {}
        for (p, q), c in R.items():
            # derivative of u^-p (1-u)^-q
            if p:
                nxt[(p + 1, q)] = nxt.get((p + 1, q), 0.0) - p * c
            if q:
                nxt[(p, q + 1)] = nxt.get((p, q + 1), 0.0) + q * c
            # times the derivative of the exponent
            nxt[(p + 3, q)] = nxt.get((p + 3, q), 0.0) + 2.0 * c
            nxt[(p, q + 3)] = nxt.get((p, q + 3), 0.0) - 2.0 * c
        R = {k: v for k, v in nxt.items() if v != 0.0}
    return tuple(sorted(R.items()))


def bump_derivative(u: float, j: int) -> float:
    if u <= 0.0 or u >= 1.0:
        return 0.0
    base = log_bump(u)
    lu, lv = math.log(u), math.log1p(-u)
    total = 0.0
    for (p, q), c in bump_factor(j):
        total += c * math.exp(base - p * lu - q * lv)
    return total


def w_derivative(u: float, i: int, tol: float = QUAD_TOL) -> float:
    """``w^(i)(u)``; ``i = 0`` is ``w`` itself."""
    if i == 0:
        return w(u, tol)
    return c_norm(tol) * bump_derivative(u, i - 1)


# -- bridges --------------------------------------------------------------------

@dataclass(frozen=True)
class SmoothBridge:
    """``H(x) = A + (B - A) w((x - alpha) / (beta - alpha))`` on ``[alpha, beta]``."""

    alpha: float
    beta: float
    A_val: float
    B_val: float
    n: int
    c_norm: float
    quad_tol: float = QUAD_TOL

    @property
    def length(self) -> float:
        return self.beta - self.alpha

    def _u(self, x) -> float:
        return (x - self.alpha) / (self.beta - self.alpha)

    def __call__(self, x) -> float:
        if x <= self.alpha:
            return self.A_val
        if x >= self.beta:
            return self.B_val
        u = self._u(x)
        # anchor at the nearer end so values flatten onto A and B without rounding
        if u <= 0.5:
            return self.A_val + (self.B_val - self.A_val) * w(u, self.quad_tol)
        return self.B_val - (self.B_val - self.A_val) * w((self.beta - x) / self.length, self.quad_tol)

    def derivative(self, x, i: int) -> float:
        if i == 0:
            return self(x)
        return (self.B_val - self.A_val) * w_derivative(self._u(x), i, self.quad_tol) / self.length ** i

    def log_abs_derivative(self, x) -> float:
        """``log |H'(x)|`` without underflow; ``-inf`` at the ends or for a flat bridge."""
        u = self._u(x)
        if not 0.0 < u < 1.0 or self.B_val == self.A_val:
            return -math.inf
        return (math.log(abs(self.B_val - self.A_val)) - math.log(self.length)
                + math.log(self.c_norm) + log_bump(u))

    def inverse(self, y) -> float:
        if self.B_val == self.A_val:
            raise ValueError("constant bridge has no inverse")
        span = self.B_val - self.A_val
        if abs(y - self.A_val) <= abs(self.B_val - y):
            return self.alpha + self.length * w_inverse((y - self.A_val) / span, self.quad_tol)
        return self.beta - self.length * w_inverse((self.B_val - y) / span, self.quad_tol)

    def ratio_iii(self, samples: int = 1000) -> float:
        """Max of ``|H^(n-1)(t)| (beta-alpha)^n / (|B-A| min(t-alpha, beta-t))`` on a grid."""
        best = 0.0
        for k in range(1, samples):
            u = k / samples
            x = self.alpha + u * self.length
            d = min(x - self.alpha, self.beta - x)
            if self.n - 1 == 0:
                val = abs(self(x) - self.A_val)
            else:
                val = abs(self.derivative(x, self.n - 1))
            diff = abs(self.B_val - self.A_val)
            if diff:
                best = max(best, val * self.length ** self.n / (diff * d))
        return best

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "A": self.A_val, "B": self.B_val, "n": self.n}


def make_bridge(alpha, beta, A_val, B_val, n: int, quad_tol: float = QUAD_TOL) -> SmoothBridge:
    if not alpha < beta:
        raise ValueError(f"need alpha < beta, got {alpha}, {beta}")
    if not quad_tol > 0:
        raise ValueError("quad_tol must be positive")
    return SmoothBridge(float(alpha), float(beta), float(A_val), float(B_val), n, c_norm(quad_tol), quad_tol)
