import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from fracvar.reparam.bridge import (QuadratureError, adaptive_simpson, bump, bump_derivative, c_norm,
                                    make_bridge, w, w_derivative, w_inverse)
from fracvar.reparam.certify import Certifiable, certify_derivatives

# 1 / int_0^1 exp(-t^-2 - (1-t)^-2) dt, from mpmath tanh-sinh quadrature at 40 digits
C_NORM = 17263.52108228853


def _mp_bump(t):
    return mpmath.exp(-1 / t ** 2 - 1 / (1 - t) ** 2)


def test_c_norm_oracle_value():
    mpmath.mp.dps = 40
    ref = 1 / mpmath.quad(_mp_bump, [0, 0.25, 0.5, 0.75, 1])
    assert float(ref) == pytest.approx(C_NORM, rel=1e-14)


def test_c_norm_matches_oracle():
    assert c_norm() == pytest.approx(C_NORM, rel=1e-11)


def test_w_endpoints_and_midpoint():
    assert w(0.0) == 0.0 and w(1.0) == 1.0
    assert w(0.5) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("u", [0.1, 0.3, 0.45, 0.8])
def test_w_against_oracle(u):
    mpmath.mp.dps = 30
    ref = C_NORM * mpmath.quad(_mp_bump, [0, u])
    assert w(u) == pytest.approx(float(ref), abs=1e-11)


def test_w_monotone_and_symmetric():
    us = [k / 200 for k in range(201)]
    vals = [w(u) for u in us]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    for u in us:
        assert w(u) + w(1 - u) == pytest.approx(1.0, abs=1e-12)


def test_w_inverse_round_trip():
    # above about 0.85, w(u) rounds to 1.0 and the inverse loses the point
    for u in (0.05, 0.2, 0.5, 0.77):
        assert w_inverse(w(u)) == pytest.approx(u, abs=1e-10)


@pytest.mark.parametrize("j", range(6))
@pytest.mark.parametrize("u", [0.2, 0.5, 0.71])
def test_bump_derivatives_match_oracle(j, u):
    mpmath.mp.dps = 50
    ref = float(mpmath.diff(_mp_bump, mpmath.mpf(u), j))
    # odd orders vanish at the midpoint, so measure error against the natural scale
    scale = bump(u) * 100.0 ** j
    assert bump_derivative(u, j) == pytest.approx(ref, rel=1e-9, abs=1e-12 * scale)


def test_w_first_derivative_is_scaled_bump():
    for u in (0.1, 0.5, 0.9):
        assert w_derivative(u, 1) == pytest.approx(c_norm() * bump(u), rel=1e-14)


def test_derivatives_vanish_outside_open_interval():
    for j in range(5):
        assert bump_derivative(0.0, j) == 0.0 and bump_derivative(1.0, j) == 0.0
        assert abs(bump_derivative(1e-3, j)) < 1e-300


def test_adaptive_simpson_known_integral():
    assert adaptive_simpson(math.sin, 0.0, math.pi, 1e-12) == pytest.approx(2.0, abs=1e-11)


def test_adaptive_simpson_reports_failure():
    with pytest.raises(QuadratureError):
        adaptive_simpson(lambda x: 1.0 if x > 1 / 3 else 0.0, 0.0, 1.0, 1e-20)


def test_bridge_arguments():
    with pytest.raises(ValueError):
        make_bridge(1.0, 1.0, 0.0, 1.0, 2)
    with pytest.raises(ValueError):
        make_bridge(0.0, 1.0, 0.0, 1.0, 2, quad_tol=0.0)


bridges = st.tuples(st.floats(-5, 5), st.floats(0.1, 3), st.floats(-3, 3), st.floats(-3, 3), st.integers(1, 5))


@settings(max_examples=100, deadline=None)
@given(bridges)
def test_bridge_endpoints_and_middle(params):
    a, length, A, B, n = params
    br = make_bridge(a, a + length, A, B, n)
    assert br(a) == pytest.approx(A, abs=1e-10)
    assert br(a + length) == pytest.approx(B, abs=1e-10)
    assert br(a + length / 2) == pytest.approx((A + B) / 2, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(bridges)
def test_bridge_endpoint_derivatives_decay(params):
    a, length, A, B, n = params
    br = make_bridge(a, a + length, A, B, n)
    target = Certifiable(br, [br.alpha, br.beta], n, (br.alpha, br.beta))
    certs = certify_derivatives(target, [br.alpha, br.beta])
    assert [c.verdict for c in certs] == ["decaying", "decaying"]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_ratio_iii_scale_invariant(n):
    base = make_bridge(0.0, 1.0, 0.0, 1.0, n).ratio_iii()
    assert math.isfinite(base) and base > 0
    for s in (1e-2, 1e2):
        scaled = make_bridge(3.0, 3.0 + s, -1.0, -1.0 + 7 * s, n).ratio_iii()
        assert scaled == pytest.approx(base, rel=1e-6)


def test_bridge_inverse():
    br = make_bridge(2.0, 5.0, 1.0, -4.0, 3)
    # near the ends H is flat to double precision, so only the middle is invertible
    for x in (2.8, 3.5, 4.2):
        assert br.inverse(br(x)) == pytest.approx(x, abs=1e-9)
