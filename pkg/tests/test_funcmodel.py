import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracvar.classify import make_difex
from fracvar.funcmodel import (ClosedSetDesc, ExprEvalError, ExprSyntaxError, Interval, PLFunction,
                               cantor_prefix, contiguous_intervals, derived_set, detect_K,
                               detect_K_report, hat, parse, parse_expression, taylor_eval, to_source)

UNIT = Interval(0.0, 1.0)


# -- expressions ----------------------------------------------------------------

def test_identity_expression():
    assert parse_expression("x")(0.5) == 0.5


def test_exp_composition():
    assert parse_expression("exp(-1/(x*x))")(1.0) == pytest.approx(math.exp(-1), abs=1e-15)


def test_syntax_error_offset():
    with pytest.raises(ExprSyntaxError) as exc:
        parse("x^^2")
    assert exc.value.pos == 2


@pytest.mark.parametrize("src", ["foo(x)", "sin(x, x)", "y + 1", "(x + 1"])
def test_rejects_unknown_or_malformed(src):
    with pytest.raises(ExprSyntaxError):
        parse(src)


@pytest.mark.parametrize("src", ["x", "-x^3 + 2*x", "exp(sin(x))/(1+x*x)", "2^x - cos(3*x)"])
def test_canonical_printer_round_trip(src):
    ast = parse(src)
    assert parse(to_source(ast)) == ast


def test_taylor_cubic():
    assert taylor_eval(parse_expression("x*x*x"), 2.0, 3) == pytest.approx([8, 12, 12, 6], abs=1e-12)


def test_taylor_exp_fixed_point():
    assert taylor_eval(parse_expression("exp(x)"), 0.0, 4) == pytest.approx([1] * 5, abs=1e-14)


def _richardson(fn, x, k, h=0.05, levels=5):
    """Central k-th difference with repeated Richardson extrapolation in h."""
    def central(h):
        return sum((-1) ** j * math.comb(k, j) * fn(x + (k / 2 - j) * h) for j in range(k + 1)) / h ** k

    table = [central(h / 2 ** i) for i in range(levels)]
    for lvl in range(1, levels):
        table = [(4 ** lvl * b - a) / (4 ** lvl - 1) for a, b in zip(table, table[1:])]
    return table[0]


def test_taylor_sin_square_against_finite_differences():
    f = parse_expression("sin(x*x)")
    got = taylor_eval(f, 0.7, 3)
    for k in range(1, 4):
        assert got[k] == pytest.approx(_richardson(f, 0.7, k), rel=1e-6)


def test_pole_raises():
    with pytest.raises(ExprEvalError):
        taylor_eval(parse_expression("1/x"), 0.0, 2)


def _random_source(rng, depth):
    """Source text for this package's grammar and for mpmath, drawn together."""
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.5:
            return "x", "x"
        c = f"{rng.uniform(0.2, 2.0):.3f}"
        return c, f"mpf('{c}')"
    r = rng.random()
    if r < 0.35:
        fn = ["exp", "sin", "cos"][rng.integers(3)]
        a, b = _random_source(rng, depth - 1)
        if fn == "exp":     # keep magnitudes moderate
            return f"exp(sin({a}))", f"exp(sin({b}))"
        return f"{fn}({a})", f"{fn}({b})"
    op = ["+", "-", "*", "/"][rng.integers(4)]
    la, lb = _random_source(rng, depth - 1)
    ra, rb = _random_source(rng, depth - 1)
    if op == "/":       # denominator bounded away from zero
        return f"({la})/(2+cos({ra}))", f"({lb})/(2+cos({rb}))"
    return f"({la}){op}({ra})", f"({lb}){op}({rb})"


def test_taylor_matches_high_precision_differences_on_random_corpus():
    rng = np.random.default_rng(7)
    mpmath.mp.dps = 40
    env = {"exp": mpmath.exp, "sin": mpmath.sin, "cos": mpmath.cos, "mpf": mpmath.mpf}
    for _ in range(50):
        ours, theirs = _random_source(rng, 5)
        f = parse_expression(ours)
        g = eval(f"lambda x: {theirs}", env)  # noqa: S307 -- test-generated source only
        x = float(rng.uniform(-1, 1))
        got = taylor_eval(f, x, 5)
        for k in range(6):
            ref = float(mpmath.diff(g, mpmath.mpf(x), k))
            assert abs(got[k] - ref) <= 1e-6 * max(1.0, abs(ref)), (ours, x, k)


# -- detection of K_f -----------------------------------------------------------

def test_monotone_function_has_endpoints_only():
    rep = detect_K_report(PLFunction((0, 1), (0, 1)))
    assert rep.K.points() == [0, 1]
    assert set(rep.conventional) == {0, 1}


def test_hat():
    assert detect_K(hat()).points() == [0.0, 0.5, 1.0]


def test_difex_truncation():
    f = make_difex(3, 6)
    K = detect_K(f)
    assert K.points() == sorted({0.0, 1.0} | {1 / m for m in range(1, 7)})
    assert derived_set(K).points() == [0.0]


def _slope_rule(s0, s1) -> bool:
    both_pos = s0 > 0 and s1 > 0
    both_neg = s0 < 0 and s1 < 0
    both_zero = s0 == 0 and s1 == 0
    return not (both_pos or both_neg or both_zero)


pl_functions = st.integers(2, 9).flatmap(lambda k: st.tuples(
    st.lists(st.integers(1, 99), min_size=k - 2, max_size=k - 2, unique=True),
    st.lists(st.integers(-4, 4), min_size=k, max_size=k),
)).map(lambda t: PLFunction(tuple(Fraction(x, 100) for x in [0] + sorted(t[0]) + [100]),
                            tuple(Fraction(v) for v in t[1])))


@given(pl_functions)
def test_detect_K_follows_slope_sign_rule(f):
    K = set(detect_K(f).points())
    bp = f.breakpoints
    assert {bp[0], bp[-1]} <= K <= set(bp)
    s = f.slopes()
    for i in range(1, len(bp) - 1):
        assert (bp[i] in K) == _slope_rule(s[i - 1], s[i])


@given(pl_functions, st.fractions(Fraction(1, 10), 10), st.fractions(-5, 5))
def test_detect_K_affine_invariance(f, scale, shift):
    g = f.compose_affine(scale, shift)
    assert detect_K(g).points() == [(x - shift) / scale for x in detect_K(f).points()]


# -- sets ----------------------------------------------------------------------

def test_derived_set_of_points():
    K = ClosedSetDesc.from_points(UNIT, [0.0, 0.5, 1.0])
    assert derived_set(K).is_empty
    flagged = ClosedSetDesc.from_points(UNIT, [0.0, 0.5, 1.0], accumulation=(0.0,))
    assert derived_set(flagged).points() == [0.0]


def test_derived_set_keeps_intervals():
    K = ClosedSetDesc.from_intervals(UNIT, [(0.0, 0.3), (0.7, 0.7)])
    assert derived_set(K).components == (Interval(0.0, 0.3),)


def test_contiguous_intervals_basic():
    K = ClosedSetDesc.from_points(UNIT, [0.0, 0.5, 1.0])
    assert contiguous_intervals(K) == [Interval(0.0, 0.5), Interval(0.5, 1.0)]
    assert contiguous_intervals(ClosedSetDesc.from_intervals(UNIT, [(0.0, 1.0)])) == []


def test_contiguous_intervals_reports_augmentation():
    gaps, augmented = contiguous_intervals(ClosedSetDesc.from_points(UNIT, [0.5]), report=True)
    assert augmented and len(gaps) == 2


def test_cantor_level_two_gaps():
    K = cantor_prefix(2, (Fraction(0), Fraction(1)))
    assert sorted(g.length for g in contiguous_intervals(K)) == [Fraction(1, 9), Fraction(1, 9), Fraction(1, 3)]


closed_sets = st.lists(st.tuples(st.integers(0, 100), st.integers(0, 20)), max_size=6).map(
    lambda items: ClosedSetDesc.from_intervals(
        Interval(Fraction(0), Fraction(1)),
        [(Fraction(lo, 100), Fraction(min(100, lo + w), 100)) for lo, w in items]))


@given(closed_sets)
def test_gaps_and_components_tile_the_domain(K):
    K2, _ = K.with_endpoints()
    total = sum(g.length for g in contiguous_intervals(K)) + K2.total_length()
    assert total == 1


@settings(max_examples=50)
@given(closed_sets)
def test_set_json_round_trip(K):
    assert ClosedSetDesc.from_json(K.to_json()) == K


def test_exact_containment_with_fractions():
    K = ClosedSetDesc.from_points(UNIT, [Fraction(99, 100)])
    assert ClosedSetDesc.from_points(UNIT, [Fraction(99, 100)]).issubset(K)
