import math

import pytest
from hypothesis import given, settings, strategies as st

from fracvar.classify import (BudgetExhausted, DecompositionWitness, EstimateConstants, HypothesisFailure,
                              WitnessError, build_Bkm, check_cbvg, check_key_estimate, check_sbvg,
                              collapse_sbvg_bar, covers, difex_sbvg_witness, difex_total_variation,
                              estimate_lipschitz_k, heuristic_witness, make_difex, difex_cbvg_witness,
                              trend_verdict, validate_sbvg)
from fracvar.funcmodel import ClosedSetDesc, Interval, PLFunction, detect_K, hat, parse_expression
from fracvar.variation import VariationQuery, frac_variation

UNIT = Interval(0.0, 1.0)
SCHEDULE = [8, 16, 32, 64]


def _pts(*xs):
    return ClosedSetDesc.from_points(UNIT, xs)


# -- the example family -------------------------------------------------------------

def test_difex_values():
    assert make_difex(2, 8)(1 / 2) == 1
    assert make_difex(3, 8)(1 / 4) == pytest.approx(1 / 8)
    for n in (2, 3, 4):
        f = make_difex(n, 8)
        assert f(1 / 3) == 0 and f(0.0) == 0 and f(1.0) == 0


def test_difex_total_variation_reference():
    for n, M in [(2, 8), (3, 16), (4, 10)]:
        assert difex_total_variation(n, M) == pytest.approx(2 * sum(m ** -n for m in range(1, M // 2 + 1)))


def test_difex_cbvg_witness_shape():
    f = make_difex(2, 8)
    w = difex_cbvg_witness(f)
    assert w.sets[0].points() == [0.0, 1.0]
    assert w.sets[1].points() == [1 / 2, 1.0]
    assert w.sets[2].points() == [1 / 4, 1 / 3]
    assert covers(detect_K(f), w.sets)


# -- trend verdicts ---------------------------------------------------------------------

def test_trend_harmonic_diverges():
    Ms = [8, 16, 32, 64, 128]
    assert trend_verdict(Ms, [sum(1 / m for m in range(1, M // 2 + 1)) for M in Ms]).verdict == "divergent"


def test_trend_geometric_tail_is_bounded():
    Ms = [8, 16, 32, 64, 128]
    assert trend_verdict(Ms, [2 - 2.0 ** -k for k in range(5)]).verdict == "bounded"


def test_trend_constant_and_infinite():
    assert trend_verdict([8, 16, 32], [1.0, 1.0, 1.0]).verdict == "bounded"
    assert trend_verdict([8, 16], [1.0, math.inf]).verdict == "divergent"


# -- CBVG ---------------------------------------------------------------------------------------

@pytest.mark.parametrize("n", [2, 3])
def test_difex_cbvg_witness_is_consistent(n):
    f = make_difex(n, 64)
    rep = check_cbvg(f, None, n, SCHEDULE, difex_cbvg_witness)
    assert rep.verdict == "consistent with CBVG"
    # every term is at most the full inner variation, whose limit is a convergent series
    p = n / (n - 1)
    series = 2 * (sum(m ** -p for m in range(1, 100_000)) + 100_000 ** (1 - p) / (p - 1))
    for vals in rep.per_m.values():
        seq = [v for _, v in vals]
        assert max(seq) <= series ** ((n - 1) / n)
        assert all(b >= a - 1e-12 for a, b in zip(seq, seq[1:]))


def test_cbvg_hat_single_set():
    f = hat()
    rep = check_cbvg(f, DecompositionWitness("cbvg", (detect_K(f),)), 2)
    assert rep.verdict == "consistent with CBVG"


def test_cbvg_degenerate_witness_diverges():
    f = make_difex(2, 128)
    rule = lambda fm: DecompositionWitness("cbvg", (detect_K(fm),))  # noqa: E731
    rep = check_cbvg(f, None, 2, [8, 16, 32, 64, 128], rule)
    assert rep.verdict == "not consistent with CBVG"
    vals = [v for _, v in rep.per_m[1]]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_cbvg_rejects_foreign_sets():
    with pytest.raises(WitnessError):
        check_cbvg(hat(), DecompositionWitness("cbvg", (_pts(0.25),)), 2)


def test_cbvg_rejects_decreasing_schedule():
    with pytest.raises(ValueError):
        check_cbvg(make_difex(2, 16), None, 2, [16, 8], difex_cbvg_witness)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(-5.0, 5.0), st.sampled_from([2, 3]))
def test_cbvg_affine_invariance(scale, shift, n):
    base = make_difex(n, 16)
    f = base.to_pl()
    g = f.compose_affine(scale, shift)
    w = difex_cbvg_witness(base)
    moved = DecompositionWitness("cbvg", tuple(
        ClosedSetDesc.from_points(g.domain, [(x - shift) / scale for x in A.points()]) for A in w.sets))
    # snap the mapped points onto the breakpoints of g so both sides use identical abscissae
    snap = {float(x): x for x in g.breakpoints}
    moved = DecompositionWitness("cbvg", tuple(
        ClosedSetDesc.from_points(g.domain, [min(snap, key=lambda b: abs(b - x)) for x in A.points()])
        for A in moved.sets))
    a, b = check_cbvg(f, w, n), check_cbvg(g, moved, n)
    assert a.verdict == b.verdict
    for m in a.per_m:
        assert a.per_m[m][0][1] == pytest.approx(b.per_m[m][0][1], rel=1e-12, abs=1e-15)


# -- SBVG ---------------------------------------------------------------------------------------

def test_sbvg_finite_set_windows_below_gap():
    f = PLFunction((0.0, 0.2, 0.5, 1.0), (0.0, 1.0, 0.3, 0.8))
    K = detect_K(f)
    gap = 0.2
    w = DecompositionWitness("sbvg", (K,) * 4, tuple(gap / m for m in range(1, 5)))
    rep = check_sbvg(f, w, 2)
    assert rep.values[0] > 0
    assert rep.values[1:] == [0, 0, 0]
    assert rep.verdict == "decreasing toward 0"


def test_sbvg_difex_witness_decreases():
    f = make_difex(2, 32)
    rep = check_sbvg(f, difex_sbvg_witness(f), 2)
    assert rep.verdict == "decreasing toward 0"
    assert rep.values[-1] == 0


def test_sbvg_rejects_broken_nesting():
    w = DecompositionWitness("sbvg", (_pts(0.0), _pts(0.0, 1.0), _pts(1.0)), (0.5, 0.25, 0.125))
    with pytest.raises(WitnessError, match="A_2"):
        validate_sbvg(w)


def test_sbvg_rejects_non_decreasing_windows():
    w = DecompositionWitness("sbvg", (_pts(0.0), _pts(0.0)), (0.5, 0.5))
    with pytest.raises(WitnessError):
        validate_sbvg(w)


# -- diagonal collapse ------------------------------------------------------------------------

def _nested_and_decaying(w):
    validate_sbvg(w)
    return all(d <= 1 / p + 1e-15 for p, d in enumerate(w.deltas, start=1))


def test_collapse_single_row():
    f = make_difex(2, 32)
    row = difex_sbvg_witness(f)
    w = DecompositionWitness("sbvg-bar", (row.sets,), (row.deltas,))
    res = collapse_sbvg_bar(f, w, 2, P=5)
    assert res.ok and _nested_and_decaying(res.witness)
    # one row: every output set is a set of that row, in increasing column order
    cols = [c[1] for c in res.chosen]
    assert cols == sorted(cols)
    for A, c in zip(res.witness.sets, cols):
        assert A == row.sets[c - 1]


def test_collapse_two_rows():
    f = make_difex(2, 64)
    row = difex_sbvg_witness(f)
    halved = tuple(d / 2 for d in row.deltas)
    w = DecompositionWitness("sbvg-bar", (row.sets, row.sets), (row.deltas, halved))
    res = collapse_sbvg_bar(f, w, 2, P=5)
    assert res.ok and len(res.values) == 5
    assert all(v <= 1 / p + 1e-12 for p, v in enumerate(res.values, start=1))
    assert _nested_and_decaying(res.witness)


def test_collapse_skips_empty_rows():
    f = make_difex(2, 32)
    row = difex_sbvg_witness(f)
    w = DecompositionWitness("sbvg-bar", (row.sets, ()), (row.deltas, ()))
    assert collapse_sbvg_bar(f, w, 2, P=4).ok


def test_collapse_budget_exhausted():
    f = make_difex(2, 16)
    K = detect_K(f)
    w = DecompositionWitness("sbvg-bar", ((K, K),), ((1.0, 0.9),))
    with pytest.raises(BudgetExhausted):
        collapse_sbvg_bar(f, w, 2, P=2)


# -- pointwise Lipschitz sets ------------------------------------------------------------------

FLAT = parse_expression("(x-0.3)^4*(x-0.7)^4", (0.0, 1.0))


def test_bkm_flat_points_and_monotone_nesting():
    pts = [0.3, 0.7, 0.45]
    for n in (2, 3):
        sets = {(k, m): set(build_Bkm(FLAT, n, k, m, pts, grid=256).points.points())
                for k in (1, 4, 64) for m in (1, 4, 16)}
        for k0, k1 in [(1, 4), (4, 64)]:
            for m in (1, 4, 16):
                assert sets[k0, m] <= sets[k1, m]
        for m0, m1 in [(1, 4), (4, 16)]:
            for k in (1, 4, 64):
                assert sets[k, m0] <= sets[k, m1]
        assert 0.45 not in sets[64, 16]
        assert {0.3, 0.7} <= sets[64, 16]


def test_bkm_empty_derived_set():
    f = parse_expression("x", (0.0, 1.0))
    assert build_Bkm(f, 2, 1, 1, grid=64).points.is_empty


def test_bkm_needs_expression():
    with pytest.raises(TypeError):
        build_Bkm(hat(), 2, 1, 1)


# -- the key estimate --------------------------------------------------------------------------

def test_constants():
    c = EstimateConstants(3, 2)
    assert c.C_kn == pytest.approx(3 ** 0.5 * 4 ** 0.5)


def test_key_estimate_two_point():
    f = parse_expression("3*x^2 - 2*x^3", (0.0, 1.0))
    K, A = _pts(0.0, 1.0), _pts(0.0)
    rep = check_key_estimate(f, K, A, 0.0, 1.0, 2, k=estimate_lipschitz_k(f, 0.0, 0.0, 1.0, 2))
    assert rep.lhs == pytest.approx(abs(f(1.0) - f(0.0)) ** 0.5)
    assert rep.holds


def test_key_estimate_hypothesis_failures():
    f = parse_expression("x^2", (0.0, 1.0))
    with pytest.raises(HypothesisFailure) as exc:
        check_key_estimate(f, _pts(0.0, 1.0), _pts(0.0), 0.0, 1.0, 2, 1)
    assert exc.value.clause == "critical"
    with pytest.raises(HypothesisFailure) as exc:
        check_key_estimate(f, _pts(0.0, 1.0), _pts(0.5), 0.0, 1.0, 2, 1)
    assert exc.value.clause == "anchor"


def test_key_estimate_constant():
    f = PLFunction((0.0, 1.0), (2.0, 2.0))
    rep = check_key_estimate(f, _pts(0.0, 0.5, 1.0), _pts(0.0), 0.0, 1.0, 3, 1)
    assert rep.lhs == 0 and rep.holds


# -- heuristics ------------------------------------------------------------------------------

def test_heuristic_singletons_cover():
    f = make_difex(3, 12)
    w = heuristic_witness(f, 3)
    assert covers(detect_K(f), w.sets)
    assert all(len(A.points()) == 1 for A in w.sets)


def test_inner_variation_converges_for_difex():
    # V_{1/(n-1)} partial sums are bounded by the convergent series sum m^{-n/(n-1)}
    for n in (3, 4):
        bound = 2 * sum(m ** (-n / (n - 1)) for m in range(1, 10_000))
        for M in (16, 64):
            f = make_difex(n, M)
            v = frac_variation(f, detect_K(f), VariationQuery(alpha=1 / (n - 1))).value
            assert v <= bound
