import math

import numpy as np
import pytest

from fracvar.classify import DecompositionWitness, difex_cbvg_witness, heuristic_witness, make_difex
from fracvar.funcmodel import ClosedSetDesc, Interval, PLFunction, detect_K, hat
from fracvar.reparam import (CertificateInputError, ReparamInputError, VariationFunction, WeightScheduleError,
                             WitnessRejected, admissible_triples, all_decaying, assemble, build_v,
                             cantor_witness, certify_derivatives, check_growth_bound, key_estimate_instances,
                             from_function, measure_zero_check, nonconstant_normalize, sbvg_subsequence,
                             verify_homeomorphism, zahorski_build)
from fracvar.selftest import random_instance
from fracvar.variation import gen_variation

UNIT = Interval(0.0, 1.0)
INF = math.inf


def _pts(*xs):
    return ClosedSetDesc.from_points(UNIT, xs)


# -- variation functions -------------------------------------------------------------------

def test_v_vanishes_for_empty_A():
    f = hat()
    v = build_v(f, ClosedSetDesc.empty(UNIT), detect_K(f), INF, 2)
    assert set(v.values) == {0.0}


@pytest.mark.parametrize("n", [2, 3, 4])
def test_v_on_two_points(n):
    f = PLFunction((0.0, 1.0), (0.0, 3.0))
    K = _pts(0.0, 1.0)
    v = build_v(f, K, K, INF, n)
    assert v(0.0) == 0.0
    assert v(1.0) == pytest.approx(3.0 ** (1 / n), rel=1e-14)
    vt = build_v(f, K, K, INF, n, "left")
    assert vt(0.0) == pytest.approx(3.0 ** (1 / n), rel=1e-14) and vt(1.0) == 0.0


@pytest.mark.parametrize("seed", range(25))
def test_v_matches_restricted_generalized_variation(seed):
    inst = random_instance(np.random.default_rng(seed), intervals=False)
    K = inst.K.with_endpoints()[0]
    a, b = K.domain.lo, K.domain.hi
    v = build_v(inst.f, inst.A, K, inst.delta, inst.n)
    vt = build_v(inst.f, inst.A, K, inst.delta, inst.n, "left")
    for x in K.points():
        right = gen_variation(inst.f, inst.A.restrict(a, x), K.restrict(a, x), inst.n, "right", inst.delta)
        left = gen_variation(inst.f, inst.A.restrict(x, b), K.restrict(x, b), inst.n, "left", inst.delta)
        assert v(x) == pytest.approx(float(right.value), rel=1e-12, abs=1e-12)
        assert vt(x) == pytest.approx(float(left.value), rel=1e-12, abs=1e-12)


def test_v_rejects_bad_input():
    f = hat()
    with pytest.raises(ReparamInputError):
        build_v(f, _pts(0.25), detect_K(f), INF, 2)
    with pytest.raises(ValueError):
        build_v(f, detect_K(f), detect_K(f), INF, 2, direction="up")
    K = ClosedSetDesc.from_intervals(UNIT, [(0.0, 0.5)]).union(_pts(1.0))
    with pytest.raises(ReparamInputError):
        build_v(f, _pts(0.0), K, INF, 2)


def _growth_corpus():
    rng = np.random.default_rng(2024)
    for seed in range(120):
        inst = random_instance(np.random.default_rng(seed), intervals=False)
        yield inst.f, inst.A, inst.K.with_endpoints()[0], inst.delta, inst.n
    for n in (2, 3, 4):
        f = make_difex(n, 32)
        K = detect_K(f)
        for A in difex_cbvg_witness(f).sets:
            yield f, A, K, float(rng.uniform(0.05, 1.0)), n


def test_growth_inequality_on_admissible_triples():
    rng = np.random.default_rng(5)
    count, worst = 0, 0.0
    for f, A, K, delta, n in _growth_corpus():
        if A.is_empty:
            continue
        for direction in ("right", "left"):
            v = build_v(f, A, K, delta, n, direction)
            triples = admissible_triples(v, limit=400, rng=rng)
            rep = check_growth_bound(v, f, triples)
            assert rep.holds, (direction, rep.max_ratio)
            count += rep.count
            worst = max(worst, rep.max_ratio)
    assert count >= 10_000
    assert worst <= 1 + 1e-10


def test_growth_inequality_rejects_inadmissible_triples():
    f = hat()
    K = detect_K(f)
    v = build_v(f, _pts(0.5), K, 0.6, 2)
    with pytest.raises(ReparamInputError):
        check_growth_bound(v, f, [(0.5, 1.0, 0.5)])
    with pytest.raises(ReparamInputError):
        check_growth_bound(v, f, [(0.0, 0.5, 1.0)])


def test_running_values_bounded_by_windowed_variation():
    for seed in range(40):
        inst = random_instance(np.random.default_rng(1000 + seed), intervals=False)
        K = inst.K.with_endpoints()[0]
        v = build_v(inst.f, inst.A, K, inst.delta, inst.n)
        vt = build_v(inst.f, inst.A, K, inst.delta, inst.n, "left")
        bar = float(gen_variation(inst.f, inst.A, K, inst.n, "bar", inst.delta).value)
        assert max(v.total, vt.total) <= bar + 1e-12 * max(1.0, bar)


def test_measure_zero_on_finite_sets():
    f = make_difex(2, 64)
    K = detect_K(f)
    for A in difex_cbvg_witness(f).sets[:5]:
        v = build_v(f, A, K, INF, 2)
        assert abs(measure_zero_check(v, f)) <= 1e-10


def test_measure_zero_detects_growth_on_an_interval():
    K = ClosedSetDesc.from_intervals(UNIT, [(0.0, 0.5)]).union(_pts(1.0))
    v = VariationFunction("right", (0.0, 0.5, 1.0), (0.0, 1.0, 2.0), _pts(0.0), K, INF, 2)
    assert measure_zero_check(v) == pytest.approx(1.0)


def test_measure_zero_requires_monotone_gaps():
    f = hat()
    K = _pts(0.0, 1.0)
    v = build_v(f, K, K, INF, 2)
    with pytest.raises(ReparamInputError):
        measure_zero_check(v, f)


# -- assembly ----------------------------------------------------------------------------------

def _singletons(f):
    K = detect_K(f)
    return DecompositionWitness("cbvg", tuple(_pts(x) for x in K.points()))


def test_monotone_function_gets_a_single_bridge():
    f = PLFunction((0.0, 1.0), (0.0, 2.0))
    r = assemble(f, _singletons(f), 2)
    assert len(r.bridges) == 1 and r.K_g == [0.0, 1.0]
    assert r.g(0.5) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_hat_pipeline(n):
    f = hat()
    r = assemble(f, _singletons(f), n)
    certs = certify_derivatives(r, r.K_g)
    assert len(certs) == 3 and all_decaying(certs)
    rep = verify_homeomorphism(r)
    assert rep.ok and rep.round_trip <= 1e-9
    # g agrees with f at the images of K
    for x, t in zip(r.xs, r.K_g):
        assert r.g(t) == pytest.approx(f(x), abs=1e-12)


@pytest.mark.parametrize("n", [2, 3])
def test_difex_pipeline(n):
    f = make_difex(n, 32)
    r = assemble(f, difex_cbvg_witness(f), n)
    certs = certify_derivatives(r, r.K_g)
    assert len(certs) == len(detect_K(f).points())
    assert all_decaying(certs)
    assert verify_homeomorphism(r).ok


def test_h_derivative_nonzero_off_K_g():
    r = assemble(hat(), _singletons(hat()), 3)
    kg = set(r.K_g)
    for t in np.linspace(0.0, 1.0, 97):
        if float(t) not in kg:
            assert math.isfinite(r.log_h_prime(float(t)))


def test_h_is_monotone_with_fixed_ends():
    f = make_difex(2, 16)
    r = assemble(f, difex_cbvg_witness(f), 2)
    ts = np.linspace(0.0, 1.0, 301)
    hs = [r.h(float(t)) for t in ts]
    # h is flat to double precision next to K_g, so only weak monotonicity is observable
    assert all(b >= a for a, b in zip(hs, hs[1:]))
    assert r.h(0.0) == 0.0 and r.h(1.0) == 1.0


def test_samples_cover_the_domain():
    r = assemble(hat(), _singletons(hat()), 2)
    rows = r.samples(129)
    assert len(rows) == 129 and rows[0][0] == 0.0 and rows[-1][0] == 1.0


def test_key_estimate_on_pipeline_output():
    for n in (2, 3):
        f = make_difex(n, 16)
        r = assemble(f, difex_cbvg_witness(f), n)
        reps = key_estimate_instances(r)
        assert reps and all(rep.holds for rep in reps)


def test_negative_control_raw_hat():
    certs = certify_derivatives(from_function(hat(), 2), [0.5])
    assert certs[0].verdict == "violated"
    assert certs[0].estimates[0][-1] > 1e-4


def test_certificate_needs_K_g_point():
    r = assemble(hat(), _singletons(hat()), 2)
    with pytest.raises(CertificateInputError):
        certify_derivatives(r, [0.3])
    with pytest.raises(CertificateInputError):
        certify_derivatives(r, [0.0], windows=[0.1, 0.1])


def test_witness_checks():
    f = hat()
    with pytest.raises(WitnessRejected):
        assemble(f, DecompositionWitness("cbvg", (_pts(0.0, 1.0),)), 2)
    with pytest.raises(WitnessRejected):
        assemble(f, DecompositionWitness("cbvg", (_pts(0.25),)), 2)
    with pytest.raises(WeightScheduleError):
        assemble(f, _singletons(f), 2, weights=[1.0, 1.0])
    with pytest.raises(WeightScheduleError):
        assemble(f, _singletons(f), 2, weights=[1.0, 0.0, 1.0])


def test_assembly_needs_finite_K():
    f = make_difex(2, 16)
    K = detect_K(f).union(ClosedSetDesc.from_intervals(UNIT, [(0.6, 0.7)]))
    with pytest.raises(ReparamInputError):
        assemble(f, DecompositionWitness("cbvg", (K,)), 2, K=K)


def test_heuristic_witness_pipeline():
    f = make_difex(3, 16)
    r = assemble(f, heuristic_witness(f, 3), 3)
    assert all_decaying(certify_derivatives(r, r.K_g))


def test_sbvg_subsequence_is_summable():
    vals = [1.0, 0.5, 0.2, 0.1, 0.01, 0.001, 1e-4, 1e-5]
    idx = sbvg_subsequence(vals)
    assert idx == sorted(idx)
    assert all(vals[m] <= j ** -3 for j, m in enumerate(idx, start=1))
    assert sbvg_subsequence([2.0, 3.0]) == []


# -- homeomorphisms flat on a closed set ----------------------------------------------------------

def test_zahorski_two_points():
    K = _pts(0.0, 1.0)
    r, certs = zahorski_build(K, DecompositionWitness("cbvg", (K,)), 2)
    assert all_decaying(certs) and len(certs) == 2


@pytest.mark.parametrize("n", [2, 3])
def test_zahorski_cantor_depth_four(n):
    w = cantor_witness(4)
    K = ClosedSetDesc.from_points(UNIT, sorted({x for A in w.sets for x in A.points()}))
    r, certs = zahorski_build(K, w, n)
    assert len(certs) == 2 ** 5 and all_decaying(certs)
    assert verify_homeomorphism(r).ok


def test_zahorski_rejects_full_interval():
    K = ClosedSetDesc.from_intervals(UNIT, [(0.0, 1.0)])
    with pytest.raises(ReparamInputError):
        zahorski_build(K, DecompositionWitness("cbvg", (K,)), 2)


# -- normalization ------------------------------------------------------------------------------

def test_normalize_monotone_is_affine():
    res = nonconstant_normalize(PLFunction((0.0, 0.25, 1.0), (0.0, 3.0, 4.0)))
    assert res.function.breakpoints == (0.0, 0.75, 1.0)


def test_normalize_hat():
    res = nonconstant_normalize(hat())
    assert res.function.breakpoints == (0.0, 0.5, 1.0)
    for x in (0.1, 0.4, 0.8):
        assert res.function(res.map(x)) == pytest.approx(hat()(x), abs=1e-12)


def test_normalize_rejects_flats():
    with pytest.raises(ReparamInputError):
        nonconstant_normalize(PLFunction((0.0, 0.5, 0.75, 1.0), (0.0, 1.0, 1.0, 0.0)))
