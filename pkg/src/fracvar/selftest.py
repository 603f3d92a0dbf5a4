"""Seeded randomized property suite shared by the CLI ``selftest`` command."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .funcmodel.pl import PLFunction
from .funcmodel.sets import ClosedSetDesc, Interval
from .variation import (BRUTE_FORCE_LIMIT, VariationQuery, brute_force_variation, frac_variation,
                        gen_variation, oracle_candidates)

GV_MODES = ("full", "bar", "right", "left")


@dataclass
class Instance:
    f: PLFunction
    K: ClosedSetDesc
    A: ClosedSetDesc
    n: int
    alpha: object
    delta: float


def random_instance(rng: np.random.Generator, rational: bool = False, intervals: bool = True) -> Instance:
    """Random PL function with a finite-candidate ``K`` and ``A subset K``, at most 14 candidates."""
    while True:
        k = int(rng.integers(3, 9))
        grid = sorted(rng.choice(np.arange(1, 100), size=k - 2, replace=False).tolist())
        raw_x = [0] + grid + [100]
        raw_y = rng.integers(-6, 7, size=k).tolist()
        if rational:
            xs = tuple(Fraction(int(x), 100) for x in raw_x)
            ys = tuple(Fraction(int(y), 4) for y in raw_y)
        else:
            xs = tuple(x / 100 for x in raw_x)
            ys = tuple(float(y) / 4 + float(rng.uniform(-0.1, 0.1)) for y in raw_y)
        f = PLFunction(xs, ys)
        dom = f.domain
        pts = [x for x in xs if rng.random() < 0.7] + [xs[0], xs[-1]]
        extra = rng.choice(np.arange(1, 100), size=int(rng.integers(0, 4)), replace=False).tolist()
        pts += [Fraction(int(e), 100) if rational else e / 100 for e in extra]
        K = ClosedSetDesc.from_points(dom, pts)
        if intervals and rng.random() < 0.25:
            lo = pts[int(rng.integers(0, len(pts)))]
            hi = min(xs[-1], lo + (Fraction(int(rng.integers(5, 30)), 100) if rational
                                   else float(rng.integers(5, 30)) / 100))
            K = K.union(ClosedSetDesc.from_intervals(dom, [(lo, hi)]))
        kp = K.points()
        A = ClosedSetDesc.from_points(dom, [p for p in kp if rng.random() < 0.5])
        n = int(rng.integers(2, 5))
        alpha = 1 if rational else [1.0, 0.5, 1 / 3, 0.75][int(rng.integers(0, 4))]
        delta = math.inf if rng.random() < 0.3 else float(rng.uniform(0.05, 0.8))
        q = VariationQuery(alpha=alpha, delta=delta, n=n)
        modes = ("frac",) + (GV_MODES if not A.is_empty else ())
        if all(len(oracle_candidates(f, A, K, q, m)) <= BRUTE_FORCE_LIMIT for m in modes):
            return Instance(f, K, A, n, alpha, delta)


@dataclass
class SuiteResult:
    passed: int = 0
    failed: int = 0
    failures: list = field(default_factory=list)

    def check(self, name: str, ok: bool):
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            self.failures.append(name)

    def summary(self) -> str:
        return f"passed {self.passed} failed {self.failed}"


def _close(x, y, tol=1e-12) -> bool:
    if x == y:
        return True
    return abs(float(x) - float(y)) <= tol * max(1.0, abs(float(x)))


def run_suite(seed: int = 0, count: int = 60, fault: bool = False) -> SuiteResult:
    from .reparam.bridge import make_bridge, w

    rng = np.random.default_rng(seed)
    res = SuiteResult()
    bump = 1e-6 if fault else 0.0
    for i in range(count):
        inst = random_instance(rng, rational=(i % 3 == 0))
        q = VariationQuery(alpha=inst.alpha, delta=inst.delta, n=inst.n)
        dp = frac_variation(inst.f, inst.K, q).value + bump
        bf = brute_force_variation(inst.f, None, inst.K, q, "frac").value
        res.check(f"frac#{i}", _close(dp, bf))
        for mode in GV_MODES:
            dp = gen_variation(inst.f, inst.A, inst.K, inst.n, mode, inst.delta).value + bump
            bf = brute_force_variation(inst.f, inst.A, inst.K, q, mode).value
            res.check(f"{mode}#{i}", _close(dp, bf))
        r = gen_variation(inst.f, inst.A, inst.K, inst.n, "right", inst.delta).value
        l = gen_variation(inst.f, inst.A, inst.K, inst.n, "left", inst.delta).value
        bar = gen_variation(inst.f, inst.A, inst.K, inst.n, "bar", inst.delta).value
        a, b = inst.K.domain.lo, inst.K.domain.hi
        full = gen_variation(inst.f, inst.A.add_points([a, b]), inst.K.add_points([a, b]), inst.n).value
        res.check(f"sandwich#{i}", max(r, l) <= min(bar, full) * (1 + 1e-12) + 1e-12)
    for i in range(20):
        a = float(rng.uniform(-5, 5))
        beta = a + float(rng.uniform(0.1, 3))
        A, B = (float(v) for v in rng.uniform(-3, 3, 2))
        br = make_bridge(a, beta, A, B, int(rng.integers(1, 6)))
        res.check(f"bridge-ends#{i}", abs(br(a) - A) <= 1e-10 and abs(br(beta) - B) <= 1e-10)
    res.check("w-half", abs(w(0.5) - 0.5) <= 1e-10)
    return res
