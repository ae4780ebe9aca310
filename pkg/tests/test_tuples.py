import itertools
from fractions import Fraction

import numpy as np
import pytest

from liftexp.bodies import Ball, Interval, Singleton
from liftexp.errors import ValidationError
from liftexp.lift import BodySample, expectation_support, lift_support
from liftexp.tuples import (
    CoupledTupleSample,
    VectorSample,
    cascos_gap,
    cascos_projections,
    lift_zonoid_support,
    self_tuple_distinguishes,
    self_tuple_witness,
    tuple_lift_support,
    zonoid_support,
)

from _gen import random_body, random_direction, random_weights

HALF = Fraction(1, 2)
PAIR = BodySample([Interval(1, 3), Interval(2, 4)], [HALF, HALF])
# the same nonunique pair moved left by two so both contain the origin
X = BodySample([Interval(-1, 1), Interval(0, 2)], [HALF, HALF])
X_PRIME = BodySample([Interval(-1, 2), Interval(0, 1)], [HALF, HALF])
U0S = [Fraction(k, 2) for k in range(-8, 3)]


def test_tuple_examples():
    single = CoupledTupleSample.self_tuple(PAIR, 1)
    for u0 in (-5, -2, 0, 1):
        for u in (1, -1):
            assert tuple_lift_support(single, u0, [(u,)]) == lift_support(PAIR, u0, u)
    pair = CoupledTupleSample.self_tuple(PAIR, 2)
    assert tuple_lift_support(pair, -5, [(1,), (1,)]) == 2
    for u0 in (-1, 0, 2.5):
        assert tuple_lift_support(pair, u0, [(0,), (0,)]) == max(u0, 0)


def test_tuple_validation():
    with pytest.raises(ValidationError):
        CoupledTupleSample(((Interval(0, 1),), (Interval(0, 1), Interval(0, 1))), (HALF, HALF))
    with pytest.raises(ValidationError):
        CoupledTupleSample(((Interval(0, 1),), (Ball((0, 0), 1),)), (HALF, HALF))
    with pytest.raises(ValidationError):
        CoupledTupleSample(((Interval(0, 1),),), (HALF,))
    pair = CoupledTupleSample.self_tuple(PAIR, 2)
    with pytest.raises(ValidationError):
        tuple_lift_support(pair, 0, [(1,)])
    with pytest.raises(ValidationError):
        tuple_lift_support(pair, 0, [(1,), (1, 0)])
    with pytest.raises(ValidationError):
        CoupledTupleSample.self_tuple(PAIR, 0)


def test_zero_slots_marginalize_exactly():
    rng = np.random.default_rng(40)
    for _ in range(100):
        n = int(rng.integers(1, 6))
        w = random_weights(rng, n)
        obs = [(random_body(rng, 2), random_body(rng, 1), random_body(rng, 3)) for _ in range(n)]
        s = CoupledTupleSample(obs, w)
        for j, d in enumerate(s.slot_dims):
            u = random_direction(rng, d)
            us = [tuple(0.0 for _ in range(dd)) for dd in s.slot_dims]
            us[j] = u
            u0 = float(rng.normal())
            assert tuple_lift_support(s, u0, us) == lift_support(s.marginal(j), u0, u)


def test_tuple_support_is_permutation_invariant():
    rng = np.random.default_rng(41)
    for _ in range(50):
        n = int(rng.integers(1, 6))
        obs = [(random_body(rng, 2), random_body(rng, 2)) for _ in range(n)]
        w = random_weights(rng, n)
        perm = rng.permutation(n)
        a = CoupledTupleSample(obs, w)
        b = CoupledTupleSample([obs[i] for i in perm], [w[i] for i in perm])
        us = [random_direction(rng, 2), random_direction(rng, 2)]
        u0 = float(rng.normal())
        assert tuple_lift_support(a, u0, us) == tuple_lift_support(b, u0, us)


def test_tuple_support_matches_brute_force():
    rng = np.random.default_rng(42)
    for _ in range(50):
        n = int(rng.integers(1, 6))
        obs = [(random_body(rng, 2), random_body(rng, 3)) for _ in range(n)]
        w = random_weights(rng, n)
        s = CoupledTupleSample(obs, w)
        us = [random_direction(rng, 2), random_direction(rng, 3)]
        u0 = float(rng.normal())
        want = sum(p * max(0.0, u0 + a.support(us[0]) + b.support(us[1])) for (a, b), p in zip(obs, w))
        assert tuple_lift_support(s, u0, us) == pytest.approx(want, abs=1e-12)


# --- self-tuples telling apart equal lifts ------------------------------------------


def test_shifted_pair_needs_two_slots():
    dirs = [(1,), (-1,)]
    assert not self_tuple_distinguishes(X, X_PRIME, 1, U0S, dirs)
    assert self_tuple_distinguishes(X, X_PRIME, 2, U0S, dirs)
    t, us = self_tuple_witness(X, X_PRIME, 2, U0S, dirs)
    ta = CoupledTupleSample.self_tuple(X, 2)
    tb = CoupledTupleSample.self_tuple(X_PRIME, 2)
    assert tuple_lift_support(ta, t, us) != tuple_lift_support(tb, t, us)


def test_self_tuple_examples():
    dirs = [(1,), (-1,)]
    assert not self_tuple_distinguishes(X, X, 2, U0S, dirs)
    wide = BodySample([Interval(-1, 3), Interval(0, 2)], [HALF, HALF])
    assert self_tuple_distinguishes(X, wide, 1, U0S, dirs)


def test_origin_check():
    with pytest.raises(ValidationError, match="origin"):
        self_tuple_distinguishes(PAIR, PAIR, 1, U0S, [(1,), (-1,)])
    with pytest.raises(ValidationError):
        self_tuple_distinguishes(X, X_PRIME, 1, U0S, [])


def test_self_tuples_separate_random_recouplings():
    # reshuffle the lower endpoints: every n=1 marginal stays, the joint law changes
    rng = np.random.default_rng(43)
    dirs = [(1,), (-1,)]
    u0s = np.linspace(-25, 1, 53)
    hits = 0
    for _ in range(20):
        n = int(rng.integers(2, 5))
        lo = [int(v) for v in rng.integers(-10, 1, n)]
        hi = [int(v) for v in rng.integers(0, 10, n)]
        perm = [int(i) for i in rng.permutation(n)]
        a = BodySample.uniform([Interval(l, h) for l, h in zip(lo, hi)], exact=True)
        b = BodySample.uniform([Interval(lo[perm[i]], hi[i]) for i in range(n)], exact=True)
        assert not self_tuple_distinguishes(a, b, 1, u0s, dirs)
        same_joint = sorted(zip(lo, hi)) == sorted((lo[perm[i]], hi[i]) for i in range(n))
        assert self_tuple_distinguishes(a, b, 2, u0s, dirs) == (not same_joint)
        hits += not same_joint
    assert hits > 0


# --- zonoids --------------------------------------------------------------------------


def test_zonoid_examples():
    v = VectorSample([(2.0, -1.0)], [1.0])
    for u in [(1, 0), (0, 1), (-1, -1), (0.3, 0.9)]:
        assert zonoid_support(v, u) == max(0.0, 2 * u[0] - u[1])
        assert lift_zonoid_support(v, 0.5, u) == pytest.approx(max(0.0, 0.5 + 2 * u[0] - u[1]), abs=1e-15)
    with pytest.raises(ValidationError):
        VectorSample([(1, 0), (1,)], [HALF, HALF])
    with pytest.raises(ValidationError):
        VectorSample([(1, 0)], [HALF])


def test_zonoid_is_segment_expectation():
    rng = np.random.default_rng(44)
    for _ in range(50):
        n = int(rng.integers(1, 8))
        v = VectorSample([tuple(rng.normal(size=3)) for _ in range(n)], random_weights(rng, n))
        segs = v.segments()
        for _ in range(5):
            u = random_direction(rng, 3)
            assert zonoid_support(v, u) == pytest.approx(expectation_support(segs, u), abs=1e-12)


def test_zonoid_ignores_positive_scale_mixing():
    # replacing xi by (xi / c) with probability weight c * p keeps E <xi, u>_+ fixed
    rng = np.random.default_rng(45)
    for _ in range(30):
        n = int(rng.integers(1, 6))
        pts = [rng.normal(size=2) for _ in range(n)]
        w = random_weights(rng, n)
        v = VectorSample([tuple(p) for p in pts], w)
        c = rng.uniform(0.5, 2.0, n)
        raw = [wi * ci for wi, ci in zip(w, c)]
        scale = sum(raw)
        mixed = VectorSample([tuple(p * scale / ci) for p, ci in zip(pts, c)], [r / scale for r in raw])
        u = random_direction(rng, 2)
        assert zonoid_support(mixed, u) == pytest.approx(zonoid_support(v, u), abs=1e-12)


def test_lift_zonoid_is_singleton_lift():
    rng = np.random.default_rng(46)
    for _ in range(30):
        n = int(rng.integers(1, 6))
        pts = [tuple(rng.normal(size=2)) for _ in range(n)]
        w = random_weights(rng, n)
        v = VectorSample(pts, w)
        s = BodySample([Singleton(p) for p in pts], w)
        u0, u = float(rng.normal()), random_direction(rng, 2)
        assert lift_zonoid_support(v, u0, u) == pytest.approx(lift_support(s, u0, u), abs=1e-12)


# --- projections of the interval lift in three dimensions ------------------------------


def test_cascos_examples():
    proj = cascos_projections(PAIR)
    assert proj.slots(1, 1) == 7
    for u0, u in itertools.product((-5, -2, 0), (1, -1)):
        assert proj.lift_first(u0, u) == lift_support(PAIR, u0, u)
        assert proj.lift_second(u0, u) == lift_support(PAIR, u0, u)
    # endpoint vector (xi, eta) takes (1, 3) or (2, 4)
    assert proj.endpoint_zonoid(1, 1) == 5
    assert proj.lift_zonoid(-4, 1, 0) == lift_support(BodySample([Singleton((1,)), Singleton((2,))], [HALF, HALF]), -4, 1)


def test_cascos_gap_is_reported():
    dirs = [(np.cos(t), np.sin(t)) for t in np.linspace(0, 2 * np.pi, 16, endpoint=False)]
    gaps = cascos_gap(PAIR, dirs)
    assert len(gaps) == 16
    assert any(abs(g) > 1e-9 for g in gaps)
    with pytest.raises(ValidationError):
        cascos_projections(BodySample([Ball((0, 0), 1)], [1]))
