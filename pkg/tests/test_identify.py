import math
from fractions import Fraction

import numpy as np
import pytest

from liftexp.bodies import Ball, Interval, Polytope, support
from liftexp.errors import ReconstructionError, ValidationError
from liftexp.identify import (
    FiniteSupportDist,
    MarginalOracle,
    is_comonotonic_endpoints,
    is_comonotonic_rows,
    marginal_oracle,
    reconstruct,
    reconstruct_comonotonic,
    reconstruct_continuation,
    reconstruct_distinct_probs,
    subadditivity_violations,
)
from liftexp.lift import BodySample
from liftexp.order import DirectionGrid

HALF = Fraction(1, 2)
ENDS = [(1,), (-1,)]
TWO = BodySample([Interval(0, 1), Interval(2, 5)], [Fraction(3, 10), Fraction(7, 10)])


def circle(m):
    return list(DirectionGrid.angles(m))


def match_analytic(result, bodies, path):
    """Largest error of the recovered branches against the closest true body."""
    worst = 0.0
    for vals, _ in result.realizations:
        errs = [max(abs(float(v) - support(b, u)) for v, u in zip(vals, path)) for b in bodies]
        worst = max(worst, min(errs))
    return worst


def random_polytope(rng, k=None):
    k = k or int(rng.integers(3, 7))
    return Polytope([tuple(float(c) for c in rng.normal(size=2) * 2) for _ in range(k)])


# --- comonotonicity -------------------------------------------------------------


def test_comonotonic_endpoint_examples():
    assert is_comonotonic_endpoints([(1, 3), (2, 4)])
    assert not is_comonotonic_endpoints([(1, 4), (2, 3)])
    assert is_comonotonic_endpoints([(5, 9)])
    assert is_comonotonic_endpoints([(1, 3), (1, 4), (2, 4)])
    with pytest.raises(ValidationError):
        is_comonotonic_endpoints([(3, 1)])
    with pytest.raises(ValidationError):
        is_comonotonic_endpoints([(1, 3), (2, 4)], weights=[1])


def test_comonotonic_rows_matches_pairwise_definition():
    rng = np.random.default_rng(30)
    for _ in range(300):
        rows = [tuple(int(x) for x in rng.integers(0, 4, 3)) for _ in range(int(rng.integers(1, 6)))]
        signs = tuple(int(s) for s in rng.choice([-1, 1], 3))
        pairwise = all(
            all(s * (a[c] - b[c]) >= 0 for c, s in enumerate(signs))
            or all(s * (a[c] - b[c]) <= 0 for c, s in enumerate(signs))
            for a in rows
            for b in rows
        )
        assert is_comonotonic_rows(rows, signs) == pairwise


# --- marginal oracle ------------------------------------------------------------


def test_oracle_examples():
    oracle = marginal_oracle(TWO, ENDS)
    assert oracle.dists[0].atoms == ((1, Fraction(3, 10)), (5, Fraction(7, 10)))
    assert oracle.dists[1].atoms == ((-2, Fraction(7, 10)), (0, Fraction(3, 10)))
    disc = BodySample([Ball((1, 2), 1)], [1.0])
    for u, d in zip(circle(12), marginal_oracle(disc, circle(12)).dists):
        assert len(d) == 1 and d.probs == (1.0,)
        assert d.values[0] == pytest.approx(support(Ball((1, 2), 1), u))


def test_oracle_merges_equal_values():
    s = BodySample.uniform([Interval(0, 1), Interval(0, 2), Interval(-1, 1)], exact=True)
    d = marginal_oracle(s, ENDS).dists[0]
    assert d.atoms == ((1, Fraction(2, 3)), (2, Fraction(1, 3)))


def test_distribution_validation():
    with pytest.raises(ValidationError):
        FiniteSupportDist(((1, 0.5), (0, 0.5)))
    with pytest.raises(ValidationError):
        FiniteSupportDist(((0, 0.5), (1, 0.4)))
    with pytest.raises(ValidationError):
        MarginalOracle(((1, 0), (1,)), (FiniteSupportDist(((0, 1),)),) * 2)


# --- tracing by distinct probabilities -------------------------------------------


def test_distinct_probability_examples():
    result = reconstruct_distinct_probs(marginal_oracle(TWO, ENDS))
    assert sorted(result.realizations, key=lambda r: r[1]) == [
        ((1, 0), Fraction(3, 10)),
        ((5, -2), Fraction(7, 10)),
    ]
    disc = BodySample([Ball((1, 2), 1)], [1.0])
    path = circle(24)
    result = reconstruct(marginal_oracle(disc, path), "distinct")
    assert result.probs == (1.0,)
    assert result.realizations[0][0] == tuple(support(Ball((1, 2), 1), u) for u in path)


@pytest.mark.parametrize("exact", [False, True])
def test_distinct_probability_round_trip(exact):
    rng = np.random.default_rng(31 + exact)
    path = circle(90)
    for _ in range(10):
        n = int(rng.integers(1, 5))
        bodies = [random_polytope(rng) for _ in range(n)]
        raw = rng.permutation(np.arange(1, 10))[:n]
        weights = [Fraction(int(r), int(raw.sum())) if exact else float(r / raw.sum()) for r in raw]
        s = BodySample(bodies, weights)
        result = reconstruct_distinct_probs(marginal_oracle(s, path))
        by_prob = {p: vals for vals, p in result.realizations}
        assert sorted(by_prob) == sorted(weights)
        for b, w in zip(bodies, weights):
            for v, u in zip(by_prob[w], path):
                assert float(v) == pytest.approx(support(b, u), abs=1e-9)


def test_shared_atoms_are_split_by_probability():
    # at u=+1 realizations 0.2 and 0.5 share the value 3
    s = BodySample([Interval(0, 3), Interval(1, 3), Interval(2, 4)], [Fraction(1, 5), Fraction(1, 2), Fraction(3, 10)])
    result = reconstruct_distinct_probs(marginal_oracle(s, ENDS))
    assert sorted(result.realizations, key=lambda r: r[1]) == [
        ((3, 0), Fraction(1, 5)),
        ((4, -2), Fraction(3, 10)),
        ((3, -1), Fraction(1, 2)),
    ]


def test_distinct_probability_errors():
    pair = BodySample.uniform([Interval(1, 3), Interval(2, 4)], exact=True)
    with pytest.raises(ReconstructionError, match="probabilities not separating, use continuation"):
        reconstruct_distinct_probs(marginal_oracle(pair, ENDS))
    bad = MarginalOracle(
        ENDS,
        (
            FiniteSupportDist(((1, Fraction(3, 10)), (5, Fraction(7, 10)))),
            FiniteSupportDist(((-2, Fraction(2, 5)), (0, Fraction(3, 5)))),
        ),
    )
    with pytest.raises(ReconstructionError, match="oracle inconsistent"):
        reconstruct_distinct_probs(bad)
    with pytest.raises(ValidationError):
        reconstruct(bad, "guess")


def test_non_support_function_is_rejected():
    # values on +1 and -1 whose sum is negative cannot come from a nonempty set
    bad = MarginalOracle(ENDS, (FiniteSupportDist(((1, 1),)), FiniteSupportDist(((-3, 1),))))
    with pytest.raises(ReconstructionError, match="not a support function"):
        reconstruct_distinct_probs(bad)
    assert subadditivity_violations(ENDS, (1, -3))
    assert not subadditivity_violations(ENDS, (1, -1))


# --- comonotone reconstruction ----------------------------------------------------


def test_comonotone_interval_samples_are_identified():
    rng = np.random.default_rng(33)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        lo = np.sort(rng.integers(-10, 10, n))
        hi = np.sort(lo + rng.integers(0, 5, n))
        hi = np.maximum(hi, lo)
        bodies = [Interval(int(a), int(b)) for a, b in zip(lo, hi)]
        assert is_comonotonic_endpoints([(b.lo, b.hi) for b in bodies])
        raw = [int(r) for r in rng.integers(1, 6, n)]
        w = [Fraction(r, sum(raw)) for r in raw]
        s = BodySample(bodies, w)
        # h(+1) = hi and h(-1) = -lo, so comonotone endpoints need signs (+1, -1)
        result = reconstruct_comonotonic(marginal_oracle(s, ENDS), signs=(1, -1))
        got = {}
        for (h_up, h_down), p in result.realizations:
            got[(-h_down, h_up)] = got.get((-h_down, h_up), 0) + p
        want = {}
        for b, p in zip(bodies, w):
            want[(b.lo, b.hi)] = want.get((b.lo, b.hi), 0) + p
        assert got == want


def test_antitone_pair_is_not_recovered_by_quantile_coupling():
    swapped = BodySample.uniform([Interval(1, 4), Interval(2, 3)], exact=True)
    result = reconstruct_comonotonic(marginal_oracle(swapped, ENDS), signs=(1, -1))
    got = sorted((-d, u) for (u, d), _ in result.realizations)
    assert got == [(1, 3), (2, 4)]
    # with both signs +1 the coupling is the antitone one
    result = reconstruct_comonotonic(marginal_oracle(swapped, ENDS))
    assert sorted((-d, u) for (u, d), _ in result.realizations) == [(1, 4), (2, 3)]


def test_scaled_copies_are_recovered_with_signs():
    rng = np.random.default_rng(34)
    path = circle(120)
    for _ in range(10):
        k = random_polytope(rng)
        signs = [1 if support(k, u) >= 0 else -1 for u in path]
        etas = sorted(set(float(e) for e in rng.uniform(0.2, 3, int(rng.integers(1, 5)))))
        s = BodySample.uniform([Polytope([tuple(e * c for c in v) for v in k.vertices]) for e in etas])
        oracle = marginal_oracle(s, path)
        rows = list(zip(*[s.supports(u) for u in path]))
        assert is_comonotonic_rows(rows, signs)
        result = reconstruct_comonotonic(oracle, signs)
        assert len(result.realizations) == len(etas)
        for vals, p in result.realizations:
            assert p == pytest.approx(1 / len(etas))
        assert match_analytic(result, s.bodies, path) <= 1e-9


def test_growing_balls_are_comonotone():
    path = circle(60)
    s = BodySample.uniform([Ball((1, -1), r) for r in (0.5, 1.0, 2.5)])
    result = reconstruct(marginal_oracle(s, path), "comonotonic")
    assert match_analytic(result, s.bodies, path) <= 1e-12


# --- continuation ----------------------------------------------------------------


def test_continuation_two_discs():
    path = circle(720)
    discs = [Ball((1, 0), 1), Ball((-1, 0), 1)]
    result = reconstruct_continuation(marginal_oracle(BodySample.uniform(discs), path))
    assert len(result.realizations) == 2
    assert match_analytic(result, discs, path) <= 1e-6
    assert any("crossing" in d for d in result.diagnostics)
    with pytest.raises(ReconstructionError, match="probabilities not separating"):
        reconstruct_distinct_probs(marginal_oracle(BodySample.uniform(discs), path))


def test_continuation_single_disc():
    path = circle(100)
    result = reconstruct_continuation(marginal_oracle(BodySample([Ball((0.5, 2), 1)], [1.0]), path))
    assert result.diagnostics == ()
    assert match_analytic(result, [Ball((0.5, 2), 1)], path) <= 1e-12


def test_continuation_random_discs():
    rng = np.random.default_rng(35)
    path = circle(1500)
    for _ in range(5):
        n = int(rng.integers(2, 4))
        centers = []
        while len(centers) < n:
            c = rng.uniform(-3, 3, 2)
            if all(np.linalg.norm(c - d) > 1.0 for d in centers):
                centers.append(c)
        discs = [Ball(tuple(float(x) for x in c), 1.0) for c in centers]
        result = reconstruct_continuation(marginal_oracle(BodySample.uniform(discs), path))
        assert match_analytic(result, discs, path) <= 1e-6


def test_continuation_gradient_tie():
    path = circle(2000)
    tangent = BodySample.uniform([Ball((0, 0), 2), Ball((1, 0), 1)])
    with pytest.raises(ReconstructionError, match="gradient tie"):
        reconstruct_continuation(marginal_oracle(tangent, path))


def test_continuation_input_checks():
    disc = BodySample([Ball((0, 0), 1)], [1.0])
    with pytest.raises(ValidationError):
        reconstruct_continuation(marginal_oracle(disc, circle(6)))
    uneven = [(math.cos(t), math.sin(t)) for t in np.linspace(0, 6, 20) ** 1.1 / 6**0.1]
    with pytest.raises(ValidationError):
        reconstruct_continuation(marginal_oracle(disc, uneven))
    with pytest.raises(ValidationError):
        reconstruct_continuation(marginal_oracle(BodySample([Interval(0, 1)], [1]), ENDS))


def test_multiset_form_ignores_order():
    a = reconstruct_distinct_probs(marginal_oracle(TWO, ENDS))
    flipped = BodySample([Interval(2, 5), Interval(0, 1)], [Fraction(7, 10), Fraction(3, 10)])
    b = reconstruct_distinct_probs(marginal_oracle(flipped, ENDS))
    assert a.as_multiset() == b.as_multiset()
