import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nucleatrace import (
    AmbientSpace,
    Vector,
    build_approximant,
    projection_growth_exponent,
    select_rank,
)


def scan_oracle(norms, epsilon, alpha):
    # brute force: smallest N with every stored tail entry under the budget
    L = len(norms)
    for N in range(1, L + 2):
        bound = epsilon / (N ** alpha + 1.0)
        if all(norms[n - 1] <= bound for n in range(N, L + 1)):
            return N
    return L + 1


def coordinate_system(dim, p, decay):
    space = AmbientSpace(dim, p)
    xs = []
    for n in range(1, dim + 1):
        e = np.zeros(dim)
        e[n - 1] = float(n) ** (-decay)
        xs.append(Vector(e, space))
    return xs, space


class TestSelectRank:
    def test_harmonic_tail_cutoff(self):
        norms = [1.0 / n for n in range(1, 257)]
        assert select_rank(norms, 0.1, 0.5) == 120
        # the scan really needs 120: the previous cutoff fails
        assert 1.0 / 119 > 0.1 / (119 ** 0.5 + 1.0)
        assert 1.0 / 120 <= 0.1 / (120 ** 0.5 + 1.0)

    def test_flat_alpha(self):
        norms = [1.0 / n for n in range(1, 257)]
        assert select_rank(norms, 0.5, 0.0) == 4

    def test_all_zero(self):
        assert select_rank([0.0, 0.0, 0.0], 0.1, 0.5) == 1

    def test_no_cutoff_in_list(self):
        assert select_rank([1.0, 1.0, 1.0], 0.1, 0.0) == 4

    def test_validation(self):
        with pytest.raises(ValueError):
            select_rank([1.0], 0.0, 0.5)
        with pytest.raises(ValueError):
            select_rank([1.0], 0.1, 0.6)
        with pytest.raises(ValueError):
            select_rank([0.5, 1.0], 0.1, 0.5)  # increasing
        with pytest.raises(ValueError):
            select_rank([1.0, -1.0], 0.1, 0.5)

    @given(
        st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=1, max_size=40),
        st.floats(min_value=0.01, max_value=5.0),
        st.sampled_from([0.0, 0.25, 0.5]),
    )
    @settings(max_examples=200)
    def test_matches_scan_oracle(self, raw, epsilon, alpha):
        norms = sorted(raw, reverse=True)
        assert select_rank(norms, epsilon, alpha) == scan_oracle(
            norms, epsilon, alpha
        )


class TestBuildApproximant:
    def test_single_vector_fixed(self):
        space = AmbientSpace(4, 2.0)
        xs = [Vector([1.0, 0.0, 0.0, 0.0], space)]
        R, cert = build_approximant(xs, 0.3, space, 0.5)
        np.testing.assert_allclose(
            R.entries @ xs[0].coords, xs[0].coords, atol=1e-14
        )
        assert cert.sup_error <= 1e-12
        # A unit vector exceeds eps/(1 + 1) = 0.15, so no cutoff in range
        # qualifies and the selector falls back to length + 1.
        assert cert.cutoff == 2
        assert cert.rank == 1
        assert not cert.guarantee_regime

    def test_single_vector_within_guarantee(self):
        space = AmbientSpace(4, 2.0)
        xs = [Vector([0.1, 0.0, 0.0, 0.0], space)]
        _, cert = build_approximant(xs, 0.3, space, 0.5)
        assert cert.cutoff == 1
        assert cert.guarantee_regime
        assert cert.sup_error <= 1e-12

    def test_coordinate_family_frozen_values(self):
        xs, space = coordinate_system(256, 2.0, 1.0)
        R, cert = build_approximant(xs, 0.1, space, 0.5)
        assert cert.cutoff == 120
        assert cert.rank == 120
        # projection onto the leading coordinates, exactly norm one on l_2
        assert cert.projection_norm_bracket == (1.0, 1.0)
        assert cert.sup_error == pytest.approx(1.0 / 121.0, rel=1e-12)
        assert cert.guarantee_regime
        diag = np.diag(R.entries)
        assert np.sum(diag > 0.5) == 120

    def test_slow_decay_exits_guarantee_regime(self):
        xs, space = coordinate_system(64, 2.0, 0.3)
        R, cert = build_approximant(xs, 0.01, space, 0.5)
        assert cert.cutoff == 65  # beyond the stored list
        assert not cert.guarantee_regime
        assert cert.sup_error >= 0.0

    def test_unsorted_input_is_sorted_internally(self):
        space = AmbientSpace(8, 2.0)
        rng = np.random.default_rng(4)
        xs, _ = coordinate_system(8, 2.0, 1.0)
        perm = rng.permutation(8)
        shuffled = [xs[i] for i in perm]
        _, cert_sorted = build_approximant(xs, 0.4, space, 0.5)
        _, cert_shuffled = build_approximant(shuffled, 0.4, space, 0.5)
        assert cert_sorted.cutoff == cert_shuffled.cutoff
        assert cert_shuffled.sup_error == pytest.approx(
            cert_sorted.sup_error, rel=1e-12
        )
        assert list(cert_shuffled.order) == list(np.argsort(perm, kind="stable"))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            build_approximant([], 0.1, AmbientSpace(2, 2.0), 0.5)

    @given(
        st.integers(min_value=0, max_value=2 ** 31 - 1),
        st.floats(min_value=0.6, max_value=2.5),
    )
    @settings(max_examples=40, deadline=None)
    def test_guarantee_regime_meets_epsilon(self, seed, decay):
        rng = np.random.default_rng(seed)
        dim = 32
        space = AmbientSpace(dim, 2.0)
        xs = []
        for n in range(1, dim + 1):
            g = rng.standard_normal(dim)
            g /= np.linalg.norm(g)
            xs.append(Vector(float(n) ** (-decay) * g, space))
        _, cert = build_approximant(xs, 0.2, space, 0.5)
        if cert.guarantee_regime:
            assert cert.sup_error <= 0.2 + 1e-10


class TestGrowthExponent:
    @pytest.mark.parametrize(
        "p,expected",
        [(1.0, 0.5), (2.0, 0.0), (4.0, 0.25), (math.inf, 0.5)],
    )
    def test_values(self, p, expected):
        assert projection_growth_exponent(p) == pytest.approx(expected, abs=1e-15)

    def test_rejects_bad_p(self):
        with pytest.raises(ValueError):
            projection_growth_exponent(0.9)
