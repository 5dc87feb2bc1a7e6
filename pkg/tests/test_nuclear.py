import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nucleatrace import (
    AmbientSpace,
    NuclearIndex,
    OperatorMatrix,
    Representation,
    Vector,
    build_from_factorization,
    improve_representation,
    induced_matrix,
    nuclear_trace,
    quasi_norm,
    rebalance,
    split_representation,
    trace_perturbation_bound,
    weak_norm,
    weak_norm_bracket,
)

L2 = lambda n: AmbientSpace(n, 2.0)


def diag_rep(lambdas, space):
    n = space.dim
    eye = np.eye(n)[: len(lambdas)]
    return Representation.from_arrays(lambdas, eye, eye, space, space)


def random_rep(rng, n, p, atoms=None):
    space = AmbientSpace(n, p)
    m = atoms if atoms is not None else n
    lam = np.sort(rng.uniform(0.0, 1.0, size=m))[::-1]
    F = rng.standard_normal((m, n))
    X = rng.standard_normal((m, n))
    return Representation.from_arrays(lam, F, X, space, space)


class TestNuclearIndex:
    def test_s_variant_range(self):
        NuclearIndex.absolutely_summable(1.0)
        NuclearIndex.absolutely_summable(0.1)
        with pytest.raises(ValueError):
            NuclearIndex.absolutely_summable(1.5)
        with pytest.raises(ValueError):
            NuclearIndex.absolutely_summable(0.0)

    def test_lorentz_admissibility(self):
        NuclearIndex.lorentz(0.5, 2.0)
        NuclearIndex.lorentz(0.5, math.inf)
        NuclearIndex.lorentz(1.0, 1.0)
        NuclearIndex.lorentz(1.0, 0.5)
        with pytest.raises(ValueError):
            NuclearIndex.lorentz(1.0, 2.0)  # r = 1 admits only w <= 1
        with pytest.raises(ValueError):
            NuclearIndex.lorentz(1.5, 1.0)

    def test_bracket_ranges(self):
        NuclearIndex.bracket_lower(1.0, 2.0)
        NuclearIndex.bracket_upper(0.5, 1.0)
        with pytest.raises(ValueError):
            NuclearIndex.bracket_lower(0.5, 3.0)
        with pytest.raises(ValueError):
            NuclearIndex.bracket_upper(2.0, 2.0)

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            NuclearIndex("WHATEVER", s=0.5)


class TestRepresentation:
    def test_sorts_and_drops_zeros(self):
        sp = L2(3)
        z = Representation.from_arrays(
            [0.0, 1.0, 2.0], np.eye(3), np.eye(3), sp, sp
        )
        np.testing.assert_array_equal(z.coefficients, [2.0, 1.0])
        assert z.atom_count == 2
        # atoms follow their coefficients through the sort
        assert z.functionals[0].coords[2] == 1.0

    def test_empty_representation(self):
        sp = L2(2)
        z = Representation.from_arrays([0.0], np.eye(2)[:1], np.eye(2)[:1], sp, sp)
        assert z.atom_count == 0
        np.testing.assert_array_equal(induced_matrix(z).entries, np.zeros((2, 2)))
        assert nuclear_trace(z) == 0.0

    def test_home_space_validation(self):
        sp = L2(2)
        wrong = AmbientSpace(2, 3.0)
        with pytest.raises(ValueError):
            Representation(
                np.array([1.0]),
                (Vector([1.0, 0.0], wrong),),
                (Vector([1.0, 0.0], sp),),
                sp,
                sp,
            )

    def test_negative_coefficient_rejected(self):
        sp = L2(2)
        with pytest.raises(ValueError):
            Representation.from_arrays(
                [-1.0], np.eye(2)[:1], np.eye(2)[:1], sp, sp
            )


class TestInducedMatrix:
    def test_rank_one_projector(self):
        z = diag_rep([1.0], L2(2))
        np.testing.assert_array_equal(
            induced_matrix(z).entries, [[1.0, 0.0], [0.0, 0.0]]
        )

    def test_nilpotent_shift(self):
        sp = L2(2)
        z = Representation.from_arrays(
            [1.0], [[1.0, 0.0]], [[0.0, 1.0]], sp, sp
        )
        np.testing.assert_array_equal(
            induced_matrix(z).entries, [[0.0, 0.0], [1.0, 0.0]]
        )

    def test_diagonal(self):
        z = diag_rep([0.5, 0.5], L2(2))
        np.testing.assert_array_equal(
            induced_matrix(z).entries, np.diag([0.5, 0.5])
        )


class TestNuclearTrace:
    def test_unit_atom(self):
        assert nuclear_trace(diag_rep([1.0], L2(2))) == 1.0

    def test_off_diagonal_atom(self):
        sp = L2(2)
        z = Representation.from_arrays([1.0], [[1.0, 0.0]], [[0.0, 1.0]], sp, sp)
        assert nuclear_trace(z) == 0.0

    def test_two_half_atoms(self):
        assert nuclear_trace(diag_rep([0.5, 0.5], L2(2))) == 1.0

    def test_rectangular_rejected(self):
        sp_in = L2(2)
        sp_out = L2(3)
        z = Representation.from_arrays(
            [1.0], [[1.0, 0.0]], [[1.0, 0.0, 0.0]], sp_in, sp_out
        )
        with pytest.raises(ValueError):
            nuclear_trace(z)


class TestSplit:
    def test_unit_fixed_point(self):
        z = diag_rep([1.0], L2(2))
        weights, scaled = split_representation(z, 2.0 / 3.0)
        assert weights.values[0] == 1.0
        np.testing.assert_array_equal(scaled[0].coords, [1.0, 0.0])

    def test_eighth_atom(self):
        z = diag_rep([0.125], L2(2))
        weights, scaled = split_representation(z, 2.0 / 3.0)
        assert weights.values[0] == 0.25  # (1/8)^(2/3) is exact in floats
        assert scaled[0].coords[0] == pytest.approx(0.5, rel=1e-15)

    def test_reassembly(self):
        rng = np.random.default_rng(11)
        z = random_rep(rng, 4, 2.0)
        weights, scaled = split_representation(z, 2.0 / 3.0)
        M = np.zeros((4, 4))
        for w, f, x in zip(weights.values, z.functionals, scaled):
            f_unit = f.coords / f.norm()
            M += w * np.outer(x.coords, f_unit)
        np.testing.assert_allclose(M, induced_matrix(z).entries, rtol=1e-12)

    def test_invalid_s(self):
        with pytest.raises(ValueError):
            split_representation(diag_rep([1.0], L2(2)), 0.0)


class TestQuasiNorm:
    def test_single_unit_atom(self):
        z = diag_rep([1.0], L2(2))
        assert quasi_norm(z, NuclearIndex.absolutely_summable(2.0 / 3.0)) == 1.0

    def test_two_atom_s_value(self):
        z = diag_rep([1.0, 0.125], L2(2))
        val = quasi_norm(z, NuclearIndex.absolutely_summable(2.0 / 3.0))
        assert val == pytest.approx(1.3975424859373686, rel=1e-14)

    def test_bracket_lower_single_atom(self):
        z = diag_rep([1.0], L2(2))
        assert quasi_norm(z, NuclearIndex.bracket_lower(2.0 / 3.0, 2.0)) == 1.0

    def test_lorentz_variant_uses_magnitudes(self):
        z = diag_rep([1.0, 0.5], L2(2))
        val = quasi_norm(z, NuclearIndex.lorentz(0.5, math.inf))
        # max(1^2 * 1, 2^2 * 0.5) = 2
        assert val == 2.0

    def test_empty_rep_zero(self):
        sp = L2(2)
        z = Representation.from_arrays([0.0], np.eye(2)[:1], np.eye(2)[:1], sp, sp)
        assert quasi_norm(z, NuclearIndex.absolutely_summable(0.5)) == 0.0
        assert quasi_norm(z, NuclearIndex.bracket_lower(1.0, 2.0)) == 0.0

    @given(st.integers(min_value=0, max_value=2 ** 31 - 1))
    @settings(max_examples=30, deadline=None)
    def test_bracket_pair_encloses_nothing_negative(self, seed):
        rng = np.random.default_rng(seed)
        z = random_rep(rng, 4, 2.0, atoms=3)
        lo = quasi_norm(z, NuclearIndex.bracket_lower(1.0, 2.0))
        hi = quasi_norm(z, NuclearIndex.bracket_upper(1.0, 2.0))
        assert lo >= 0.0 and hi >= 0.0


class TestWeakNorm:
    def test_single_vector(self):
        v = Vector([3.0, 4.0], L2(2))
        assert weak_norm([v], 1.7) == 5.0

    def test_orthonormal_pair(self):
        sp = L2(3)
        vs = [Vector([1.0, 0.0, 0.0], sp), Vector([0.0, 1.0, 0.0], sp)]
        assert weak_norm(vs, 2.0) == pytest.approx(1.0, rel=1e-12)

    def test_repeated_vector(self):
        sp = L2(3)
        vs = [Vector([1.0, 0.0, 0.0], sp)] * 2
        assert weak_norm(vs, 2.0) == pytest.approx(math.sqrt(2.0), rel=1e-12)

    def test_bracket_sound(self):
        rng = np.random.default_rng(5)
        sp = AmbientSpace(4, 3.0)
        vs = [Vector(rng.standard_normal(4), sp) for _ in range(3)]
        lo, hi = weak_norm_bracket(vs, 1.5)
        assert 0.0 < lo <= hi
        crude = sum(v.norm() ** 1.5 for v in vs) ** (1.0 / 1.5)
        assert hi <= crude + 1e-12

    def test_mixed_homes_rejected(self):
        vs = [Vector([1.0, 0.0], L2(2)), Vector([1.0], L2(1))]
        with pytest.raises(ValueError):
            weak_norm(vs, 2.0)


class TestBuildFromFactorization:
    def test_diagonal_diagram(self):
        mid = AmbientSpace(2, math.inf)
        dom = L2(2)
        A = OperatorMatrix(np.eye(2), dom, mid)
        B = OperatorMatrix(np.eye(2), AmbientSpace(2, 2.0), dom)
        rep, mat = build_from_factorization(A, [0.5, 0.25], B, "lower")
        np.testing.assert_array_equal(rep.coefficients, [0.5, 0.25])
        np.testing.assert_array_equal(mat.entries, np.diag([0.5, 0.25]))

    def test_zero_diagonal(self):
        mid = AmbientSpace(2, math.inf)
        dom = L2(2)
        A = OperatorMatrix(np.eye(2), dom, mid)
        B = OperatorMatrix(np.eye(2), AmbientSpace(2, 1.5), dom)
        rep, mat = build_from_factorization(A, [0.0, 0.0], B, "lower")
        assert rep.atom_count == 0
        assert not np.any(mat.entries)

    def test_triangular_product(self):
        mid = AmbientSpace(2, math.inf)
        dom = L2(2)
        A = OperatorMatrix(np.array([[1.0, 1.0], [0.0, 1.0]]), dom, mid)
        B = OperatorMatrix(np.eye(2), AmbientSpace(2, 2.0), dom)
        _, mat = build_from_factorization(A, [1.0, 0.5], B, "lower")
        np.testing.assert_array_equal(mat.entries, [[1.0, 1.0], [0.0, 0.5]])

    def test_matches_direct_product(self):
        rng = np.random.default_rng(3)
        m, n_in, n_out = 4, 3, 5
        dom = AmbientSpace(n_in, 2.0)
        mid_out = AmbientSpace(m, math.inf)
        mid_in = AmbientSpace(m, 2.0)
        cod = AmbientSpace(n_out, 2.0)
        A = OperatorMatrix(rng.standard_normal((m, n_in)), dom, mid_out)
        B = OperatorMatrix(rng.standard_normal((n_out, m)), mid_in, cod)
        d = np.sort(rng.uniform(0.0, 1.0, m))[::-1]
        rep, mat = build_from_factorization(A, d, B, "lower")
        oracle = (B.entries * d) @ A.entries
        np.testing.assert_allclose(mat.entries, oracle, rtol=1e-15)
        np.testing.assert_array_equal(
            induced_matrix(rep).entries, mat.entries
        )

    def test_mode_validation(self):
        dom = L2(2)
        mid_l2 = AmbientSpace(2, 2.0)
        A = OperatorMatrix(np.eye(2), dom, mid_l2)
        B = OperatorMatrix(np.eye(2), mid_l2, dom)
        with pytest.raises(ValueError):
            build_from_factorization(A, [1.0, 0.5], B, "lower")  # mid not inf
        with pytest.raises(ValueError):
            build_from_factorization(A, [1.0, 0.5], B, "upper")  # B not from l1
        with pytest.raises(ValueError):
            build_from_factorization(A, [1.0, 0.5], B, "sideways")

    def test_upper_mode(self):
        dom = L2(2)
        mid_out = AmbientSpace(2, 4.0)
        mid_in = AmbientSpace(2, 1.0)
        A = OperatorMatrix(np.eye(2), dom, mid_out)
        B = OperatorMatrix(np.eye(2), mid_in, dom)
        rep, mat = build_from_factorization(A, [1.0, 0.5], B, "upper")
        np.testing.assert_array_equal(mat.entries, np.diag([1.0, 0.5]))


class TestTracePerturbation:
    def test_identity_perturbation(self):
        z = diag_rep([1.0, 0.5], L2(2))
        R = OperatorMatrix.identity(L2(2))
        defect, bound = trace_perturbation_bound(z, R, 2.0 / 3.0)
        assert defect == 0.0 and bound == 0.0

    def test_zero_perturbation_unit_atom(self):
        z = diag_rep([1.0], L2(2))
        R = OperatorMatrix(np.zeros((2, 2)), L2(2), L2(2))
        defect, bound = trace_perturbation_bound(z, R, 2.0 / 3.0)
        assert defect == 1.0
        assert bound == 1.0

    def test_nilpotent_atom_slack(self):
        sp = L2(2)
        z = Representation.from_arrays([1.0], [[1.0, 0.0]], [[0.0, 1.0]], sp, sp)
        R = OperatorMatrix(np.zeros((2, 2)), sp, sp)
        defect, bound = trace_perturbation_bound(z, R, 2.0 / 3.0)
        assert defect == 0.0
        assert bound == 1.0

    @given(
        st.integers(min_value=0, max_value=2 ** 31 - 1),
        st.sampled_from([0.5, 2.0 / 3.0, 0.9, 1.0]),
        st.sampled_from([1.0, 1.5, 2.0, 4.0, math.inf]),
    )
    @settings(max_examples=100, deadline=None)
    def test_defect_below_bound(self, seed, s, p):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 7))
        z = random_rep(rng, n, p, atoms=int(rng.integers(1, 5)))
        R = OperatorMatrix(
            rng.standard_normal((n, n)), z.codomain, z.codomain
        )
        defect, bound = trace_perturbation_bound(z, R, s)
        assert defect <= bound + 1e-10


class TestRebalance:
    def test_matrix_invariant(self):
        rng = np.random.default_rng(9)
        z = random_rep(rng, 4, 1.5)
        zb = rebalance(z)
        np.testing.assert_allclose(
            induced_matrix(zb).entries, induced_matrix(z).entries, rtol=1e-12
        )
        for f in zb.functionals:
            assert f.norm() == pytest.approx(1.0, rel=1e-12)
        for x in zb.vectors:
            assert x.norm() == pytest.approx(1.0, rel=1e-12)

    def test_magnitude_quasi_norms_invariant(self):
        rng = np.random.default_rng(13)
        z = random_rep(rng, 3, 2.0)
        zb = rebalance(z)
        idx = NuclearIndex.absolutely_summable(2.0 / 3.0)
        assert quasi_norm(zb, idx) == pytest.approx(
            quasi_norm(z, idx), rel=1e-12
        )

    def test_zero_vector_atom_dropped(self):
        sp = L2(2)
        z = Representation.from_arrays(
            [1.0, 0.5], [[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 0.0]], sp, sp
        )
        zb = rebalance(z)
        assert zb.atom_count == 1


class TestImprove:
    def test_never_increases_bracket_value(self):
        rng = np.random.default_rng(21)
        idx = NuclearIndex.bracket_lower(1.0, 2.0)
        for _ in range(5):
            z = random_rep(rng, 3, 2.0, atoms=3)
            improved, before, after = improve_representation(z, idx, sweeps=1)
            assert after <= before + 1e-9 * max(1.0, before)
            np.testing.assert_allclose(
                induced_matrix(improved).entries,
                induced_matrix(z).entries,
                rtol=1e-9,
                atol=1e-12,
            )

    def test_magnitude_variant_rebalances(self):
        rng = np.random.default_rng(22)
        z = random_rep(rng, 3, 2.0)
        idx = NuclearIndex.absolutely_summable(0.5)
        improved, before, after = improve_representation(z, idx)
        assert after == pytest.approx(before, rel=1e-12)
