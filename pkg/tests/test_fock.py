import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaussbounds.fock import (
    DimensionError,
    FockState,
    NotAStateError,
    entropy_from_eigenvalues,
    fock_projector,
    g,
    g_inverse,
    ladder_operator,
    mean_photons,
    partial_trace,
    ptrace,
    renormalize,
    tensor,
    thermal_state,
    thermal_tail_cutoff,
    von_neumann_entropy,
)
from oracles import g_inverse_mp, g_mp, random_density

# values below are 50-digit mpmath evaluations of (E+1)ln(E+1) - E ln E
G_1 = 1.3862943611198906  # 2 ln 2
G_4 = 2.5020121176909393
G_1_5 = 1.6825291675231413


def test_frozen_g_values_match_mpmath():
    assert float(g_mp(1)) == pytest.approx(G_1, abs=1e-15)
    assert float(g_mp(4)) == pytest.approx(G_4, abs=1e-15)
    assert float(g_mp(1.5)) == pytest.approx(G_1_5, abs=1e-12)


class TestLadder:
    def test_two_levels(self):
        a = ladder_operator(2)
        expected = np.zeros((2, 2))
        expected[0, 1] = 1.0
        assert np.array_equal(a, expected)

    def test_three_levels_entry(self):
        assert ladder_operator(3)[1, 2] == pytest.approx(math.sqrt(2))

    def test_truncated_commutator(self):
        a = ladder_operator(10)
        comm = a @ a.conj().T - a.conj().T @ a
        expected = np.eye(10)
        expected[9, 9] = -9
        assert np.allclose(comm, expected, atol=1e-12)

    def test_number_operator_from_ladder(self):
        a = ladder_operator(6)
        assert np.allclose(np.diag(a.conj().T @ a).real, np.arange(6))

    @pytest.mark.parametrize("bad", [0, 1, 2.5])
    def test_bad_cutoff(self, bad):
        with pytest.raises(DimensionError):
            ladder_operator(bad)


class TestThermal:
    def test_vacuum(self):
        s = thermal_state(0.0, 7)
        assert s.trace_deficit == 0.0
        assert s.matrix[0, 0] == 1.0
        assert np.count_nonzero(s.matrix) == 1

    def test_two_levels(self):
        s = thermal_state(1.0, 2)
        assert np.allclose(np.diag(s.matrix).real, [0.5, 0.25])
        assert s.trace_deficit == pytest.approx(0.25)

    def test_high_cutoff_entropy(self):
        s = renormalize(thermal_state(1.0, 60))
        assert von_neumann_entropy(s) == pytest.approx(2 * math.log(2), abs=1e-8)

    def test_high_cutoff_mean(self):
        s = renormalize(thermal_state(1.0, 60))
        assert mean_photons(s) == pytest.approx(1.0, abs=1e-6)

    def test_negative_energy(self):
        with pytest.raises(ValueError):
            thermal_state(-0.1, 5)

    @given(st.floats(0.01, 5.0), st.integers(2, 60))
    def test_deficit_is_geometric_tail(self, E, D):
        s = thermal_state(E, D)
        assert s.trace_deficit == pytest.approx((E / (E + 1)) ** D, rel=1e-12)
        assert s.trace + s.trace_deficit == pytest.approx(1.0, abs=1e-12)


class TestEntropy:
    def test_pure(self):
        assert von_neumann_entropy(fock_projector([3], 6)) == 0.0

    def test_random_pure_is_zero(self):
        rng = np.random.default_rng(1)
        v = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        v /= np.linalg.norm(v)
        assert von_neumann_entropy(np.outer(v, v.conj())) == pytest.approx(0.0, abs=1e-10)

    def test_maximally_mixed_qubit(self):
        assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(math.log(2), abs=1e-15)

    def test_thermal_high_cutoff(self):
        assert von_neumann_entropy(thermal_state(1.0, 60)) == pytest.approx(1.386294, abs=1e-6)

    def test_negative_eigenvalue_rejected(self):
        with pytest.raises(NotAStateError):
            entropy_from_eigenvalues([1.1, -0.1])

    def test_tiny_negatives_clamped(self):
        assert entropy_from_eigenvalues([1.0, -1e-12, 1e-16]) == 0.0

    @given(st.integers(2, 8), st.integers(0, 2**32 - 1))
    def test_bounded_by_log_dimension(self, D, seed):
        rho = random_density(np.random.default_rng(seed), D)
        S = von_neumann_entropy(rho)
        assert 0.0 <= S <= math.log(D) + 1e-12

    @given(st.integers(0, 2**32 - 1))
    def test_additive_on_products(self, seed):
        rng = np.random.default_rng(seed)
        a = FockState.from_matrix(random_density(rng, 5))
        b = FockState.from_matrix(random_density(rng, 5, rank=2))
        assert von_neumann_entropy(tensor(a, b)) == pytest.approx(
            von_neumann_entropy(a) + von_neumann_entropy(b), abs=1e-9
        )

    def test_thermal_maximizes_entropy_at_fixed_energy(self):
        rng = np.random.default_rng(7)
        D = 12
        for _ in range(100):
            s = FockState.from_matrix(random_density(rng, D, rank=int(rng.integers(1, D + 1)), decay=rng.uniform(0.1, 0.9)))
            assert von_neumann_entropy(s) <= g(mean_photons(s)) + 1e-8


class TestG:
    def test_zero(self):
        assert g(0) == 0.0

    @pytest.mark.parametrize("E, expected", [(1.0, G_1), (4.0, G_4), (1.5, G_1_5)])
    def test_values(self, E, expected):
        assert g(E) == pytest.approx(expected, abs=1e-12)

    def test_array_matches_scalar(self):
        E = np.array([0.0, 1e-9, 0.5, 1.0, 4.0, 1e6])
        assert np.allclose(g(E), [g(float(e)) for e in E], rtol=1e-14, atol=0)

    @given(st.floats(1e-6, 1e4))
    def test_against_mpmath(self, E):
        assert g(E) == pytest.approx(float(g_mp(E)), rel=1e-13)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            g(-1.0)

    def test_strictly_increasing_and_concave(self):
        E = np.logspace(-6, 4, 400)
        v = g(E)
        d1 = np.diff(v) / np.diff(E)
        assert np.all(d1 > 0)
        assert np.all(np.diff(d1) < 0)

    @pytest.mark.parametrize("eta, E", [(0.0, 0.5), (0.2, 0.0), (0.5, 1.0), (0.8, 2.0), (1.0, 0.0), (0.3, 3.0)])
    def test_thermal_output_map_increasing_convex(self, eta, E):
        # x -> g(eta g^{-1}(x) + (1 - eta) E) is increasing and convex
        x = np.linspace(0.0, 10.0, 401)
        v = np.array([g(eta * g_inverse(t) + (1 - eta) * E) for t in x])
        assert np.all(np.diff(v) >= -1e-12)
        assert np.all(np.diff(v, 2) >= -1e-9)


class TestGInverse:
    def test_zero(self):
        assert g_inverse(0.0) == 0.0

    def test_round_trip(self):
        assert g_inverse(g(3.7)) == pytest.approx(3.7, abs=1e-9)

    def test_two_ln_two(self):
        assert g_inverse(2 * math.log(2)) == pytest.approx(1.0, abs=1e-9)

    @given(st.floats(0.0, 30.0))
    def test_g_of_inverse(self, x):
        assert g(g_inverse(x)) == pytest.approx(x, abs=1e-10)

    @given(st.floats(1e-3, 10.0))
    def test_against_mpmath(self, x):
        assert g_inverse(x) == pytest.approx(float(g_inverse_mp(x)), rel=1e-11)

    def test_vectorized(self):
        x = np.array([[0.0, 1.0], [2.0, 3.0]])
        out = g_inverse(x)
        assert out.shape == (2, 2)
        assert np.allclose(g(out), x, atol=1e-12)

    def test_negative(self):
        with pytest.raises(ValueError):
            g_inverse(-0.5)


class TestMeanPhotons:
    def test_vacuum(self):
        assert mean_photons(fock_projector([0], 5)) == 0.0

    def test_single_photon(self):
        assert mean_photons(fock_projector([1], 5)) == 1.0

    def test_per_mode(self):
        s = fock_projector([1, 3], 5)
        assert mean_photons(s) == 4.0
        assert mean_photons(s, per_mode=True) == 2.0


class TestTensorAndTrace:
    def test_vacuum_product(self):
        assert np.array_equal(tensor(fock_projector([0], 4), fock_projector([0], 4)).matrix, fock_projector([0, 0], 4).matrix)

    def test_product_reduction(self):
        rng = np.random.default_rng(3)
        rho = FockState.from_matrix(random_density(rng, 4))
        sigma = FockState.from_matrix(random_density(rng, 4, rank=1))
        joint = tensor(rho, sigma)
        assert np.allclose(partial_trace(joint, [0]).matrix, rho.matrix, atol=1e-12)
        assert np.allclose(partial_trace(joint, [1]).matrix, sigma.matrix, atol=1e-12)

    def test_maximally_entangled_qutrits(self):
        v = np.zeros(9)
        for k in range(3):
            v[k * 3 + k] = 1 / math.sqrt(3)
        joint = FockState.from_matrix(np.outer(v, v), modes=2)
        assert np.allclose(partial_trace(joint, [1]).matrix, np.eye(3) / 3, atol=1e-12)

    def test_trace_preserved(self):
        rng = np.random.default_rng(4)
        m = random_density(rng, 27)
        for keep in ([0], [1, 2], [0, 2]):
            assert np.trace(ptrace(m, [3, 3, 3], keep)).real == pytest.approx(1.0, abs=1e-13)

    def test_deficits_combine(self):
        a, b = thermal_state(1.0, 3), thermal_state(0.5, 3)
        t = tensor(a, b)
        assert t.trace + t.trace_deficit == pytest.approx(1.0, abs=1e-12)

    def test_bad_keep(self):
        with pytest.raises(DimensionError):
            ptrace(np.eye(4) / 4, [2, 2], [2])

    def test_cutoff_mismatch(self):
        with pytest.raises(DimensionError):
            tensor(fock_projector([0], 3), fock_projector([0], 4))


class TestFockStateChecks:
    def test_rejects_non_hermitian(self):
        m = np.array([[0.5, 0.1], [0.0, 0.5]], dtype=complex)
        with pytest.raises(NotAStateError):
            FockState(1, 2, m)

    def test_rejects_bad_trace(self):
        with pytest.raises(NotAStateError):
            FockState(1, 2, np.eye(2))

    def test_rejects_bad_shape(self):
        with pytest.raises(DimensionError):
            FockState(2, 3, np.eye(3) / 3)

    def test_validate_catches_negative_eigenvalue(self):
        m = np.diag([1.2, -0.2]).astype(complex)
        with pytest.raises(NotAStateError):
            FockState(1, 2, m).validate()

    def test_matrix_is_read_only(self):
        s = fock_projector([0], 3)
        with pytest.raises(ValueError):
            s.matrix[0, 0] = 2


def test_thermal_tail_cutoff():
    D = thermal_tail_cutoff(4.0, 1e-8)
    assert (0.8) ** D < 1e-8 <= 0.8 ** (D - 1)
    assert thermal_tail_cutoff(0.0, 1e-8) == 2
