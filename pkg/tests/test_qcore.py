import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decompq import qcore
from decompq.errors import NotAStateError, ValidationError

from oracles import charpoly_eigenvalues, entropy_bits


def random_hermitian(rng, n, scale=1.0):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * 0.5 * (a + a.conj().T)


def random_density(rng, n, rank=None):
    rank = n if rank is None else rank
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


class TestJacobi:
    def test_matches_charpoly_roots(self):
        rng = np.random.default_rng(7)
        for n in range(1, 6):
            a = random_hermitian(rng, n)
            w, _ = qcore.jacobi_eigh(a)
            np.testing.assert_allclose(w, charpoly_eigenvalues(a), atol=1e-9)

    def test_matches_lapack(self):
        rng = np.random.default_rng(8)
        a = random_hermitian(rng, 30)
        w, _ = qcore.jacobi_eigh(a)
        np.testing.assert_allclose(w, np.linalg.eigvalsh(a)[::-1], atol=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 8), st.integers(0, 2**32 - 1))
    def test_eigenpairs_and_unitarity(self, n, seed):
        a = random_hermitian(np.random.default_rng(seed), n)
        w, v = qcore.jacobi_eigh(a)
        assert np.all(np.diff(w) <= 0)
        np.testing.assert_allclose(v.conj().T @ v, np.eye(n), atol=1e-12)
        np.testing.assert_allclose(a @ v, v * w, atol=1e-11)

    def test_degenerate_and_diagonal(self):
        np.testing.assert_allclose(qcore.jacobi_eigh(np.eye(4))[0], np.ones(4))
        w, v = qcore.jacobi_eigh(np.diag([1.0, 3.0, 2.0]))
        np.testing.assert_allclose(w, [3.0, 2.0, 1.0])
        np.testing.assert_allclose(np.abs(v[:, 0]), [0, 1, 0])

    def test_complex_phases(self):
        # sigma_y has eigenvalues +-1 with complex eigenvectors
        w, v = qcore.jacobi_eigh(np.array([[0, -1j], [1j, 0]]))
        np.testing.assert_allclose(w, [1.0, -1.0], atol=1e-15)
        np.testing.assert_allclose(np.abs(v[:, 0]), [1 / math.sqrt(2)] * 2)

    def test_zero_matrix(self):
        w, v = qcore.jacobi_eigh(np.zeros((3, 3)))
        np.testing.assert_array_equal(w, 0.0)
        np.testing.assert_array_equal(v, np.eye(3))

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError):
            qcore.jacobi_eigh(np.array([[0, 1], [0, 0]]))

    def test_lapack_solver_agrees(self):
        a = random_hermitian(np.random.default_rng(3), 6)
        np.testing.assert_allclose(qcore.hermitian_eigenvalues(a, "lapack"),
                                   qcore.hermitian_eigenvalues(a), atol=1e-12)
        with pytest.raises(ValidationError):
            qcore.hermitian_eigenvalues(a, "qr")


class TestEntropy:
    def test_maximally_mixed(self):
        for d in (2, 3, 8):
            assert qcore.von_neumann_entropy(np.eye(d) / d) == pytest.approx(math.log2(d), abs=1e-13)

    def test_pure_state_is_zero(self):
        rho = qcore.pure_density(qcore.normalize([1, 1j, 2]))
        assert qcore.von_neumann_entropy(rho) == pytest.approx(0.0, abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 6), st.integers(0, 2**32 - 1))
    def test_against_lapack_oracle(self, d, seed):
        rho = random_density(np.random.default_rng(seed), d)
        assert qcore.von_neumann_entropy(rho) == pytest.approx(entropy_bits(rho), abs=1e-12)
        assert 0.0 <= qcore.von_neumann_entropy(rho) <= math.log2(d) + 1e-12

    def test_small_negative_eigenvalue_clamped(self):
        rho = np.diag([1.0 + 5e-11, -5e-11])
        assert qcore.von_neumann_entropy(rho) == pytest.approx(0.0, abs=1e-9)

    def test_negative_eigenvalue_rejected(self):
        with pytest.raises(NotAStateError):
            qcore.von_neumann_entropy(np.diag([1.1, -0.1]))

    def test_trace_checked(self):
        with pytest.raises(NotAStateError):
            qcore.von_neumann_entropy(np.eye(2))

    def test_shannon(self):
        assert qcore.shannon_entropy([0.25] * 4) == 2.0
        assert qcore.shannon_entropy([1.0, 0.0]) == 0.0
        assert math.copysign(1.0, qcore.shannon_entropy([1.0])) == 1.0


class TestStates:
    def test_as_ket_normalization(self):
        with pytest.raises(ValidationError):
            qcore.as_ket([1.0, 1.0])
        with pytest.raises(ValidationError):
            qcore.as_ket([[1.0]])
        with pytest.raises(ValidationError):
            qcore.normalize([0.0, 0.0])

    def test_as_density(self):
        rho = random_density(np.random.default_rng(1), 3, rank=2)
        np.testing.assert_allclose(qcore.as_density(rho), rho, atol=1e-15)
        with pytest.raises(ValidationError):
            qcore.as_density(np.ones((2, 3)))
        with pytest.raises(ValidationError):
            qcore.as_density(np.array([[0.5, 0.5], [0.0, 0.5]]))

    def test_fubini_study(self):
        assert qcore.fubini_study_angle([1, 0], [0, 1]) == pytest.approx(math.pi / 2)
        assert qcore.fubini_study_angle([1, 0], [1j, 0]) == 0.0
        s = 1 / math.sqrt(2)
        assert qcore.fubini_study_angle([1, 0], [s, s]) == pytest.approx(math.pi / 4)
        with pytest.raises(ValidationError):
            qcore.fubini_study_angle([1, 0], [1, 0, 0])


class TestPartialTrace:
    def test_product_state(self):
        rng = np.random.default_rng(4)
        rs, re = random_density(rng, 2), random_density(rng, 3)
        np.testing.assert_allclose(qcore.partial_trace_env(np.kron(rs, re), 2, 3), rs, atol=1e-14)

    def test_bell_state_is_maximally_mixed(self):
        psi = np.array([1, 0, 0, 1]) / math.sqrt(2)
        red = qcore.partial_trace_env(np.outer(psi, psi), 2, 2)
        np.testing.assert_allclose(red, np.eye(2) / 2, atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            qcore.partial_trace_env(np.eye(6) / 6, 4, 2)
