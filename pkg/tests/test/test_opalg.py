import numpy as np
import pytest
from numpy.testing import assert_allclose

from opalg import (InvalidOperatorError, Operator, OperatorMismatchError,
                   anticommutator, basis_projector, bosonic_ops, commutator,
                   dagger, dissipator_apply, embed_mode, embed_system,
                   identity, is_density_matrix, kron, partial_trace_mode,
                   pauli, random_density, random_hermitian, spectral_norm,
                   spin_site)


class TestOperator:
    def setup_method(self):
        self.x = pauli("x")
        self.z = pauli("z")

    def test_data_is_read_only(self):
        with pytest.raises(ValueError):
            self.x.data[0, 0] = 5

    def test_non_square_rejected(self):
        with pytest.raises(InvalidOperatorError):
            Operator(np.zeros((2, 3)))

    def test_arithmetic_keeps_space(self):
        result = 2.0 * self.x + self.z @ self.x - self.z / 2
        assert result.space == "spin"
        assert_allclose(result.data,
                        2 * self.x.data + self.z.data @ self.x.data
                        - self.z.data / 2)

    def test_mismatched_dims_raise(self):
        with pytest.raises(OperatorMismatchError):
            self.x @ identity(3, "spin")

    def test_mismatched_spaces_raise(self):
        with pytest.raises(OperatorMismatchError):
            self.x + identity(2, "atom")

    def test_hermitian_checks(self):
        assert self.x.is_hermitian()
        assert not pauli("+").is_hermitian()
        assert identity(3).is_scalar()
        assert not self.z.is_scalar()


class TestAlgebra:
    def test_pauli_commutator(self):
        assert commutator(pauli("x"), pauli("y")).allclose(
            2j * pauli("z"))

    def test_pauli_anticommutator(self):
        assert anticommutator(pauli("x"), pauli("x")).allclose(
            2 * pauli("i"))

    def test_raising_lowering_convention(self):
        up = basis_projector(0, 2, "spin")
        assert (pauli("+") @ pauli("-")).allclose(up)
        assert pauli("z").allclose(pauli("+") @ pauli("-")
                                   - pauli("-") @ pauli("+"))

    def test_unknown_pauli(self):
        with pytest.raises(InvalidOperatorError):
            pauli("w")

    def test_bosonic_commutator_away_from_edge(self):
        a, adag, n = bosonic_ops(6)
        c = commutator(a, adag).data
        assert_allclose(np.diag(c)[:-1], np.ones(5))
        assert_allclose(np.diag(c)[-1], -5)
        assert (adag @ a).allclose(n)

    def test_bosonic_cutoff_validated(self):
        with pytest.raises(InvalidOperatorError):
            bosonic_ops(1)

    def test_kron_tags_and_order(self):
        a, _, _ = bosonic_ops(3, "mode")
        composite = kron(pauli("z"), a)
        assert composite.space == "spin⊗mode"
        assert composite.dim == 6
        assert_allclose(composite.data, np.kron(pauli("z").data, a.data))

    def test_spin_site_embedding(self):
        z2 = spin_site("z", 2, 3)
        assert z2.space == "spin^3"
        expected = np.kron(np.kron(np.eye(2), pauli("z").data), np.eye(2))
        assert_allclose(z2.data, expected)
        with pytest.raises(InvalidOperatorError):
            spin_site("z", 4, 3)

    def test_spin_sites_commute(self):
        assert commutator(spin_site("x", 1, 3),
                          spin_site("z", 2, 3)).allclose(
            identity(8, "spin^3") * 0)

    def test_embeddings(self):
        a, _, _ = bosonic_ops(3, "mode")
        left = embed_system(pauli("x"), 3, "mode")
        right = embed_mode(a, 2, "spin")
        assert left.space == right.space == "spin⊗mode"
        assert commutator(left, right).allclose(
            kron(pauli("i"), a) * 0)

    def test_dagger(self):
        assert dagger(pauli("+")).allclose(pauli("-"))

    def test_kron_is_associative(self):
        rng = np.random.default_rng(11)
        A, B, C = (random_hermitian(d, rng, s)
                   for d, s in ((2, "a"), (3, "b"), (2, "c")))
        left = kron(kron(A, B), C)
        right = kron(A, kron(B, C))
        assert left.space == right.space == "a⊗b⊗c"
        assert left.allclose(right, atol=1e-14)

    def test_jacobi_identity(self):
        rng = np.random.default_rng(12)
        A, B, C = (Operator(rng.normal(size=(4, 4))
                            + 1j * rng.normal(size=(4, 4)))
                   for _ in range(3))
        total = (commutator(A, commutator(B, C))
                 + commutator(B, commutator(C, A))
                 + commutator(C, commutator(A, B)))
        assert spectral_norm(total) < 1e-10


class TestStates:
    def test_partial_trace_of_product(self):
        rho_s = random_density(2, 1, "spin")
        rho_m = random_density(3, 2, "mode")
        reduced = partial_trace_mode(kron(rho_s, rho_m), 2, 3, "spin")
        assert reduced.allclose(rho_s, atol=1e-12)

    def test_partial_trace_dim_check(self):
        with pytest.raises(OperatorMismatchError):
            partial_trace_mode(identity(5), 2, 3)

    def test_random_density_is_valid(self):
        rho = random_density(5, 7)
        assert is_density_matrix(rho)

    def test_random_hermitian(self):
        assert random_hermitian(4, 3).is_hermitian()

    def test_dissipator_is_traceless(self):
        rng = np.random.default_rng(4)
        rho = random_density(4, rng)
        O = Operator(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
        assert abs(dissipator_apply(O, rho).trace()) < 1e-12

    def test_vacuum_is_dark_for_lowering(self):
        a, _, _ = bosonic_ops(4)
        vacuum = basis_projector(0, 4, "mode")
        assert spectral_norm(dissipator_apply(a, vacuum)) == 0.0

    def test_spectral_norm(self):
        assert spectral_norm(identity(3) * 0) == 0.0
        _, _, n = bosonic_ops(5)
        assert spectral_norm(n) == pytest.approx(4.0)

    def test_spectral_norm_is_submultiplicative(self):
        rng = np.random.default_rng(13)
        for _ in range(5):
            A, B = (Operator(rng.normal(size=(5, 5))
                             + 1j * rng.normal(size=(5, 5)))
                    for _ in range(2))
            assert spectral_norm(A @ B) \
                <= spectral_norm(A) * spectral_norm(B) * (1 + 1e-12)
