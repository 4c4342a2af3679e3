import logging

import numpy as np
import pytest
from numpy.testing import assert_allclose

from analytics import rabi_shifts
from eliminate import alpha_optomech_weak, alpha_rabi, solve_alpha_steady
from liouville import (AlphaInconsistentError, DenseCapExceededError,
                       InvalidSpecError, SystemSpec, apply_liouvillian,
                       build_effective_liouvillian, build_full_liouvillian,
                       composite_hamiltonian, displacement_norm,
                       effective_hamiltonian, generator_defects,
                       lindblad_superop, unvec, vec)
from models import (IsingCavityParams, OptomechParams, RabiParams,
                    make_ising_cavity, make_optomech, make_rabi)
from opalg import (Operator, bosonic_ops, dagger, identity, kron, pauli,
                   random_density, random_hermitian)


def rabi_spec(nbar=0.0, g=0.1):
    return make_rabi(RabiParams(omega0=3.0, omega_c=2.5, g=g, kappa=1.0,
                                nbar=nbar))


class TestVectorization:
    def test_vec_is_column_stacking(self):
        x = np.arange(4).reshape(2, 2)
        assert_allclose(vec(x), [0, 2, 1, 3])
        assert_allclose(unvec(vec(x), 2), x)

    def test_sandwich_identity(self):
        rng = np.random.default_rng(0)
        A, X, B = (rng.normal(size=(3, 3)) for _ in range(3))
        assert_allclose(vec(A @ X @ B), np.kron(B.T, A) @ vec(X),
                        atol=1e-12)


class TestSystemSpec:
    def test_rejects_non_hermitian_hamiltonian(self):
        with pytest.raises(InvalidSpecError):
            SystemSpec(H_S=pauli("+"), Omega_S=identity(2, "spin"),
                       S=pauli("x"), kappa=1.0)

    def test_rejects_nonpositive_kappa(self):
        with pytest.raises(InvalidSpecError):
            SystemSpec(H_S=pauli("z"), Omega_S=identity(2, "spin"),
                       S=pauli("x"), kappa=0.0)

    def test_rejects_negative_nbar(self):
        with pytest.raises(InvalidSpecError):
            rabi_spec().with_nbar(-1.0)

    def test_rejects_mismatched_dims(self):
        with pytest.raises(InvalidSpecError):
            SystemSpec(H_S=pauli("z"), Omega_S=identity(3, "spin"),
                       S=pauli("x"), kappa=1.0)

    def test_with_nbar(self):
        spec = rabi_spec().with_nbar(2)
        assert spec.nbar == 2.0
        assert spec.dim == 2


class TestGenerators:
    def test_matrix_and_action_agree(self):
        rng = np.random.default_rng(1)
        H = random_hermitian(3, rng)
        O = Operator(rng.normal(size=(3, 3)))
        superop = lindblad_superop(H, [(0.7, O), (0.2, dagger(O))])
        rho = random_density(3, rng)
        assert_allclose(superop.apply(rho, matrix_free=False).data,
                        superop.apply(rho).data, atol=1e-12)

    def test_full_dimensions(self):
        full = build_full_liouvillian(rabi_spec(), 4)
        assert full.dim == 8
        assert full.liouville_dim == 64
        assert full.space == "atom⊗cavity"
        assert full.meta["cutoff"] == 4

    def test_cutoff_validated(self):
        with pytest.raises(InvalidSpecError):
            build_full_liouvillian(rabi_spec(), 1)

    def test_composite_hamiltonian_is_hermitian(self):
        spec = make_optomech(OptomechParams(omega0=0.5, Delta=-1.0, g=0.1,
                                            eta=0.1, M=4))
        assert composite_hamiltonian(spec, 3).is_hermitian()

    @pytest.mark.parametrize("nbar", [0.0, 1.0])
    def test_full_generator_preserves_trace_and_hermiticity(self, nbar):
        defects = generator_defects(build_full_liouvillian(rabi_spec(nbar),
                                                           3))
        assert defects.trace <= 1e-10
        assert defects.hermiticity <= 1e-10

    def test_effective_generators_preserve_trace_and_hermiticity(self):
        ising = make_ising_cavity(IsingCavityParams(N=3, h=1.0, J=5.0,
                                                    g=0.3, omega_c=2.0))
        for spec in (rabi_spec(1.0), ising):
            superop, _ = build_effective_liouvillian(
                spec, solve_alpha_steady(spec))
            defects = generator_defects(superop)
            assert defects.trace <= 1e-10
            assert defects.hermiticity <= 1e-10

    def test_dense_cap(self):
        full = build_full_liouvillian(rabi_spec(), 6)
        with pytest.raises(DenseCapExceededError):
            full.dense(cap=100)
        assert full.dense().shape == (144, 144)

    def test_matrix_free_superop_has_no_sparse_form(self):
        full = build_full_liouvillian(rabi_spec(), 3, build_matrix=False)
        assert not full.has_matrix
        with pytest.raises(DenseCapExceededError):
            full.sparse

    def test_apply_liouvillian_from_spec(self):
        spec = rabi_spec(1.0)
        rho = random_density(6, 3, "atom⊗cavity")
        expected = build_full_liouvillian(spec, 3).apply(rho)
        assert apply_liouvillian(spec, rho).allclose(expected, atol=1e-12)

    def test_full_damping_of_bare_mode(self):
        # zero coupling: the photon number decays at rate 2 kappa
        spec = make_rabi(RabiParams(omega0=1.0, omega_c=1.0, g=0.0))
        full = build_full_liouvillian(spec, 3)
        _, _, n = bosonic_ops(3, "cavity")
        rho = kron(Operator(np.eye(2) / 2, "atom"),
                   Operator(np.diag([0.0, 1.0, 0.0]), "cavity"))
        rate = full.apply(rho).data
        number = kron(identity(2, "atom"), n)
        assert np.trace(number.data @ rate).real == pytest.approx(-2.0)


class TestEffectiveHamiltonian:
    def test_zero_occupation_expression(self):
        spec = rabi_spec()
        solution = alpha_rabi(3.0, 2.5, 0.1, 1.0)
        a = solution.alpha
        expected = spec.H_S + 0.5 * (dagger(a) @ spec.S
                                     + dagger(spec.S) @ a)
        assert effective_hamiltonian(spec, solution).allclose(expected,
                                                               atol=0)

    def test_zero_occupation_model_has_no_up_jump(self):
        superop, model = build_effective_liouvillian(
            rabi_spec(), alpha_rabi(3.0, 2.5, 0.1, 1.0))
        assert model.rate_up == 0.0
        assert model.rate_down == 1.0
        assert model.nbar == 0.0

    @pytest.mark.parametrize("nbar", [0.0, 1.0, 4.0])
    def test_rabi_levels_carry_thermal_shifts(self, nbar):
        spec = rabi_spec(nbar)
        H = effective_hamiltonian(spec, alpha_rabi(3.0, 2.5, 0.1, 1.0))
        lower, upper = np.linalg.eigvalsh(H.data)
        shifts = rabi_shifts(3.0, 2.5, 0.1, 1.0, nbar)
        assert upper - lower == pytest.approx(3.0 + shifts.delta_omega0,
                                              abs=1e-12)
        assert upper + lower == pytest.approx(
            shifts.sigma_omega0 + 2 * nbar * 2.5, abs=1e-12)

    def test_thermal_rates(self):
        _, model = build_effective_liouvillian(
            rabi_spec(2.0), alpha_rabi(3.0, 2.5, 0.1, 1.0))
        assert model.rate_down == pytest.approx(3.0)
        assert model.rate_up == pytest.approx(2.0)
        assert model.jump_up.allclose(dagger(model.alpha))

    def test_foreign_alpha_is_refused(self):
        spec = rabi_spec()
        wrong = alpha_rabi(3.0, 2.5, 0.3, 1.0)
        with pytest.raises(AlphaInconsistentError):
            build_effective_liouvillian(spec, wrong)

    def test_alpha_in_wrong_space_is_refused(self):
        with pytest.raises(AlphaInconsistentError):
            effective_hamiltonian(rabi_spec(), pauli("-"))

    def test_weak_alpha_bypasses_gate_with_warning(self, caplog):
        p = OptomechParams(omega0=0.5, Delta=-1.0, g=0.1, eta=0.1, M=6)
        weak = alpha_optomech_weak(p.omega0, p.Delta, p.g, p.eta, p.kappa,
                                   p.M)
        with caplog.at_level(logging.WARNING, logger="elimpy.liouville"):
            build_effective_liouvillian(make_optomech(p), weak)
        assert "without residual gate" in caplog.text

    def test_displacement_norm(self):
        solution = alpha_rabi(3.0, 2.5, 0.1, 1.0)
        assert displacement_norm(solution.alpha) == pytest.approx(
            abs(-0.1 / (2.5 - 3.0 - 1j)) ** 2)
