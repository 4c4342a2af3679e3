import numpy as np
import pytest
from numpy.testing import assert_allclose

from eliminate import (AlphaMethod, SingularEliminationError,
                       alpha_optomech_closed, alpha_optomech_weak,
                       alpha_rabi, interior_block, rabi_alpha_coefficients,
                       solve_alpha_steady, validity_report)
from liouville import SystemSpec
from models import (InvalidParamsError, IsingCavityParams, OptomechParams,
                    RabiParams, make_ising_cavity, make_optomech, make_rabi)
from opalg import (Operator, bosonic_ops, identity, random_hermitian,
                   spectral_norm)

RABI = dict(omega0=3.0, omega_c=2.5, g=0.1, kappa=1.0)
OPTOMECH = dict(omega0=0.5, Delta=-1.0, g=0.1, eta=0.1, kappa=1.0, M=12)


def optomech_spec(**overrides):
    params = dict(OPTOMECH)
    params.update(overrides)
    return make_optomech(OptomechParams(**params))


class TestGenericSolver:
    def test_rabi_coefficients(self):
        solution = solve_alpha_steady(make_rabi(RabiParams(**RABI)))
        a = solution.alpha.data
        # alpha = alpha_plus σ+ + alpha_minus σ-, σ+ = |0><1|
        assert a[1, 0] == pytest.approx(0.04 - 0.08j, abs=1e-12)
        assert a[0, 1] == pytest.approx(-0.1 / (5.5 - 1j), abs=1e-12)
        assert solution.method is AlphaMethod.GENERIC
        assert solution.route == "kron"

    def test_matches_rabi_closed_form(self):
        generic = solve_alpha_steady(make_rabi(RabiParams(**RABI)))
        closed = alpha_rabi(**RABI)
        assert_allclose(generic.alpha.data, closed.alpha.data, atol=1e-12)
        assert closed.residual <= 1e-14

    def test_zero_coupling_gives_zero_alpha(self):
        spec = make_rabi(RabiParams(omega0=3.0, omega_c=2.5, g=0.0))
        solution = solve_alpha_steady(spec)
        assert not np.any(solution.alpha.data)
        assert solution.residual == 0.0

    def test_optomech_decoupled_limit(self):
        solution = solve_alpha_steady(optomech_spec(g=0.0))
        assert_allclose(solution.alpha.data,
                        (-0.05 - 0.05j) * np.eye(12), atol=1e-14)

    def test_routes_agree(self):
        spec = make_ising_cavity(IsingCavityParams(N=3, h=1.0, J=5.0,
                                                   g=0.3, omega_c=1.7))
        kron_route = solve_alpha_steady(spec, route="kron")
        sylvester = solve_alpha_steady(spec, route="sylvester")
        assert sylvester.route == "sylvester"
        assert_allclose(kron_route.alpha.data, sylvester.alpha.data,
                        atol=1e-12)
        assert sylvester.residual <= 1e-8 * spectral_norm(spec.S)

    def test_auto_route_switches_on_dense_cap(self):
        spec = make_ising_cavity(IsingCavityParams(N=3, h=1.0, J=5.0,
                                                   g=0.3, omega_c=1.7))
        assert solve_alpha_steady(spec, dense_cap=32).route == "sylvester"
        assert solve_alpha_steady(spec).route == "kron"

    def test_linear_in_source(self):
        rng = np.random.default_rng(11)
        H = random_hermitian(4, rng, "q")
        Omega = random_hermitian(4, rng, "q")
        S = Operator(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)),
                     "q")
        c = complex(rng.normal(), rng.normal())
        base = solve_alpha_steady(SystemSpec(H, Omega, S, kappa=0.7)).alpha
        scaled = solve_alpha_steady(SystemSpec(H, Omega, c * S,
                                               kappa=0.7)).alpha
        assert_allclose(scaled.data, c * base.data,
                        atol=1e-12 * np.max(np.abs(scaled.data)))

    def test_ill_conditioned_system_raises(self):
        spec = make_rabi(RabiParams(omega0=3.0, omega_c=3.0, g=0.1,
                                    kappa=1e-14))
        with pytest.raises(SingularEliminationError):
            solve_alpha_steady(spec, cond_limit=1e8)

    def test_unknown_route(self):
        with pytest.raises(ValueError):
            solve_alpha_steady(make_rabi(RabiParams(**RABI)), route="lsq")


class TestOptomechForms:
    def test_closed_form_matches_generic_on_interior(self):
        closed = alpha_optomech_closed(**OPTOMECH)
        generic = solve_alpha_steady(optomech_spec())
        difference = interior_block(closed.alpha - generic.alpha, 2)
        assert np.max(np.abs(difference)) <= 1e-8
        assert closed.interior_residual <= 1e-8 * 0.1
        assert closed.method is AlphaMethod.OPTOMECH_CLOSED

    def test_closed_form_decoupled_limit(self):
        params = dict(OPTOMECH, g=0.0)
        closed = alpha_optomech_closed(**params)
        assert_allclose(closed.alpha.data, (-0.05 - 0.05j) * np.eye(12),
                        atol=1e-14)

    def test_closed_form_needs_three_levels(self):
        with pytest.raises(InvalidParamsError):
            alpha_optomech_closed(**dict(OPTOMECH, M=2))

    def test_weak_form_entries(self):
        weak = alpha_optomech_weak(**OPTOMECH)
        z = -1.0 + 1j
        a = weak.alpha.data
        for m in range(1, 4):
            assert a[m - 1, m] == pytest.approx(
                0.1 * 0.1 * np.sqrt(m) / (z * (z + 0.5)))
            assert a[m, m - 1] == pytest.approx(
                0.1 * 0.1 * np.sqrt(m) / (z * (z - 0.5)))
        assert a[0, 0] == pytest.approx(0.1 / z)
        assert weak.method is AlphaMethod.OPTOMECH_WEAK
        assert not weak.is_exact

    def test_weak_form_close_to_closed_form_at_small_coupling(self):
        params = dict(OPTOMECH, g=0.01)
        closed = alpha_optomech_closed(**params)
        weak = alpha_optomech_weak(**params)
        inner = interior_block(closed.alpha - weak.alpha, 6)
        assert np.max(np.abs(inner)) <= 1e-3 * spectral_norm(closed.alpha)

    def test_weak_residual_is_second_order(self):
        big = alpha_optomech_weak(**dict(OPTOMECH, g=0.1)).residual
        small = alpha_optomech_weak(**dict(OPTOMECH, g=0.01)).residual
        ratio = big / small
        assert 100 / 1.5 <= ratio <= 100 * 1.5

    def test_weak_form_needs_two_levels(self):
        with pytest.raises(InvalidParamsError):
            alpha_optomech_weak(**dict(OPTOMECH, M=1))


class TestRabiForm:
    def test_coefficients(self):
        plus, minus = rabi_alpha_coefficients(**RABI)
        assert minus == pytest.approx(0.04 - 0.08j)
        assert plus == pytest.approx(-0.0176 - 0.0032j)

    @pytest.mark.parametrize("g, expected", [(0.1, 0.089), (0.3, 0.268),
                                             (3.0, 2.68)])
    def test_magnitudes(self, g, expected):
        _, minus = rabi_alpha_coefficients(3.0, 2.5, g, 1.0)
        assert abs(minus) == pytest.approx(expected, abs=5e-3)

    def test_overdamped_resonant_limit(self):
        _, minus = rabi_alpha_coefficients(2.0, 2.0, 0.1, 100.0)
        assert minus == pytest.approx(-1j * 0.1 / 100.0)


class TestValidityReport:
    def test_scalar_omega_gives_zero_ratio(self):
        spec = make_rabi(RabiParams(**RABI))
        report = validity_report(spec, alpha_rabi(**RABI))
        assert report.commutator_ratio == 0.0
        assert not report.alpha_zero
        assert report.residual <= 1e-14

    def test_strong_coupling_norm(self):
        params = dict(RABI, g=3.0)
        report = validity_report(make_rabi(RabiParams(**params)),
                                 alpha_rabi(**params))
        assert report.alpha_norm == pytest.approx(2.68, abs=5e-3)

    def test_zero_alpha_is_flagged(self):
        spec = make_rabi(RabiParams(omega0=3.0, omega_c=2.5, g=0.0))
        report = validity_report(spec, identity(2, "atom") * 0)
        assert report.alpha_zero
        assert report.commutator_ratio == 0.0

    def test_optomech_ratio_is_small(self):
        spec = optomech_spec()
        report = validity_report(spec, alpha_optomech_closed(**OPTOMECH))
        assert 0.0 < report.commutator_ratio < 0.5
        assert np.isfinite(report.alpha_norm)


class TestInteriorBlock:
    def test_block_shape(self):
        _, _, n = bosonic_ops(6)
        assert interior_block(n, 2).shape == (4, 4)

    def test_buffer_too_large(self):
        with pytest.raises(ValueError):
            interior_block(identity(2), 2)
