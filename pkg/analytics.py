"""
ElimPy Analytics

Closed-form predictions for the case studies. These are pure scalar
formulas with no code path shared with the generators they are checked
against, so they can serve as independent oracles.
"""

import logging
import math
from typing import NamedTuple

from liouville import lindblad_superop
from opalg import bosonic_ops
from utilities import ElimPyError

logger = logging.getLogger("elimpy.analytics")


class NoCoolingBalanceError(ElimPyError, ValueError):
    pass


class RatePair(NamedTuple):
    A_minus: float
    A_plus: float

    @property
    def cools(self):
        return self.A_minus > self.A_plus


class RabiShifts(NamedTuple):
    delta_omega0: float
    sigma_omega0: float


# Optomechanical sideband cooling

def cooling_heating_rates(omega0, Delta, g, eta, kappa):
    """
    Weak-coupling cooling and heating rates

        A∓ = κ g² η² / ((Δ² + κ²)((Δ ± ω0)² + κ²))

    :return: RatePair(A_minus, A_plus).
    """
    if not kappa > 0:
        raise ValueError("kappa must be positive.")
    prefactor = kappa * g ** 2 * eta ** 2 / (Delta ** 2 + kappa ** 2)
    return RatePair(prefactor / ((Delta + omega0) ** 2 + kappa ** 2),
                    prefactor / ((Delta - omega0) ** 2 + kappa ** 2))


def mbar_weak(omega0, Delta, kappa):
    """
    Steady mean phonon number A+/(A- - A+) = ((Δ + ω0)² + κ²)/(-4 Δ ω0).

    :raise: NoCoolingBalanceError for Δ >= 0.
    """
    if Delta >= 0:
        raise NoCoolingBalanceError(
            "No cooling balance for Delta = {} >= 0.".format(Delta))
    if not omega0 > 0:
        raise ValueError("omega0 must be positive.")
    return ((Delta + omega0) ** 2 + kappa ** 2) / (-4.0 * Delta * omega0)


def optimal_detuning(omega0, kappa):
    """Minimizer of mbar_weak over Δ."""
    return -math.sqrt(kappa ** 2 + omega0 ** 2)


def simplified_optomech_generator(omega0, rates, M):
    """
    Rotating-wave effective generator

        L rho = -i ω0 [b†b, rho] + A- D[b] rho + A+ D[b†] rho

    on an M-dimensional mirror space. With A- <= A+ the steady state piles
    up at the truncation edge; the generator is still built, flagged in its
    meta as cutoff dominated.
    """
    b, bdag, n = bosonic_ops(M, "mirror")
    rates = RatePair(*rates)
    dominated = not rates.cools
    if dominated:
        logger.warning("A- = %.3e <= A+ = %.3e: the steady state of the "
                       "simplified generator is set by the cutoff M=%d.",
                       rates.A_minus, rates.A_plus, M)
    return lindblad_superop(
        omega0 * n, [(rates.A_minus, b), (rates.A_plus, bdag)],
        description="simplified-optomech(M={})".format(M),
        meta={"cutoff_dominated": dominated, "cutoff": M})


# Dissipative Rabi model

def _alpha_real_parts(omega0, omega_c, g, kappa):
    detuned = omega_c - omega0
    summed = omega_c + omega0
    re_minus = -g * detuned / (detuned ** 2 + kappa ** 2)
    re_plus = -g * summed / (summed ** 2 + kappa ** 2)
    return re_plus, re_minus


def rabi_shift_components(omega0, omega_c, g, kappa, nbar=0.0):
    """
    Co-rotating (Lamb) and counter-rotating (Bloch-Siegert) parts of the
    atomic frequency shift. Their sum is Δω0.

    :return: Tuple (lamb_shift, bloch_siegert_shift).
    """
    detuned = omega_c - omega0
    summed = omega_c + omega0
    scale = 2.0 * nbar + 1.0
    lamb = -scale * g ** 2 * detuned / (detuned ** 2 + kappa ** 2)
    bloch_siegert = scale * g ** 2 * summed / (summed ** 2 + kappa ** 2)
    return lamb, bloch_siegert


def rabi_shifts(omega0, omega_c, g, kappa, nbar=0.0):
    """
    Thermal frequency shift and energy offset of the two-level atom,

        Δω0 = -(2n̄+1)[g²(ω_c-ω0)/((ω_c-ω0)²+κ²) - g²(ω_c+ω0)/((ω_c+ω0)²+κ²)]
        Σω0 = g [Re α- + Re α+]

    :return: RabiShifts(delta_omega0, sigma_omega0).
    """
    lamb, bloch_siegert = rabi_shift_components(omega0, omega_c, g, kappa,
                                                nbar)
    re_plus, re_minus = _alpha_real_parts(omega0, omega_c, g, kappa)
    return RabiShifts(lamb + bloch_siegert, g * (re_minus + re_plus))


def rabi_shifts_from_alpha(alpha_plus, alpha_minus, g, nbar=0.0):
    """
    The same shifts computed from the effective-field coefficients:
    Δω0 = g(2n̄+1)[Re α- - Re α+], Σω0 = g[Re α- + Re α+].
    """
    re_plus, re_minus = complex(alpha_plus).real, complex(alpha_minus).real
    return RabiShifts(g * (2.0 * nbar + 1.0) * (re_minus - re_plus),
                      g * (re_minus + re_plus))


def rabi_steady_sz(omega0, omega_c, kappa, nbar=0.0):
    """<σz> = -2 ω_c ω0 / ((ω_c² + ω0² + κ²)(2n̄ + 1))."""
    return (-2.0 * omega_c * omega0
            / ((omega_c ** 2 + omega0 ** 2 + kappa ** 2) * (2.0 * nbar + 1.0)))


def rabi_alpha_norm(omega_c, omega0, g, kappa):
    """Perturbation parameter g/√((ω_c - ω0)² + κ²), which is |α-|."""
    return g / math.hypot(omega_c - omega0, kappa)
