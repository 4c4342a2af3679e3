"""
ElimPy Model Zoo

SystemSpec constructors for the three case studies (optomechanical sideband
cooling, transverse-field Ising chain in a cavity, dissipative Rabi model)
and their derived quantities. All quantities are in units of kappa.
"""

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from liouville import SystemSpec
from opalg import (Operator, basis_projector, bosonic_ops, identity, pauli,
                   spin_site)
from utilities import ElimPyError

logger = logging.getLogger("elimpy.models")

ISING_DENSE_CAP = 12


class InvalidParamsError(ElimPyError, ValueError):
    pass


class ModelTooLargeError(ElimPyError):
    pass


@dataclass(frozen=True)
class OptomechParams:
    omega0: float
    Delta: float
    g: float
    eta: float
    kappa: float = 1.0
    M: int = 12

    def __post_init__(self):
        if not self.kappa > 0:
            raise InvalidParamsError("kappa must be positive.")
        if self.M < 3:
            raise InvalidParamsError("Mirror cutoff M must be at least 3.")


@dataclass(frozen=True)
class IsingCavityParams:
    N: int
    h: float
    J: float
    g: float
    omega_c: float
    kappa: float = 1.0

    def __post_init__(self):
        if self.N < 2:
            raise InvalidParamsError("Ising chain needs N >= 2.")
        if not self.kappa > 0:
            raise InvalidParamsError("kappa must be positive.")


@dataclass(frozen=True)
class RabiParams:
    omega0: float
    omega_c: float
    g: float
    kappa: float = 1.0
    nbar: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise InvalidParamsError("kappa must be positive.")
        if not self.nbar >= 0:
            raise InvalidParamsError("nbar must be nonnegative.")


class IsingGap(NamedTuple):
    E0: float
    E1: float
    gap: float


def make_optomech(p):
    """
    Mirror as the system: H_S = ω0 b†b, Omega_S = -Δ + g(b + b†), S = η.
    """
    b, bdag, n = bosonic_ops(p.M, "mirror")
    one = identity(p.M, "mirror")
    return SystemSpec(H_S=p.omega0 * n,
                      Omega_S=-p.Delta * one + p.g * (b + bdag),
                      S=p.eta * one,
                      kappa=p.kappa, nbar=0.0, mode="cavity")


def ising_hamiltonian(N, h, J):
    """
    Open-boundary transverse-field Ising chain,
    H_S = h sum_n σz_n - J sum_n σx_n σx_{n+1}.
    """
    H = h * spin_site("z", 1, N)
    for n in range(2, N + 1):
        H = H + h * spin_site("z", n, N)
    for n in range(1, N):
        H = H - J * (spin_site("x", n, N) @ spin_site("x", n + 1, N))
    return H


def make_ising_cavity(p):
    H = ising_hamiltonian(p.N, p.h, p.J)
    space = H.space
    S = p.g * spin_site("-", 1, p.N)
    for n in range(2, p.N + 1):
        S = S + p.g * spin_site("-", n, p.N)
    return SystemSpec(H_S=H, Omega_S=p.omega_c * identity(2 ** p.N, space),
                      S=S, kappa=p.kappa, nbar=0.0, mode="cavity")


def atom_pauli(q):
    """Pauli operator q tagged with the "atom" space of the Rabi model."""
    return Operator(pauli(q).data, "atom")


def make_rabi(p):
    return SystemSpec(H_S=(p.omega0 / 2.0) * atom_pauli("z"),
                      Omega_S=p.omega_c * identity(2, "atom"),
                      S=p.g * atom_pauli("x"),
                      kappa=p.kappa, nbar=p.nbar, mode="cavity")


def ising_spectrum(N, h, J, cap=ISING_DENSE_CAP):
    if N > cap:
        raise ModelTooLargeError(
            "Dense diagonalization capped at N={}, got N={}.".format(cap, N))
    return np.linalg.eigvalsh(ising_hamiltonian(N, h, J).data)


def ising_gap(N, h, J, *, rtol=1e-9, ground_levels=1, cap=ISING_DENSE_CAP):
    """
    Ground energy, first excited level and their splitting.

    Eigenvalues within rtol*max(1, |E0|) of the ground cluster count as one
    level. The lowest ground_levels eigenvalues always belong to the ground
    cluster, which lets a near-degenerate doublet (ordered phase) be treated
    as the ground manifold.

    :return: IsingGap(E0, E1, gap).
    """
    levels = ising_spectrum(N, h, J, cap=cap)
    E0 = float(levels[0])
    tol = rtol * max(1.0, abs(E0))
    top = float(levels[max(1, ground_levels) - 1])
    above = levels[levels > top + tol]
    if above.size == 0:
        raise InvalidParamsError("Spectrum has no level above the ground "
                                 "cluster.")
    E1 = float(above[0])
    logger.debug("Ising gap N=%d h=%g J=%g: E0=%.12g E1=%.12g", N, h, J,
                 E0, E1)
    return IsingGap(E0, E1, E1 - E0)


def thermal_occupation(beta, omega_c):
    """
    Bose-Einstein occupation nbar = 1/(exp(β ω_c) - 1).
    """
    x = beta * omega_c
    if not x > 0:
        raise InvalidParamsError(
            "beta*omega_c must be positive, got {}.".format(x))
    return 1.0 / math.expm1(x) if x < 700 else 0.0


def thermal_state(nbar, L):
    """
    Thermal Fock-basis density matrix renormalized on the truncated space.
    """
    if L < 2:
        raise InvalidParamsError("Cutoff must be at least 2.")
    if nbar == 0:
        return basis_projector(0, L, "mode")
    ratio = nbar / (nbar + 1.0)
    populations = ratio ** np.arange(L) / (nbar + 1.0)
    return Operator(np.diag(populations / populations.sum()), "mode")


def fock_state(m, L, space="mode"):
    return basis_projector(m, L, space)


def polarized_state(N):
    """All spins up (<σz_j> = 1 for every site)."""
    return basis_projector(0, 2 ** N, "spin^{}".format(N))
