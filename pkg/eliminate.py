"""
ElimPy Elimination Solvers

Solves the steady elimination condition

    [H_S, α] + Omega_S α + S - i kappa α = 0

for the effective-field operator α, generically and through closed forms,
and reports how well the elimination is justified.
"""

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg as la
from scipy.linalg import lapack

from liouville import DEFAULT_DENSE_CAP, vec, unvec
from models import InvalidParamsError, RabiParams, atom_pauli, make_rabi
from opalg import (Operator, bosonic_ops, commutator, identity,
                   spectral_norm)
from utilities import ElimPyError

logger = logging.getLogger("elimpy.eliminate")

DEFAULT_COND_LIMIT = 1e12
DEFAULT_BOUNDARY_BUFFER = 2


class SingularEliminationError(ElimPyError):
    pass


class AlphaMethod(str, Enum):
    GENERIC = "generic"
    OPTOMECH_CLOSED = "optomech_closed"
    OPTOMECH_WEAK = "optomech_weak"
    RABI_ANALYTIC = "rabi_analytic"


@dataclass(frozen=True, eq=False)
class AlphaSolution:
    alpha: Operator
    residual: float
    method: AlphaMethod
    interior_residual: float = None
    condition: float = None
    route: str = ""

    @property
    def is_exact(self):
        return self.method is not AlphaMethod.OPTOMECH_WEAK


@dataclass(frozen=True)
class ValidityReport:
    alpha_norm: float
    commutator_ratio: float
    residual: float
    alpha_zero: bool = False

    def as_dict(self):
        return {"alpha_norm": self.alpha_norm,
                "commutator_ratio": self.commutator_ratio,
                "residual": self.residual,
                "alpha_zero": self.alpha_zero}


def interior_block(op, buffer=DEFAULT_BOUNDARY_BUFFER):
    """
    Rows and columns below dim - buffer, away from the truncation edge.
    """
    data = op.data if isinstance(op, Operator) else np.asarray(op)
    keep = data.shape[0] - buffer
    if keep < 1:
        raise ValueError("Boundary buffer {} leaves nothing of a {}-dim "
                         "operator.".format(buffer, data.shape[0]))
    return data[:keep, :keep]


def _solve_kron(spec, cond_limit):
    d = spec.dim
    h = spec.H_S.data
    eye = np.eye(d)
    A = (np.kron(eye, h) - np.kron(h.T, eye) + np.kron(eye, spec.Omega_S.data)
         - 1j * spec.kappa * np.eye(d * d))
    lu, piv = la.lu_factor(A, check_finite=False)
    rcond, info = lapack.zgecon(lu, np.linalg.norm(A, 1), norm="1")
    condition = np.inf if rcond == 0 else 1.0 / rcond
    if info != 0 or condition > cond_limit:
        raise SingularEliminationError(
            "Elimination system is singular or ill-conditioned (condition "
            "estimate {:.3e}); is kappa close to zero?".format(condition))
    x = la.lu_solve((lu, piv), -vec(spec.S.data), check_finite=False)
    return unvec(x, d), condition


def _solve_sylvester(spec):
    """
    Bartels-Stewart: (H_S + Omega_S - i kappa) α + α (-H_S) = -S.
    """
    h = spec.H_S.data
    A = h + spec.Omega_S.data - 1j * spec.kappa * np.eye(spec.dim)
    try:
        x = la.solve_sylvester(A, -h, -spec.S.data)
    except (la.LinAlgError, ValueError) as e:
        raise SingularEliminationError(str(e)) from None
    # eigenvalues of A sit at Im = -kappa while those of H_S are real
    condition = (spectral_norm(spec.H_S) * 2.0
                 + spectral_norm(spec.Omega_S) + spec.kappa) / spec.kappa
    return x, condition


def solve_alpha_steady(spec, *, route="auto", dense_cap=DEFAULT_DENSE_CAP,
                       cond_limit=DEFAULT_COND_LIMIT):
    """
    Generic steady-state solution of the elimination condition.

    :param spec: SystemSpec.
    :param route: "kron" (vectorized dense solve with a condition estimate),
                  "sylvester" (Bartels-Stewart) or "auto" (kron while
                  dim² <= dense_cap).
    :param dense_cap: Largest vectorized system size for the kron route.
    :param cond_limit: Condition estimate above which the kron route fails.
    :return: AlphaSolution with method GENERIC.
    :raise: SingularEliminationError.
    """
    if route == "auto":
        route = "kron" if spec.dim ** 2 <= dense_cap else "sylvester"
    if route == "kron":
        x, condition = _solve_kron(spec, cond_limit)
    elif route == "sylvester":
        x, condition = _solve_sylvester(spec)
    else:
        raise ValueError("Unknown elimination route {!r}.".format(route))
    alpha = Operator(x, spec.space)
    residual = spectral_norm(spec.elimination_residual(alpha))
    logger.debug("Solved elimination condition (%s, dim %d): residual "
                 "%.3e, condition %.3e.", route, spec.dim, residual,
                 condition)
    return AlphaSolution(alpha=alpha, residual=residual,
                         method=AlphaMethod.GENERIC, condition=condition,
                         route=route)


def _optomech_residual(alpha, omega0, Delta, g, eta, kappa, M, buffer):
    b, bdag, n = bosonic_ops(M, "mirror")
    one = identity(M, "mirror")
    r = (omega0 * commutator(n, alpha) + (-Delta * one + g * (b + bdag))
         @ alpha + eta * one - 1j * kappa * alpha)
    interior = None
    if M - buffer >= 1:
        interior = float(np.linalg.norm(interior_block(r, buffer), 2))
    return spectral_norm(r), interior


def alpha_optomech_closed(omega0, Delta, g, eta, kappa, M, *,
                          buffer=DEFAULT_BOUNDARY_BUFFER):
    """
    Column-by-column closed form

        α = sum_m η [Δ + m ω0 + i kappa - ω0 b†b - g(b + b†)]^-1 |m><m|

    evaluated on the M-dimensional mirror space. All M resolvents are solved
    in one batched call.
    """
    if M < 3:
        raise InvalidParamsError("Mirror cutoff M must be at least 3.")
    b, bdag, n = bosonic_ops(M, "mirror")
    base = -omega0 * n.data - g * (b.data + bdag.data)
    shifts = Delta + omega0 * np.arange(M) + 1j * kappa
    resolvents = base[None, :, :] + shifts[:, None, None] * np.eye(M)
    rhs = eta * np.eye(M)[:, :, None]
    try:
        columns = np.linalg.solve(resolvents, rhs)[:, :, 0]
    except np.linalg.LinAlgError as e:
        raise SingularEliminationError(
            "Resolvent inversion failed: {}".format(e)) from None
    alpha = Operator(columns.T, "mirror")
    residual, interior = _optomech_residual(alpha, omega0, Delta, g, eta,
                                            kappa, M, buffer)
    return AlphaSolution(alpha=alpha, residual=residual,
                         method=AlphaMethod.OPTOMECH_CLOSED,
                         interior_residual=interior)


def alpha_optomech_weak(omega0, Delta, g, eta, kappa, M):
    """
    First order in g:
    α = η/(Δ + iκ) [1 + g b/(Δ + ω0 + iκ) + g b†/(Δ - ω0 + iκ)].
    """
    if M < 2:
        raise InvalidParamsError("Mirror cutoff M must be at least 2.")
    b, bdag, _ = bosonic_ops(M, "mirror")
    one = identity(M, "mirror")
    z = Delta + 1j * kappa
    alpha = (eta / z) * (one + (g / (z + omega0)) * b
                         + (g / (z - omega0)) * bdag)
    residual, interior = _optomech_residual(alpha, omega0, Delta, g, eta,
                                            kappa, M, 0)
    return AlphaSolution(alpha=alpha, residual=residual,
                         method=AlphaMethod.OPTOMECH_WEAK,
                         interior_residual=interior)


def rabi_alpha_coefficients(omega0, omega_c, g, kappa):
    """
    (α+, α-) with α± = -g/(ω_c ± ω0 - iκ).
    """
    return (-g / (omega_c + omega0 - 1j * kappa),
            -g / (omega_c - omega0 - 1j * kappa))


def alpha_rabi(omega0, omega_c, g, kappa):
    alpha_plus, alpha_minus = rabi_alpha_coefficients(omega0, omega_c, g,
                                                      kappa)
    alpha = alpha_plus * atom_pauli("+") + alpha_minus * atom_pauli("-")
    spec = make_rabi(RabiParams(omega0=omega0, omega_c=omega_c, g=g,
                                kappa=kappa))
    residual = spectral_norm(spec.elimination_residual(alpha))
    return AlphaSolution(alpha=alpha, residual=residual,
                         method=AlphaMethod.RABI_ANALYTIC)


def validity_report(spec, alpha):
    """
    Diagnostics for the elimination: ||α||, the commutator ratio
    ||[Omega_S, α]|| / (||Omega_S - iκ|| ||α||) and the residual.

    A zero α leaves the ratio undefined; it is reported as 0 with the
    alpha_zero flag set.
    """
    op = getattr(alpha, "alpha", alpha)
    alpha_norm = spectral_norm(op)
    residual = spectral_norm(spec.elimination_residual(op))
    if alpha_norm == 0.0:
        return ValidityReport(0.0, 0.0, residual, alpha_zero=True)
    if spec.Omega_S.is_scalar():
        ratio = 0.0
    else:
        shifted = spec.Omega_S - 1j * spec.kappa * identity(spec.dim,
                                                            spec.space)
        ratio = (spectral_norm(commutator(spec.Omega_S, op))
                 / (spectral_norm(shifted) * alpha_norm))
    return ValidityReport(alpha_norm, ratio, residual)
