"""
ElimPy Dynamics

Time evolution, steady states, spectra and observables for any built
Liouvillian, full or effective.
"""

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg as la
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from liouville import DEFAULT_DENSE_CAP, SuperOp, unvec, vec
from opalg import InvalidOperatorError, Operator, is_density_matrix
from utilities import ElimPyError

logger = logging.getLogger("elimpy.dynamics")

DEFAULT_RTOL = 1e-8
DEFAULT_ATOL = 1e-10
DEFAULT_NULL_SPACE_CAP = 1024
DEFAULT_STEADY_TOL = 1e-8
SHIFT = 1e-4
PSD_FLOOR = -1e-8


class IntegrationError(ElimPyError):
    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class DegenerateSteadyStateError(ElimPyError):
    def __init__(self, message, kernel_dim=None):
        super().__init__(message)
        self.kernel_dim = kernel_dim


class SteadyStateError(ElimPyError):
    pass


class SpectrumError(ElimPyError):
    pass


@dataclass
class Trajectory:
    """
    Integration record. States are kept when requested; observables are
    stored as complex arrays aligned with times.
    """
    times: np.ndarray
    states: list = field(default_factory=list)
    observables: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    def values(self, name):
        """Real part of a recorded observable."""
        return np.real(self.observables[name])

    @property
    def final_state(self):
        if not self.states:
            raise ValueError("Trajectory was recorded without states.")
        return self.states[-1]


class ConvergenceTable(NamedTuple):
    cutoffs: tuple
    values: tuple
    differences: tuple
    tol: float
    converged: bool
    converged_cutoff: int
    value: float

    def rows(self):
        """(cutoff, value, difference to the previous cutoff) per entry."""
        diffs = (None,) + self.differences
        return list(zip(self.cutoffs, self.values, diffs))


class SpectrumMatch(NamedTuple):
    eigenvalue: complex
    nearest: complex
    distance: float


def expect(O, rho):
    """
    Tr(O rho).

    :raise: OperatorMismatchError on unequal dims or spaces.
    """
    O._check(rho)
    return complex(np.einsum("ij,ji->", O.data, rho.data))


def _rhs(generator):
    if isinstance(generator, SuperOp):
        return generator.apply_vec, generator.dim, generator.space
    dim = getattr(generator, "dim", None)

    def apply(v):
        d = dim or int(round(np.sqrt(v.size)))
        return vec(generator(unvec(v, d)))

    return apply, dim, ""


def evolve(generator, rho0, t_grid, *, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
           observables=None, keep_states=True):
    """
    Integrate d rho/dt = L rho with an adaptive embedded Runge-Kutta 5(4)
    pair and record the state at each grid point.

    :param generator: SuperOp, or a callable acting on density matrices.
    :param rho0: Initial density Operator.
    :param t_grid: Strictly increasing output times.
    :param rtol: Relative local error tolerance.
    :param atol: Absolute local error tolerance.
    :param observables: Optional mapping name -> Operator recorded as
                        expectation values at each grid point.
    :param keep_states: Keep the density matrices in the Trajectory.
    :return: Trajectory.
    :raise: IntegrationError when the step size underflows.
    """
    if not is_density_matrix(rho0, atol=1e-10):
        raise InvalidOperatorError("Initial state is not a density matrix.")
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("Time grid must be a non-empty sequence.")
    if np.any(np.diff(times) <= 0):
        raise ValueError("Time grid must be strictly increasing.")
    apply, dim, _ = _rhs(generator)
    if dim is not None and dim != rho0.dim:
        raise InvalidOperatorError(
            "Generator acts on dim {}, rho0 has dim {}.".format(dim,
                                                                rho0.dim))
    d = rho0.dim
    observables = dict(observables or {})
    for O in observables.values():
        O._check(rho0)

    y0 = vec(rho0.data).astype(complex)
    nfev = 0
    if times.size == 1:
        ys = y0[:, None]
    else:
        sol = solve_ivp(lambda t, y: apply(y), (times[0], times[-1]), y0,
                        method="RK45", t_eval=times, rtol=rtol, atol=atol)
        nfev = int(sol.nfev)
        if sol.status == -1:
            failed_at = float(sol.t[-1]) if sol.t.size else float(times[0])
            raise IntegrationError(
                "Integration failed at t={:.6g}: {}".format(failed_at,
                                                            sol.message),
                time=failed_at)
        ys = sol.y

    trajectory = Trajectory(times=times, observables={
        name: np.empty(times.size, dtype=complex) for name in observables})
    trace_defect = 0.0
    herm_defect = 0.0
    for i in range(times.size):
        data = unvec(ys[:, i], d)
        rho = Operator(data, rho0.space)
        trace_defect = max(trace_defect, abs(np.trace(data) - 1.0))
        herm_defect = max(herm_defect,
                          float(np.max(np.abs(data - data.conj().T))))
        for name, O in observables.items():
            trajectory.observables[name][i] = expect(O, rho)
        if keep_states:
            trajectory.states.append(rho)
    trajectory.meta.update({
        "generator": getattr(generator, "description", repr(generator)),
        "rtol": rtol, "atol": atol, "nfev": nfev,
        "max_trace_defect": trace_defect,
        "max_hermiticity_defect": herm_defect,
    })
    logger.debug("Evolved %d points to t=%g with %d evaluations.",
                 times.size, times[-1], nfev)
    return trajectory


def _finalize(generator, data, norm, tol, route):
    rho = (data + data.conj().T) / 2.0
    trace = np.trace(rho).real
    if trace == 0 or not np.isfinite(trace):
        raise SteadyStateError("Steady-state vector has zero trace.")
    rho = rho / trace
    lowest = float(np.linalg.eigvalsh(rho)[0])
    if lowest < PSD_FLOOR:
        raise SteadyStateError(
            "Steady state is not positive: lowest eigenvalue "
            "{:.3e}.".format(lowest))
    residual = float(np.linalg.norm(generator.apply_vec(vec(rho))))
    if residual > tol * max(norm, 1.0):
        raise SteadyStateError(
            "Steady-state residual {:.3e} exceeds {:.3e} ({} route).".format(
                residual, tol * max(norm, 1.0), route))
    logger.debug("Steady state via %s route: residual %.3e.", route,
                 residual)
    return Operator(rho, generator.space)


def _steady_dense(generator, tol, degeneracy_tol):
    matrix = generator.sparse.toarray()
    _, s, vh = la.svd(matrix)
    kernel_dim = int(np.sum(s <= degeneracy_tol * s[0]))
    if kernel_dim > 1:
        raise DegenerateSteadyStateError(
            "Generator has a {}-dimensional kernel; the steady state is not "
            "unique.".format(kernel_dim), kernel_dim=kernel_dim)
    null = vh[-1].conj()
    return _finalize(generator, unvec(null, generator.dim), s[0], tol,
                     "dense")


def _second_smallest(generator):
    """
    Second-smallest eigenvalue magnitude of the generator, from a two-value
    shift-invert iteration next to zero. None when it cannot be resolved.
    """
    if generator.liouville_dim <= 3:
        return None
    try:
        values = spla.eigs(generator.sparse.tocsc(), k=2, sigma=SHIFT,
                           which="LM", return_eigenvectors=False)
    except spla.ArpackNoConvergence as e:
        values = e.eigenvalues
    except RuntimeError:
        return 0.0
    magnitudes = np.sort(np.abs(values))
    if magnitudes.size < 2:
        return None
    return float(magnitudes[1])


def _steady_sparse(generator, tol, degeneracy_tol):
    d = generator.dim
    matrix = generator.sparse.tolil(copy=True)
    trace_row = np.zeros(d * d, dtype=complex)
    trace_row[np.arange(d) * (d + 1)] = 1.0
    matrix[0, :] = trace_row
    rhs = np.zeros(d * d, dtype=complex)
    rhs[0] = 1.0
    try:
        lu = spla.splu(matrix.tocsc())
    except RuntimeError as e:
        raise DegenerateSteadyStateError(
            "Trace-constrained generator is singular ({}); the steady state "
            "is not unique.".format(e)) from None
    solution = lu.solve(rhs)
    scale = max(spla.norm(generator.sparse, 1), 1.0)
    second = _second_smallest(generator)
    if second is None:
        logger.warning("Could not resolve the eigenvalue next to zero; "
                       "steady-state uniqueness is not certified.")
    elif second <= degeneracy_tol * scale:
        raise DegenerateSteadyStateError(
            "Generator has a second eigenvalue of size {:.3e} next to "
            "zero; the steady state is not unique.".format(second),
            kernel_dim=None)
    norm = spla.norm(generator.sparse)
    return _finalize(generator, unvec(solution, d), norm, tol, "sparse")


def _steady_evolve(generator, tol, rho0, chunk, max_time):
    rho = rho0
    if rho is None:
        rho = Operator(np.eye(generator.dim) / generator.dim,
                       generator.space)
    t = 0.0
    while t < max_time:
        rho = evolve(generator, rho, [0.0, chunk]).final_state
        t += chunk
        rho = Operator((rho.data + rho.data.conj().T) / 2.0, rho.space)
        residual = np.linalg.norm(generator.apply_vec(vec(rho.data)))
        if residual <= tol * np.linalg.norm(rho.data):
            logger.debug("Steady state via evolve route reached at t=%g.", t)
            return _finalize(generator, rho.data, np.inf, tol, "evolve")
    raise SteadyStateError(
        "Long-time evolution did not settle within t={:g}.".format(max_time))


def steady_state(generator, *, route="auto", tol=DEFAULT_STEADY_TOL,
                 null_space_cap=DEFAULT_NULL_SPACE_CAP, degeneracy_tol=1e-10,
                 rho0=None, chunk=10.0, max_time=1e4):
    """
    Unique steady state of a generator.

    Routes: "dense" (SVD null space, certifies uniqueness), "sparse" (sparse
    LU with the first equation replaced by the trace constraint) and
    "evolve" (long-time evolution until ||L rho|| <= tol ||rho||). "auto"
    picks dense while the Liouville dimension is within null_space_cap,
    then sparse, then evolve for matrix-free generators.

    :param rho0: Start state for the evolve route; the maximally mixed
                 state when omitted.
    :return: Hermitian unit-trace Operator.
    :raise: DegenerateSteadyStateError, SteadyStateError.
    """
    if route == "auto":
        if generator.has_matrix:
            dense_ok = generator.liouville_dim <= null_space_cap
            route = "dense" if dense_ok else "sparse"
        else:
            route = "evolve"
    if route == "dense":
        return _steady_dense(generator, tol, degeneracy_tol)
    if route == "sparse":
        return _steady_sparse(generator, tol, degeneracy_tol)
    if route == "evolve":
        return _steady_evolve(generator, tol, rho0, chunk, max_time)
    raise ValueError("Unknown steady-state route {!r}.".format(route))


def asymptotic_state(generator, rho0, *, tol=DEFAULT_STEADY_TOL,
                     degeneracy_tol=1e-10, dense_cap=DEFAULT_DENSE_CAP):
    """
    Long-time limit of the evolution started from rho0.

    The kernel of the generator is projected onto along its conserved
    quantities (the left kernel), so a degenerate kernel, e.g. from a
    symmetry shared by the Hamiltonian and every jump operator, picks the
    steady state of the sector rho0 lives in.

    :return: Hermitian unit-trace Operator.
    :raise: InvalidOperatorError, DenseCapExceededError, SteadyStateError.
    """
    if rho0.dim != generator.dim:
        raise InvalidOperatorError(
            "Generator acts on dim {}, rho0 has dim {}.".format(
                generator.dim, rho0.dim))
    u, s, vh = la.svd(generator.dense(dense_cap))
    kernel_dim = int(np.sum(s <= degeneracy_tol * s[0]))
    if kernel_dim == 0:
        raise SteadyStateError("Generator has no kernel.")
    right = vh[-kernel_dim:].conj().T
    left = u[:, -kernel_dim:].conj().T
    coefficients = la.solve(left @ right, left @ vec(rho0.data))
    logger.debug("Asymptotic state from a %d-dimensional kernel.",
                 kernel_dim)
    return _finalize(generator, unvec(right @ coefficients, generator.dim),
                     s[0], tol, "kernel projection")


def _sort(values):
    values = np.asarray(values, dtype=complex)
    return values[np.lexsort((values.imag, -values.real))]


def spectrum(generator, k=None, *, dense_cap=DEFAULT_DENSE_CAP, sigma=SHIFT):
    """
    Eigenvalues of a generator sorted by real part, descending.

    :param k: When given, only the k eigenvalues nearest zero, found by
              shift-invert iteration around sigma.
    :return: Complex ndarray.
    :raise: DenseCapExceededError for a full spectrum above dense_cap,
            SpectrumError when the iteration does not converge.
    """
    n = generator.liouville_dim
    if k is None:
        return _sort(la.eigvals(generator.dense(dense_cap)))
    if k >= n - 1:
        values = la.eigvals(generator.dense(dense_cap))
        return _sort(values[np.argsort(np.abs(values))[:k]])
    try:
        values = spla.eigs(generator.sparse.tocsc(), k=k, sigma=sigma,
                           which="LM", return_eigenvectors=False)
    except spla.ArpackNoConvergence as e:
        raise SpectrumError(
            "Shift-invert iteration did not converge: {}".format(e)) \
            from None
    logger.debug("Found %d eigenvalues nearest zero of %r.", k, generator)
    return _sort(values)


def cutoff_convergence(build, observable, cutoffs, *, tol=1e-4,
                       solve=steady_state):
    """
    Steady-state expectation of an observable across mode cutoffs.

    :param build: Callable L -> SuperOp.
    :param observable: Operator, or callable L -> Operator.
    :param cutoffs: Increasing cutoffs, at least two.
    :param tol: Successive-difference tolerance.
    :param solve: Steady-state solver taking a SuperOp.
    :return: ConvergenceTable. converged_cutoff is the smallest cutoff from
             which every later difference is below tol.
    """
    cutoffs = tuple(int(L) for L in cutoffs)
    if len(cutoffs) < 2:
        raise ValueError("Need at least two cutoffs.")
    values = []
    for L in cutoffs:
        O = observable(L) if callable(observable) else observable
        values.append(expect(O, solve(build(L))).real)
        logger.debug("Cutoff %d: %.12g", L, values[-1])
    differences = tuple(abs(b - a) for a, b in zip(values, values[1:]))
    converged_cutoff = None
    for i in range(len(differences) - 1, -1, -1):
        if differences[i] >= tol:
            break
        converged_cutoff = cutoffs[i + 1]
    return ConvergenceTable(cutoffs=cutoffs, values=tuple(values),
                            differences=differences, tol=tol,
                            converged=converged_cutoff is not None,
                            converged_cutoff=converged_cutoff,
                            value=values[-1])


def match_spectra(effective, full):
    """
    Pair each effective eigenvalue with its nearest full eigenvalue.

    :return: List of SpectrumMatch, one per effective eigenvalue.
    """
    full = np.asarray(full, dtype=complex)
    if full.size == 0:
        raise ValueError("Full spectrum is empty.")
    matches = []
    for value in np.asarray(effective, dtype=complex):
        distances = np.abs(full - value)
        i = int(np.argmin(distances))
        matches.append(SpectrumMatch(complex(value), complex(full[i]),
                                     float(distances[i])))
    return matches


def spectral_drift(a, b):
    """max over a of the distance to the nearest eigenvalue in b."""
    return max(m.distance for m in match_spectra(a, b))
