"""
ElimPy Liouvillian Builders

Builds the full composite Liouvillian (system ⊗ mode) and the effective
reduced Liouvillian (system only), at zero and finite thermal occupation.

Vectorization is column-stacking throughout: vec(A X B) = (B^T ⊗ A) vec(X).
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple

import numpy as np
import scipy.sparse as sp

from opalg import (Operator, OperatorMismatchError, bosonic_ops,
                   commutator, dagger, embed_mode, embed_system, kron,
                   random_density, spectral_norm)
from utilities import ElimPyError

logger = logging.getLogger("elimpy.liouville")

DEFAULT_DENSE_CAP = 4096
DEFAULT_RESIDUAL_TOL = 1e-8
_RESIDUAL_FLOOR = 1e-13


class InvalidSpecError(ElimPyError, ValueError):
    pass


class AlphaInconsistentError(ElimPyError):
    pass


class DenseCapExceededError(ElimPyError):
    pass


def vec(data):
    return np.asarray(data).reshape(-1, order="F")


def unvec(v, dim):
    return np.asarray(v).reshape(dim, dim, order="F")


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """
    The triple (H_S, Omega_S, S) plus the mode damping kappa and thermal
    occupation nbar. Together they fix the composite Hamiltonian
    H = H_S + a† Omega_S a + a† S + S† a and the thermal dissipator.
    """
    H_S: Operator
    Omega_S: Operator
    S: Operator
    kappa: float
    nbar: float = 0.0
    mode: str = "cavity"

    def __post_init__(self):
        try:
            self.H_S._check(self.Omega_S)
            self.H_S._check(self.S)
        except OperatorMismatchError as e:
            raise InvalidSpecError(str(e)) from None
        if not self.H_S.is_hermitian():
            raise InvalidSpecError("H_S is not Hermitian.")
        if not self.Omega_S.is_hermitian():
            raise InvalidSpecError("Omega_S is not Hermitian.")
        if not self.kappa > 0:
            raise InvalidSpecError(
                "kappa must be positive, got {}.".format(self.kappa))
        if not self.nbar >= 0:
            raise InvalidSpecError(
                "nbar must be nonnegative, got {}.".format(self.nbar))

    @property
    def dim(self):
        return self.H_S.dim

    @property
    def space(self):
        return self.H_S.space

    def with_nbar(self, nbar):
        return replace(self, nbar=float(nbar))

    def elimination_residual(self, alpha):
        """
        R = [H_S, alpha] + Omega_S alpha + S - i kappa alpha, which vanishes
        for the steady effective-field operator.
        """
        return (commutator(self.H_S, alpha) + self.Omega_S @ alpha + self.S
                - 1j * self.kappa * alpha)


class SuperOp:
    """
    Linear map on operator space. Carries a sparse column-stacked matrix,
    a matrix-free action rho -> L rho, or both.
    """

    def __init__(self, dim, *, matrix=None, action=None, space="",
                 description="", meta=None):
        if matrix is None and action is None:
            raise ValueError("SuperOp needs a matrix or an action.")
        if matrix is not None:
            matrix = sp.csr_matrix(matrix, dtype=complex)
            if matrix.shape != (dim * dim, dim * dim):
                raise ValueError(
                    "Matrix shape {} does not act on dim {}.".format(
                        matrix.shape, dim))
        self.dim = dim
        self.space = space
        self.description = description
        self.meta = dict(meta or {})
        self._matrix = matrix
        self._action = action

    def __repr__(self):
        return "<SuperOp dim={} {}>".format(self.dim, self.description)

    @property
    def liouville_dim(self):
        return self.dim * self.dim

    @property
    def has_matrix(self):
        return self._matrix is not None

    @property
    def sparse(self):
        if self._matrix is None:
            raise DenseCapExceededError(
                "{!r} is matrix-free.".format(self))
        return self._matrix

    def dense(self, cap=DEFAULT_DENSE_CAP):
        """
        Materialize the full d²×d² matrix. Refused above the dense cap.
        """
        if cap is not None and self.liouville_dim > cap:
            raise DenseCapExceededError(
                "Liouville dimension {} exceeds the dense cap {}.".format(
                    self.liouville_dim, cap))
        return self.sparse.toarray()

    def apply_vec(self, v):
        if self._matrix is not None:
            return self._matrix @ v
        return vec(self._action(unvec(v, self.dim)))

    def apply(self, rho, matrix_free=True):
        if rho.dim != self.dim:
            raise OperatorMismatchError(
                "{!r} cannot act on {!r}.".format(self, rho))
        if matrix_free and self._action is not None:
            return Operator(self._action(rho.data), rho.space)
        return Operator(unvec(self.sparse @ vec(rho.data), self.dim),
                        rho.space)


@dataclass(frozen=True, eq=False)
class EffectiveModel:
    alpha: Operator
    H_eff: Operator
    jump_down: Operator
    jump_up: Operator
    rate_down: float
    rate_up: float
    nbar: float = 0.0
    meta: dict = field(default_factory=dict)


class GeneratorDefects(NamedTuple):
    trace: float
    hermiticity: float


def _lindblad_matrix(h, jumps):
    d = h.shape[0]
    eye = sp.identity(d, dtype=complex, format="csr")
    hs = sp.csr_matrix(h)
    matrix = -1j * (sp.kron(eye, hs) - sp.kron(hs.T, eye))
    for rate, o in jumps:
        os_ = sp.csr_matrix(o)
        ood = sp.csr_matrix(o.conj().T @ o)
        matrix = matrix + rate * (2.0 * sp.kron(os_.conj(), os_)
                                  - sp.kron(eye, ood) - sp.kron(ood.T, eye))
    return matrix.tocsr()


def _lindblad_action(h, jumps) -> Callable:
    terms = [(rate, o, o.conj().T, o.conj().T @ o) for rate, o in jumps]

    def action(rho):
        out = -1j * (h @ rho - rho @ h)
        for rate, o, od, ood in terms:
            out = out + rate * (2.0 * o @ rho @ od - ood @ rho - rho @ ood)
        return out

    return action


def lindblad_superop(H, jumps, *, description="", build_matrix=True,
                     meta=None):
    """
    Generic Lindblad generator L rho = -i[H, rho] + sum_k rate_k D[O_k] rho.

    :param H: Hermitian Operator.
    :param jumps: Iterable of (rate, Operator) pairs; zero rates are kept.
    :param description: Human-readable label stored on the SuperOp.
    :param build_matrix: Also assemble the sparse matrix.
    :return: SuperOp carrying the matrix-free action (and the matrix).
    """
    h = np.array(H.data)
    raw = []
    for rate, o in jumps:
        H._check(o)
        raw.append((float(rate), np.array(o.data)))
    matrix = _lindblad_matrix(h, raw) if build_matrix else None
    return SuperOp(H.dim, matrix=matrix, action=_lindblad_action(h, raw),
                   space=H.space, description=description, meta=meta)


def composite_hamiltonian(spec, L):
    """
    H = H_S ⊗ I + Omega_S ⊗ a†a + S ⊗ a† + S† ⊗ a on (system ⊗ mode).
    """
    a, adag, n = bosonic_ops(L, spec.mode)
    return (embed_system(spec.H_S, L, spec.mode)
            + kron(spec.Omega_S, n)
            + kron(spec.S, adag)
            + kron(dagger(spec.S), a))


def _mode_jumps(spec, L):
    a, adag, _ = bosonic_ops(L, spec.mode)
    down = embed_mode(a, spec.dim, spec.space)
    up = embed_mode(adag, spec.dim, spec.space)
    return [(spec.kappa * (spec.nbar + 1.0), down),
            (spec.kappa * spec.nbar, up)]


def build_full_liouvillian(spec, L, *, build_matrix=True):
    """
    Full composite Liouvillian
    L rho = -i[H, rho] + kappa{(nbar+1) D[a] + nbar D[a†]} rho
    on dim(spec)*L dimensional density matrices.
    """
    if L < 2:
        raise InvalidSpecError("Mode cutoff must be at least 2, got "
                               "{}.".format(L))
    H = composite_hamiltonian(spec, L)
    logger.debug("Building full Liouvillian: system dim %d, cutoff %d, "
                 "nbar %g.", spec.dim, L, spec.nbar)
    return lindblad_superop(
        H, _mode_jumps(spec, L),
        description="full(L={}, nbar={:g})".format(L, spec.nbar),
        build_matrix=build_matrix,
        meta={"cutoff": L, "system_dim": spec.dim})


def _certified_alpha(spec, alpha, residual_tol):
    """
    Unwrap an AlphaSolution (or take a bare Operator) and refuse it when it
    does not solve the elimination condition for spec.
    """
    method = getattr(alpha, "method", None)
    method = getattr(method, "value", method)
    op = getattr(alpha, "alpha", alpha)
    try:
        spec.H_S._check(op)
    except OperatorMismatchError as e:
        raise AlphaInconsistentError(str(e)) from None
    if method == "optomech_weak":
        logger.warning("Weak-coupling alpha used without residual gate; its "
                       "residual is second order in g.")
        return op
    residual = spectral_norm(spec.elimination_residual(op))
    bound = max(residual_tol * spectral_norm(spec.S), _RESIDUAL_FLOOR)
    if residual > bound:
        raise AlphaInconsistentError(
            "Elimination residual {:.3e} exceeds {:.3e}; alpha does not "
            "belong to this spec.".format(residual, bound))
    return op


def effective_hamiltonian(spec, alpha, *, residual_tol=DEFAULT_RESIDUAL_TOL):
    """
    H_eff = H_S + (α†S + S†α)/2 + (nbar/2)([α†, S] + [S†, α]) + nbar Omega_S.

    The nbar terms are skipped entirely at nbar = 0, so the result is then
    exactly the zero-occupation expression.
    """
    return _effective_hamiltonian(
        spec, _certified_alpha(spec, alpha, residual_tol))


def _effective_hamiltonian(spec, a):
    adag, sdag = dagger(a), dagger(spec.S)
    h_eff = spec.H_S + 0.5 * (adag @ spec.S + sdag @ a)
    if spec.nbar:
        h_eff = (h_eff
                 + (spec.nbar / 2.0) * (commutator(adag, spec.S)
                                        + commutator(sdag, a))
                 + spec.nbar * spec.Omega_S)
    return h_eff


def build_effective_liouvillian(spec, alpha, *,
                                residual_tol=DEFAULT_RESIDUAL_TOL):
    """
    Effective Liouvillian on the system alone,
    L_eff rho = -i[H_eff, rho] + kappa{(nbar+1) D[α] + nbar D[α†]} rho.

    :param spec: SystemSpec.
    :param alpha: Operator or AlphaSolution for spec.
    :return: Tuple (SuperOp, EffectiveModel).
    """
    a = _certified_alpha(spec, alpha, residual_tol)
    h_eff = _effective_hamiltonian(spec, a)
    rate_down = spec.kappa * (spec.nbar + 1.0)
    jumps = [(rate_down, a)]
    rate_up = 0.0
    if spec.nbar:
        rate_up = spec.kappa * spec.nbar
        jumps.append((rate_up, dagger(a)))
    model = EffectiveModel(alpha=a, H_eff=h_eff, jump_down=a,
                           jump_up=dagger(a), rate_down=rate_down,
                           rate_up=rate_up, nbar=spec.nbar,
                           meta={"alpha_norm_sq": displacement_norm(a)})
    superop = lindblad_superop(
        h_eff, jumps, description="effective(nbar={:g})".format(spec.nbar),
        meta={"system_dim": spec.dim})
    return superop, model


def apply_liouvillian(target, rho, L=None):
    """
    Matrix-free action of a SuperOp, or of the full Liouvillian of a
    SystemSpec, on rho. For a spec the cutoff is inferred from rho.
    """
    if isinstance(target, SystemSpec):
        if L is None:
            L, rest = divmod(rho.dim, target.dim)
            if rest:
                raise OperatorMismatchError(
                    "Composite dim {} is not a multiple of system dim "
                    "{}.".format(rho.dim, target.dim))
        if rho.dim != target.dim * L:
            raise OperatorMismatchError(
                "rho has dim {}, expected {}.".format(rho.dim,
                                                      target.dim * L))
        H = composite_hamiltonian(target, L)
        jumps = [(rate, np.array(o.data)) for rate, o in
                 _mode_jumps(target, L)]
        action = _lindblad_action(np.array(H.data), jumps)
        return Operator(action(rho.data), rho.space)
    return target.apply(rho, matrix_free=True)


def generator_defects(superop, samples=100, seed=0):
    """
    Largest trace and Hermiticity-preservation defects of a generator over
    random states, each relative to the size of the input.

    :return: GeneratorDefects(trace, hermiticity).
    """
    rng = np.random.default_rng(seed)
    worst_trace = 0.0
    worst_herm = 0.0
    for _ in range(samples):
        rho = random_density(superop.dim, rng, superop.space)
        out = superop.apply(rho)
        scale = max(np.linalg.norm(rho.data), 1e-300)
        worst_trace = max(worst_trace, abs(out.trace()) / scale)
        x = Operator(rng.normal(size=(superop.dim, superop.dim))
                     + 1j * rng.normal(size=(superop.dim, superop.dim)),
                     superop.space)
        lhs = dagger(superop.apply(x)).data
        rhs = superop.apply(dagger(x)).data
        size = max(np.max(np.abs(lhs)), 1e-300)
        worst_herm = max(worst_herm, np.max(np.abs(lhs - rhs)) / size)
    return GeneratorDefects(float(worst_trace), float(worst_herm))


def displacement_norm(alpha):
    """
    ||alpha||², the scale of the neglected second-order corrections to
    system observables.
    """
    return spectral_norm(alpha) ** 2