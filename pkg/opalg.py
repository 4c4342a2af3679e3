"""
ElimPy Operator Algebra

Dense operator kernel: construction, composition and norms of
finite-dimensional complex operators, bosonic truncations and spin
embeddings. Every composite object is ordered (system ⊗ mode).
"""

import numpy as np

from utilities import ElimPyError

TENSOR = "⊗"


class OperatorMismatchError(ElimPyError, ValueError):
    pass


class InvalidOperatorError(ElimPyError, ValueError):
    pass


class Operator:
    """
    Immutable dense complex square matrix tagged with the tensor-factor
    structure it lives on (eg "spin^4", "mirror⊗cavity").

    Composition is only defined between operators with equal dim and
    space tag; anything else raises OperatorMismatchError.
    """
    __slots__ = ("_data", "_space")
    __array_priority__ = 1000

    def __init__(self, data, space=""):
        data = np.array(data, dtype=complex)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise InvalidOperatorError(
                "Operator data must be a square matrix, got shape "
                "{}.".format(data.shape))
        data.setflags(write=False)
        self._data = data
        self._space = str(space)

    @property
    def data(self):
        return self._data

    @property
    def space(self):
        return self._space

    @property
    def dim(self):
        return self._data.shape[0]

    def __repr__(self):
        return "<Operator dim={} space={!r}>".format(self.dim, self.space)

    def _check(self, other):
        if not isinstance(other, Operator):
            raise TypeError("Expected an Operator, got "
                            "{}.".format(type(other).__name__))
        if other.dim != self.dim or other.space != self.space:
            raise OperatorMismatchError(
                "Cannot compose {!r} with {!r}.".format(self, other))

    def _same_space(self, data):
        return Operator(data, self._space)

    def __matmul__(self, other):
        self._check(other)
        return self._same_space(self._data @ other._data)

    def __add__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return self._same_space(self._data + other._data)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return self._same_space(self._data - other._data)
        return NotImplemented

    def __mul__(self, scalar):
        if isinstance(scalar, Operator):
            raise TypeError("Use @ for operator products.")
        return self._same_space(self._data * complex(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self._same_space(self._data / complex(scalar))

    def __neg__(self):
        return self._same_space(-self._data)

    def dag(self):
        return dagger(self)

    def trace(self):
        return complex(np.trace(self._data))

    def allclose(self, other, atol=1e-12, rtol=0.0):
        self._check(other)
        return bool(np.allclose(self._data, other._data, atol=atol,
                                rtol=rtol))

    def is_hermitian(self, rtol=1e-12):
        """
        Entrywise |A - A†| <= rtol * ||A||, with a zero operator counted as
        Hermitian.
        """
        scale = spectral_norm(self)
        defect = np.max(np.abs(self._data - self._data.conj().T))
        return defect <= rtol * scale or defect == 0.0

    def is_scalar(self, atol=1e-14):
        """
        True when the operator is a multiple of the identity.
        """
        diag = np.diag(self._data)
        off = self._data - np.diag(diag)
        return (np.max(np.abs(off)) <= atol
                and np.max(np.abs(diag - diag[0])) <= atol)


# Construction

def identity(dim, space=""):
    if dim < 1:
        raise InvalidOperatorError("Dimension must be positive.")
    return Operator(np.eye(dim), space)


def zeros(dim, space=""):
    return Operator(np.zeros((dim, dim)), space)


_PAULI = {
    "i": np.eye(2),
    "x": np.array([[0, 1], [1, 0]]),
    "y": np.array([[0, -1j], [1j, 0]]),
    "z": np.array([[1, 0], [0, -1]]),
    "+": np.array([[0, 1], [0, 0]]),
    "-": np.array([[0, 0], [1, 0]]),
}
_PAULI["−"] = _PAULI["-"]


def pauli(q):
    """
    Single-site Pauli operator for q in {i, x, y, z, +, -}. Basis index 0 is
    spin up, so sigma^z = diag(1, -1) and sigma^+ = |0><1|.
    """
    try:
        return Operator(_PAULI[q], "spin")
    except KeyError:
        raise InvalidOperatorError("Unknown Pauli axis {!r}.".format(q)) \
            from None


def kron(A, B):
    """
    Tensor product with A as the left factor.

    :param A: Left factor.
    :param B: Right factor.
    :return: Operator of dim(A)*dim(B) tagged "A.space⊗B.space".
    """
    space = TENSOR.join(s for s in (A.space, B.space) if s)
    return Operator(np.kron(A.data, B.data), space)


def dagger(A):
    return Operator(A.data.conj().T, A.space)


def commutator(A, B):
    A._check(B)
    return Operator(A.data @ B.data - B.data @ A.data, A.space)


def anticommutator(A, B):
    A._check(B)
    return Operator(A.data @ B.data + B.data @ A.data, A.space)


def bosonic_ops(L, space="mode"):
    """
    Truncated bosonic ladder operators on the lowest L Fock states.

    :param L: Cutoff dimension, at least 2.
    :param space: Space tag for the mode.
    :return: Tuple (a, a†, n) with n = diag(0, ..., L-1).
    """
    if L < 2:
        raise InvalidOperatorError(
            "Bosonic cutoff must be at least 2, got {}.".format(L))
    a = np.diag(np.sqrt(np.arange(1, L, dtype=float)), k=1)
    a = Operator(a, space)
    adag = dagger(a)
    n = Operator(np.diag(np.arange(L, dtype=float)), space)
    return a, adag, n


def spin_site(q, site, N):
    """
    Pauli operator q acting on site n (1-based) of an N-spin register,
    identity elsewhere.
    """
    if N < 1 or not 1 <= site <= N:
        raise InvalidOperatorError(
            "Site {} outside chain of length {}.".format(site, N))
    single = pauli(q).data
    left = np.eye(2 ** (site - 1))
    right = np.eye(2 ** (N - site))
    return Operator(np.kron(np.kron(left, single), right),
                    "spin^{}".format(N))


def basis_projector(m, dim, space=""):
    if not 0 <= m < dim:
        raise InvalidOperatorError(
            "Basis index {} outside dimension {}.".format(m, dim))
    data = np.zeros((dim, dim))
    data[m, m] = 1.0
    return Operator(data, space)


def embed_system(A, L, mode_space="mode"):
    """A ⊗ I_L."""
    return kron(A, identity(L, mode_space))


def embed_mode(B, d, system_space=""):
    """I_d ⊗ B."""
    return kron(identity(d, system_space), B)


def partial_trace_mode(rho, d, L, space=""):
    """
    Trace out the mode factor of a (system ⊗ mode) operator.
    """
    if rho.dim != d * L:
        raise OperatorMismatchError(
            "Composite dim {} is not {}x{}.".format(rho.dim, d, L))
    reduced = np.einsum("iaja->ij", rho.data.reshape(d, L, d, L))
    return Operator(reduced, space)


def dissipator_apply(O, rho):
    """
    D[O]rho = 2 O rho O† - O†O rho - rho O†O.
    """
    O._check(rho)
    o, r = O.data, rho.data
    od = o.conj().T
    ood = od @ o
    return Operator(2.0 * o @ r @ od - ood @ r - r @ ood, rho.space)


def spectral_norm(A):
    """
    Largest singular value. This is the operator norm used throughout.
    """
    if not np.any(A.data):
        return 0.0
    return float(np.linalg.norm(A.data, ord=2))


# Random states, used by property checks

def random_hermitian(dim, rng=None, space=""):
    rng = np.random.default_rng(rng)
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return Operator((m + m.conj().T) / 2.0, space)


def random_density(dim, rng=None, space=""):
    """
    Random full-rank density matrix (Ginibre construction).
    """
    rng = np.random.default_rng(rng)
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return Operator(rho / np.trace(rho).real, space)


def is_density_matrix(rho, atol=1e-10):
    """
    Hermitian, unit trace and positive semidefinite within atol.
    """
    data = rho.data
    if np.max(np.abs(data - data.conj().T)) > atol:
        return False
    if abs(np.trace(data) - 1.0) > atol:
        return False
    return float(np.linalg.eigvalsh((data + data.conj().T) / 2.0)[0]) >= -atol
