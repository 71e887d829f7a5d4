"""Dense qubit-chain algebra: Kronecker products, site embeddings, states and partial traces.

Conventions
-----------
Sites are numbered from 1.  Site 1 is the leftmost tensor factor and the most
significant bit of a basis index, so ``|q1 q2 ... qn>`` has index
``q1 * 2**(n-1) + ... + qn``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

__all__ = [
    "I2", "X", "Y", "Z", "SWAP",
    "PureState", "SiteEmbedding",
    "kron", "kron_all", "embed", "apply_on_sites", "pauli", "apply",
    "basis_state", "product_state", "partial_trace", "op_schmidt_reshape",
    "as_matrix",
]

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
SWAP = np.array([[1, 0, 0, 0],
                 [0, 0, 1, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1]], dtype=complex)

NORM_TOL = 1e-12


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite complex 2-D array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _num_qubits(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 2 ** n != dim:
        raise ValueError(f"dimension {dim} is not a power of 2")
    return n


@dataclass(frozen=True)
class PureState:
    """Immutable state vector on ``num_qubits`` qubits.

    Unnormalized vectors are allowed; ``normalized`` reports whether the
    norm is within 1e-12 of one.  Nothing is renormalized implicitly.
    """

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be positive")
        if amps.shape[0] != 2 ** self.num_qubits:
            raise ValueError(
                f"expected {2 ** self.num_qubits} amplitudes, got {amps.shape[0]}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("state has non-finite amplitudes")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_vector(cls, vec) -> "PureState":
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        return cls(_num_qubits(vec.shape[0]), vec)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def normalized(self) -> bool:
        return abs(self.norm - 1.0) < NORM_TOL

    def normalize(self) -> "PureState":
        nrm = self.norm
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        return PureState(self.num_qubits, self.amplitudes / nrm)

    def tensor(self) -> np.ndarray:
        """Amplitudes as an ``(2,) * num_qubits`` array."""
        return self.amplitudes.reshape((2,) * self.num_qubits)

    def support(self, tol: float = 1e-12) -> dict[str, complex]:
        """Nonzero amplitudes keyed by bit string."""
        n = self.num_qubits
        return {format(i, f"0{n}b"): complex(a)
                for i, a in enumerate(self.amplitudes) if abs(a) > tol}


@dataclass(frozen=True)
class SiteEmbedding:
    """Placement of an ``m``-site window starting at ``start`` on an ``n``-site chain."""

    window: int
    start: int
    total: int
    local_dim: int = 2

    def __post_init__(self):
        if self.local_dim != 2:
            raise ValueError("only qubits (local dimension 2) are supported")
        if self.window < 1 or self.start < 1:
            raise ValueError("window and start must be positive")
        if self.start + self.window - 1 > self.total:
            raise ValueError(
                f"window of width {self.window} at site {self.start} "
                f"overflows a chain of {self.total} sites")

    @property
    def left(self) -> int:
        return self.start - 1

    @property
    def right(self) -> int:
        return self.total - self.start - self.window + 1


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(*mats) -> np.ndarray:
    return reduce(np.kron, [as_matrix(m) for m in mats])


def embed(op, placement: SiteEmbedding) -> np.ndarray:
    """Pad ``op`` with identities: ``I^(start-1) (x) op (x) I^(n-start-m+1)``."""
    op = as_matrix(op)
    if op.shape != (2 ** placement.window,) * 2:
        raise ValueError(
            f"operator of shape {op.shape} does not act on {placement.window} qubits")
    left = np.eye(2 ** placement.left, dtype=complex)
    right = np.eye(2 ** placement.right, dtype=complex)
    return np.kron(np.kron(left, op), right)


def apply_on_sites(op, target, start: int, n: int) -> np.ndarray:
    """Compute ``embed(op, start) @ target`` without forming the embedded matrix.

    ``target`` is a vector of length ``2**n`` or a ``(2**n, k)`` matrix.
    """
    op = np.asarray(op, dtype=complex)
    m = _num_qubits(op.shape[0])
    place = SiteEmbedding(m, start, n)
    target = np.asarray(target, dtype=complex)
    if target.shape[0] != 2 ** n:
        raise ValueError(f"target has leading dimension {target.shape[0]}, expected {2 ** n}")
    cols = target.reshape(2 ** n, -1)
    t = cols.reshape(2 ** place.left, 2 ** m, 2 ** place.right * cols.shape[1])
    out = np.matmul(op, t)
    return out.reshape(target.shape)


def pauli(kind: str, site: int, n: int) -> np.ndarray:
    """Single-site Pauli ``kind`` in {"X", "Y", "Z"} on ``site`` of an ``n``-qubit chain."""
    mats = {"X": X, "Y": Y, "Z": Z}
    try:
        p = mats[kind.upper()]
    except KeyError:
        raise ValueError(f"unknown Pauli {kind!r}") from None
    if not 1 <= site <= n:
        raise ValueError(f"site {site} out of range 1..{n}")
    return embed(p, SiteEmbedding(1, site, n))


def apply(op, state: PureState) -> PureState:
    op = as_matrix(op)
    if op.shape != (state.amplitudes.shape[0],) * 2:
        raise ValueError(
            f"operator of shape {op.shape} cannot act on {state.num_qubits} qubits")
    return PureState(state.num_qubits, op @ state.amplitudes)


def basis_state(bits: str) -> PureState:
    """Computational basis ket, e.g. ``basis_state("0100")``."""
    n = len(bits)
    vec = np.zeros(2 ** n, dtype=complex)
    vec[int(bits, 2)] = 1.0
    return PureState(n, vec)


def product_state(*factors) -> PureState:
    """Tensor product of single-qubit vectors (not normalized)."""
    vec = reduce(np.kron, [np.asarray(f, dtype=complex).reshape(2) for f in factors])
    return PureState(len(factors), vec)


def partial_trace(rho_or_state, keep) -> np.ndarray:
    """Reduced density matrix on the sites in ``keep`` (1-based, ascending order).

    Accepts a :class:`PureState`, a state vector or a density matrix.
    """
    keep = sorted(set(int(s) for s in keep))
    if not keep:
        raise ValueError("keep set is empty")
    if isinstance(rho_or_state, PureState):
        arr = rho_or_state.amplitudes
    else:
        arr = np.asarray(rho_or_state, dtype=complex)
    n = _num_qubits(arr.shape[0])
    if keep[0] < 1 or keep[-1] > n:
        raise ValueError(f"keep sites {keep} out of range 1..{n}")
    kept = [s - 1 for s in keep]
    traced = [s for s in range(n) if s not in kept]
    dk = 2 ** len(kept)
    if arr.ndim == 1:
        psi = np.transpose(arr.reshape((2,) * n), kept + traced).reshape(dk, -1)
        return psi @ psi.conj().T
    rho = arr.reshape((2,) * (2 * n))
    perm = kept + traced + [n + s for s in kept] + [n + s for s in traced]
    rho = np.transpose(rho, perm).reshape(dk, 2 ** len(traced), dk, 2 ** len(traced))
    return np.einsum("ajbj->ab", rho)


def op_schmidt_reshape(M, cut) -> np.ndarray:
    """Realign ``M`` so its matrix rank is the operator-Schmidt rank across ``cut``.

    ``cut`` is the set of sites (1-based) on one side.  Rows index the
    (out, in) pairs of those sites, columns the (out, in) pairs of the rest,
    so ``M = A (x) B`` across the cut iff the result has rank one.
    """
    M = as_matrix(M)
    n = _num_qubits(M.shape[0])
    side = sorted(set(int(s) for s in cut))
    if not side or side[0] < 1 or side[-1] > n or len(side) == n:
        raise ValueError(f"cut {side} is not a proper bipartition of 1..{n}")
    a = [s - 1 for s in side]
    b = [s for s in range(n) if s not in a]
    t = M.reshape((2,) * (2 * n))
    perm = a + [n + s for s in a] + b + [n + s for s in b]
    return np.transpose(t, perm).reshape(4 ** len(a), 4 ** len(b))
