"""Eigen-analysis, ranks, polar factors and unitarity measures for dense operators."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .tensor_core import as_matrix

__all__ = [
    "EigenSolverError", "SingularMatrixError",
    "SpectrumClaim", "EigenCluster", "EigenReport", "SpectrumCheck", "PolarFactors",
    "eigen", "check_spectrum", "svd", "numerical_rank", "polar", "unitarity_deviation",
    "RESIDUAL_TOL", "RANK_TOL", "SPECTRUM_TOL", "CLUSTER_RADIUS",
]

RESIDUAL_TOL = 1e-9
RANK_TOL = 1e-8
SPECTRUM_TOL = 1e-7
CLUSTER_RADIUS = 1e-6
MAX_EIGEN_DIM = 1024


class EigenSolverError(RuntimeError):
    pass


class SingularMatrixError(ValueError):
    pass


@dataclass(frozen=True)
class SpectrumClaim:
    """A multiset of eigenvalues, written ``e_(k)`` for value ``e`` with multiplicity ``k``.

    ``mode`` is ``"exact"`` or ``"up_to_common_scalar"``.
    """

    entries: tuple[tuple[complex, int], ...]
    mode: str = "exact"

    def __post_init__(self):
        if self.mode not in ("exact", "up_to_common_scalar"):
            raise ValueError(f"unknown spectrum claim mode {self.mode!r}")
        entries = tuple((complex(v), int(k)) for v, k in self.entries)
        if any(k < 1 for _, k in entries):
            raise ValueError("multiplicities must be positive")
        object.__setattr__(self, "entries", entries)

    @property
    def dimension(self) -> int:
        return sum(k for _, k in self.entries)

    def values(self) -> np.ndarray:
        return np.array([v for v, k in self.entries for _ in range(k)], dtype=complex)

    def to_dict(self) -> dict:
        return {"mode": self.mode,
                "entries": [{"value": [v.real, v.imag], "multiplicity": k}
                            for v, k in self.entries]}


@dataclass(frozen=True)
class EigenCluster:
    value: complex
    algebraic: int
    geometric: int


@dataclass(frozen=True)
class EigenReport:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    clusters: tuple[EigenCluster, ...]
    max_residual: float
    residual_ok: bool

    @property
    def diagonalizable(self) -> bool:
        return sum(c.geometric for c in self.clusters) == len(self.eigenvalues)

    @property
    def moduli_spread(self) -> float:
        """``max|lambda| - min|lambda|`` relative to ``max|lambda|``."""
        mods = np.abs(self.eigenvalues)
        top = mods.max()
        return float((top - mods.min()) / top) if top > 0 else 0.0


@dataclass(frozen=True)
class SpectrumCheck:
    ok: bool
    scale: complex
    max_deviation: float
    unmatched: tuple[tuple[complex, complex], ...] = field(default=())

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class PolarFactors:
    H: np.ndarray
    U: np.ndarray


def _cluster(values: np.ndarray, radius: float) -> list[np.ndarray]:
    """Greedy clustering; returns index arrays, largest-modulus seeds first."""
    order = np.argsort(-np.abs(values), kind="stable")
    left = list(order)
    groups = []
    while left:
        seed = values[left[0]]
        members = [i for i in left if abs(values[i] - seed) <= radius]
        groups.append(np.array(members))
        taken = set(members)
        left = [i for i in left if i not in taken]
    return groups


def eigen(M, tol: float = RESIDUAL_TOL, rank_tol: float = RANK_TOL,
          radius: float = CLUSTER_RADIUS) -> EigenReport:
    """Eigenvalues, eigenvectors and algebraic/geometric multiplicities of ``M``.

    Eigenvalues within ``radius * max|lambda|`` of a cluster seed are merged;
    the cluster centre is their mean, which is far more accurate than the
    individual eigenvalues when ``M`` is defective.  The geometric
    multiplicity is the nullity of ``M - centre * I`` at ``rank_tol * ||M||_2``.
    """
    M = as_matrix(M)
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("eigen needs a square matrix")
    if n > MAX_EIGEN_DIM:
        raise ValueError(f"dimension {n} exceeds the dense eigen limit {MAX_EIGEN_DIM}")
    try:
        vals, vecs = scipy.linalg.eig(M)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigenSolverError(f"eigensolver did not converge: {exc}") from exc
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    norm2 = np.linalg.norm(M, 2)
    scale = norm2 if norm2 > 0 else 1.0
    resid = np.linalg.norm(M @ vecs - vecs * vals, axis=0) / scale
    max_res = float(resid.max()) if n else 0.0

    top = np.abs(vals).max() if n else 0.0
    groups = _cluster(vals, radius * top if top > 0 else 1e-12)
    clusters = []
    for idx in groups:
        centre = vals[idx].mean()
        sv = np.linalg.svd(M - centre * np.eye(n), compute_uv=False)
        nullity = int(np.sum(sv <= rank_tol * scale))
        geometric = max(1, min(nullity, len(idx)))
        clusters.append(EigenCluster(complex(centre), len(idx), geometric))
    return EigenReport(vals, vecs, tuple(clusters), max_res, max_res <= tol)


def _match(computed: np.ndarray, target: np.ndarray):
    cost = np.abs(computed[:, None] - target[None, :])
    rows, cols = linear_sum_assignment(cost)
    return rows, cols, cost[rows, cols]


def check_spectrum(M, claim: SpectrumClaim, tol: float = SPECTRUM_TOL,
                   eigenvalues=None) -> SpectrumCheck:
    """Compare the spectrum of ``M`` with ``claim`` as multisets.

    In ``up_to_common_scalar`` mode a complex ``c`` is fitted so that
    ``c * claim`` matches; ``c`` is returned as ``scale``.  The tolerance is
    absolute, applied after scaling by ``max(1, max|c * claim|)``.
    """
    vals = np.asarray(eigen(M).eigenvalues if eigenvalues is None else eigenvalues,
                      dtype=complex)
    target = claim.values()
    if len(target) != len(vals):
        return SpectrumCheck(False, 1.0, float("inf"))

    def score(c):
        rows, cols, dist = _match(vals, c * target)
        bound = tol * max(1.0, float(np.abs(c * target).max()))
        return float(dist.max()), bound, rows, cols

    if claim.mode == "exact":
        candidates = [1.0 + 0j]
    else:
        anchor = target[np.argmax(np.abs(target))]
        if abs(anchor) == 0:
            return SpectrumCheck(False, 1.0, float("inf"))
        seeds = [g[0] for g in _cluster(vals, CLUSTER_RADIUS * np.abs(vals).max())]
        candidates = []
        for i in sorted(seeds, key=lambda i: -abs(vals[i])):
            c = vals[i] / anchor
            # refine by least squares over the induced assignment
            for _ in range(2):
                rows, cols, _ = _match(vals, c * target)
                t = target[cols]
                c = np.vdot(t, vals[rows]) / np.vdot(t, t)
            candidates.append(complex(c))

    best = None
    for c in candidates:
        dev, bound, rows, cols = score(c)
        if abs(c) > 1e-12 and (best is None or dev < best[0]):
            best = (dev, bound, c, rows, cols)
    if best is None:
        return SpectrumCheck(False, 0.0, float("inf"))
    dev, bound, c, rows, cols = best
    bad = tuple((complex(vals[r]), complex(c * target[k])) for r, k in zip(rows, cols)
                if abs(vals[r] - c * target[k]) > bound)
    return SpectrumCheck(dev <= bound, complex(c), dev, bad)


def svd(M):
    """Thin wrapper over LAPACK SVD returning ``(U, s, Vh)`` with ``s`` non-increasing."""
    M = as_matrix(M)
    try:
        return np.linalg.svd(M)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"SVD did not converge: {exc}") from exc


def numerical_rank(M, tol: float = RANK_TOL) -> int:
    """Number of singular values above ``tol * sigma_max``."""
    s = np.linalg.svd(as_matrix(M), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def polar(M, tol: float = RANK_TOL) -> PolarFactors:
    """Left polar decomposition ``M = H U`` with ``H = (M M^dag)^(1/2)`` positive definite.

    Raises
    ------
    SingularMatrixError
        If ``M`` is not square or is rank deficient at ``tol``.
    """
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise SingularMatrixError("polar decomposition needs a square matrix")
    W, s, Vh = svd(M)
    if s[0] == 0 or s[-1] <= tol * s[0]:
        raise SingularMatrixError("matrix is singular at rank tolerance")
    H = (W * s) @ W.conj().T
    H = (H + H.conj().T) / 2
    return PolarFactors(H, W @ Vh)


def unitarity_deviation(M) -> float:
    """Frobenius norm of ``M M^dag - I``."""
    M = as_matrix(M)
    return float(np.linalg.norm(M @ M.conj().T - np.eye(M.shape[0])))
