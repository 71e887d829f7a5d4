"""SLOCC classification of pure states, tangles, W certificates and the ILO unitarizability test.

Two states are SLOCC equivalent when an invertible local operator (ILO),
a tensor product of per-site invertible matrices, maps one to the other.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spectral import EigenReport, RANK_TOL, eigen, numerical_rank, unitarity_deviation
from .tensor_core import PureState, X, Y, kron_all, op_schmidt_reshape, partial_trace

__all__ = [
    "NotNormalizedError", "NonPhysicalStateError",
    "SloccReport", "IloOperator", "UnitarizabilityReport",
    "local_ranks", "three_tangle", "concurrence", "classify3", "strip_spectators",
    "apply_ilo", "w_state", "w_equivalence_certificate", "ilo_unitarizability_test",
    "analyze_output", "TAU_TOL",
]

TAU_TOL = 1e-8
LOCAL_RANK_TOL = 1e-8


class NotNormalizedError(ValueError):
    pass


class NonPhysicalStateError(ValueError):
    pass


@dataclass(frozen=True)
class SloccReport:
    local_ranks: tuple[int, ...]
    three_tangle: float
    concurrences: dict
    cls: str
    cut: tuple[int, ...] | None = None
    spectator_sites: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {"class": self.cls, "cut": list(self.cut) if self.cut else None,
                "local_ranks": list(self.local_ranks), "three_tangle": self.three_tangle,
                "concurrences": self.concurrences,
                "spectator_sites": list(self.spectator_sites)}


@dataclass(frozen=True)
class IloOperator:
    """One invertible 2x2 factor per site."""

    factors: tuple[np.ndarray, ...]

    def __post_init__(self):
        facs = tuple(np.array(f, dtype=complex).reshape(2, 2) for f in self.factors)
        for f in facs:
            if abs(np.linalg.det(f)) <= RANK_TOL:
                raise ValueError("ILO factor is not invertible")
        object.__setattr__(self, "factors", facs)

    def matrix(self) -> np.ndarray:
        return kron_all(*self.factors)


@dataclass
class UnitarizabilityReport:
    verdict: str
    moduli_spread: float
    diagonalizable: bool | None = None
    cut_ranks: dict = field(default_factory=dict)
    basis: str | None = None
    note: str = ""
    candidate_unitarizes: bool | None = None

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "moduli_spread": self.moduli_spread,
                "diagonalizable": self.diagonalizable,
                "cut_ranks": {str(k): v for k, v in sorted(self.cut_ranks.items())},
                "basis": self.basis, "note": self.note,
                "candidate_unitarizes": self.candidate_unitarizes}


def _require_normalized(state: PureState):
    if not state.normalized:
        raise NotNormalizedError(f"state norm is {state.norm:.6g}, expected 1")


def local_ranks(state: PureState, tol: float = LOCAL_RANK_TOL) -> tuple[int, ...]:
    """Rank of each single-site reduced density matrix, relative to its largest eigenvalue."""
    ranks = []
    for s in range(1, state.num_qubits + 1):
        w = np.linalg.eigvalsh(partial_trace(state, [s]))
        ranks.append(int(np.sum(w > tol * w.max())))
    return tuple(ranks)


def three_tangle(state: PureState) -> float:
    """Three-tangle ``4 |Det a|`` from Cayley's hyperdeterminant of the 2x2x2 amplitudes."""
    if state.num_qubits != 3:
        raise ValueError("three_tangle needs a 3-qubit state")
    _require_normalized(state)
    a = state.tensor()
    d1 = (a[0, 0, 0] ** 2 * a[1, 1, 1] ** 2 + a[0, 0, 1] ** 2 * a[1, 1, 0] ** 2
          + a[0, 1, 0] ** 2 * a[1, 0, 1] ** 2 + a[1, 0, 0] ** 2 * a[0, 1, 1] ** 2)
    d2 = (a[0, 0, 0] * a[1, 1, 1] * (a[0, 1, 1] * a[1, 0, 0] + a[1, 0, 1] * a[0, 1, 0]
                                     + a[1, 1, 0] * a[0, 0, 1])
          + a[0, 1, 1] * a[1, 0, 0] * (a[1, 0, 1] * a[0, 1, 0] + a[1, 1, 0] * a[0, 0, 1])
          + a[1, 0, 1] * a[0, 1, 0] * a[1, 1, 0] * a[0, 0, 1])
    d3 = (a[0, 0, 0] * a[1, 1, 0] * a[1, 0, 1] * a[0, 1, 1]
          + a[1, 1, 1] * a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 0])
    return float(4 * abs(d1 - 2 * d2 + 4 * d3))


def concurrence(rho, tol: float = 1e-9) -> float:
    """Wootters concurrence of a two-qubit density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise NonPhysicalStateError("concurrence needs a 4x4 density matrix")
    if np.linalg.norm(rho - rho.conj().T) > tol:
        raise NonPhysicalStateError("density matrix is not hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise NonPhysicalStateError("density matrix does not have unit trace")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise NonPhysicalStateError("density matrix is not positive semidefinite")
    # the lambdas are the singular values of sqrt(rho) (Y x Y) conj(sqrt(rho)); this
    # avoids square roots of tiny eigenvalues of the non-hermitian rho * rho_tilde
    w, v = np.linalg.eigh((rho + rho.conj().T) / 2)
    root = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    lam = np.linalg.svd(root @ np.kron(Y, Y) @ root.conj(), compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def classify3(state: PureState, tol: float = TAU_TOL) -> SloccReport:
    """SLOCC class of a normalized three-qubit state.

    All local ranks 1 gives ``product``; one rank-1 site gives
    ``biseparable`` with that site split off; otherwise the three-tangle
    separates ``GHZ`` (``tau >= tol``) from ``W``.
    """
    if state.num_qubits != 3:
        raise ValueError("classify3 needs a 3-qubit state")
    _require_normalized(state)
    ranks = local_ranks(state)
    tau = three_tangle(state)
    conc = {f"{i}{j}": concurrence(partial_trace(state, [i, j]))
            for i, j in ((1, 2), (1, 3), (2, 3))}
    ones = [s + 1 for s, r in enumerate(ranks) if r == 1]
    cut = None
    if len(ones) == 3:
        cls = "product"
    elif len(ones) == 1:
        cls = "biseparable"
        cut = (ones[0],)
    elif not ones:
        cls = "W" if tau < tol else "GHZ"
    else:
        cls = "undetermined"
    return SloccReport(ranks, tau, conc, cls, cut)


def strip_spectators(state: PureState, tol: float = LOCAL_RANK_TOL):
    """Factor out every site left in a pure single-qubit state.

    Returns ``(core, spectators)`` where ``spectators`` are 1-based site
    labels of the input.  ``core`` is normalized, or ``None`` when every
    site factors out.
    """
    _require_normalized(state)
    labels = list(range(1, state.num_qubits + 1))
    spectators = []
    psi = state.amplitudes.copy()
    changed = True
    while changed and labels:
        changed = False
        n = len(labels)
        for pos in range(n):
            cur = PureState(n, psi)
            rho = partial_trace(cur, [pos + 1])
            w, v = np.linalg.eigh(rho)
            if w[0] > tol * w[1]:
                continue
            phi = v[:, 1]
            t = np.moveaxis(psi.reshape((2,) * n), pos, 0).reshape(2, -1)
            psi = phi.conj() @ t
            psi = psi / np.linalg.norm(psi)
            spectators.append(labels.pop(pos))
            changed = True
            break
    core = PureState(len(labels), psi) if labels else None
    return core, tuple(sorted(spectators))


def apply_ilo(state: PureState, ilo: IloOperator) -> PureState:
    if len(ilo.factors) != state.num_qubits:
        raise ValueError("ILO and state have different numbers of sites")
    return PureState(state.num_qubits, ilo.matrix() @ state.amplitudes)


def w_state(n: int) -> PureState:
    """Normalized ``(|10..0> + |01..0> + ... + |0..01>) / sqrt(n)``."""
    vec = np.zeros(2 ** n, dtype=complex)
    for k in range(n):
        vec[2 ** (n - 1 - k)] = 1
    return PureState(n, vec / np.sqrt(n))


def _proportional(a, b, tol):
    a = np.asarray(a)
    b = np.asarray(b)
    c = np.vdot(b, a) / np.vdot(b, b)
    return abs(c) > tol and np.linalg.norm(a - c * b) <= tol * np.linalg.norm(a)


def w_equivalence_certificate(state: PureState, tol: float = 1e-10) -> IloOperator | None:
    """An ILO mapping ``state`` to the standard W_n up to a scalar, or ``None``.

    Supported patterns: amplitude on ``|0..0>`` plus every single-excitation
    ket, or (after a global bit flip) the same on the complements.  For
    ``c0 |0..0> + sum_i c_i |e_i>`` the factors are
    ``[[1, -c0/c1], [0, 1/c1]]`` on site 1 and ``diag(1, 1/c_i)`` elsewhere.
    """
    n = state.num_qubits
    amps = np.asarray(state.amplitudes)
    scale = np.abs(amps).max()
    if scale == 0:
        return None
    singles = [2 ** (n - 1 - k) for k in range(n)]
    allowed = set(singles) | {0}
    flip_allowed = {(2 ** n - 1) ^ i for i in allowed}

    def fits(vec, allowed_set, idx):
        support = {i for i in range(2 ** n) if abs(vec[i]) > tol * scale}
        return support <= allowed_set and all(abs(vec[i]) > tol * scale for i in idx)

    flip = False
    if fits(amps, allowed, singles):
        vec = amps
    elif fits(amps, flip_allowed, [(2 ** n - 1) ^ i for i in singles]):
        flip = True
        vec = amps[::-1]  # global bit flip reverses the basis order
    else:
        return None
    c0 = vec[0]
    cs = [vec[i] for i in singles]
    factors = [np.array([[1, -c0 / cs[0]], [0, 1 / cs[0]]])]
    factors += [np.diag([1, 1 / c]) for c in cs[1:]]
    if flip:
        factors = [f @ X for f in factors]
    ilo = IloOperator(tuple(factors))
    if not _proportional(apply_ilo(state, ilo).amplitudes, w_state(n).amplitudes, 1e-9):
        return None
    return ilo


def ilo_unitarizability_test(inst, eig: EigenReport | None = None,
                             moduli_tol: float = 1e-7,
                             unitary_tol: float = 1e-10) -> UnitarizabilityReport:
    """Decide whether an ILO ``Q`` can make ``Q R Q^-1`` unitary.

    Cascade: already unitary; unequal eigenvalue moduli (similarity keeps
    eigenvalues); not diagonalizable; finally, with an eigenvector matrix
    ``V``, ``Q^dag Q`` would have to equal ``(V V^dag)^-1`` up to a
    scalar, so that matrix must split as a tensor product over sites.  A
    single-site cut with operator-Schmidt rank at least 2 rules ``Q`` out.

    The last step depends on the chosen eigenbasis when eigenvalues are
    degenerate; the report names the basis used.
    """
    R = np.asarray(inst.R)
    if unitarity_deviation(R) < unitary_tol:
        return UnitarizabilityReport("already_unitary", 0.0, True)
    ev = eig if eig is not None else eigen(R)
    spread = ev.moduli_spread
    if spread > moduli_tol:
        return UnitarizabilityReport("impossible_moduli", spread, ev.diagonalizable)
    if not ev.diagonalizable:
        return UnitarizabilityReport("impossible_nondiagonalizable", spread, False)

    if getattr(inst, "canonical_eigenbasis", None) is not None:
        V = np.asarray(inst.canonical_eigenbasis)
        basis = "canonical"
    else:
        V = ev.eigenvectors
        basis = "computed"
    n = inst.m
    if numerical_rank(V) < V.shape[0]:
        return UnitarizabilityReport("inconclusive", spread, True, basis=basis,
                                     note="eigenvector matrix is rank deficient")
    M = np.linalg.inv(V @ V.conj().T)
    cut_ranks = {s: numerical_rank(op_schmidt_reshape(M, [s]), tol=1e-8)
                 for s in range(1, n + 1)}
    note = "verdict is relative to the eigenbasis used" if basis == "computed" or any(
        c.algebraic > 1 for c in ev.clusters) else ""
    if any(r >= 2 for r in cut_ranks.values()):
        return UnitarizabilityReport("impossible_factorability", spread, True, cut_ranks,
                                     basis, note)
    # M is hermitian positive definite; its square root is a valid Q and
    # inherits the tensor structure when every cut factors
    w, v = np.linalg.eigh((M + M.conj().T) / 2)
    Q = (v * np.sqrt(w)) @ v.conj().T
    T = Q @ R @ np.linalg.inv(Q)
    T = T / abs(np.linalg.det(T)) ** (1 / T.shape[0])
    unitarizes = bool(unitarity_deviation(T) < 1e-8)
    return UnitarizabilityReport("inconclusive", spread, True, cut_ranks, basis,
                                 note or "all single-site cuts factor", unitarizes)


def analyze_output(state: PureState, tau_tol: float = TAU_TOL) -> dict:
    """Normalize, strip spectators and classify the state an operator produced."""
    psi = state.normalize()
    core, spectators = strip_spectators(psi)
    out = {"spectator_sites": list(spectators)}
    if core is None:
        out.update({"class": "product", "core_qubits": 0, "certificate": False})
        return out
    out["core_qubits"] = core.num_qubits
    cert = w_equivalence_certificate(core)
    out["certificate"] = cert is not None
    if core.num_qubits == 3:
        rep = classify3(core, tau_tol)
        out.update({"class": rep.cls, "local_ranks": list(rep.local_ranks),
                    "three_tangle": rep.three_tangle, "concurrences": rep.concurrences})
    elif core.num_qubits < 3:
        out["class"] = "biseparable" if core.num_qubits == 2 else "product"
        out["local_ranks"] = list(local_ranks(core))
    else:
        out["class"] = "W" if cert is not None else "undetermined"
        out["local_ranks"] = list(local_ranks(core))
    return out
