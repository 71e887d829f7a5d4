"""Generator algebras, operator ansaetze and the registry of named solution cases.

Every case is stored as data: a resolver turning free parameters (plus
square-root branch signs) into the full parameter set, a builder turning the
parameters into a matrix, and the properties claimed for it.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

from .spectral import SpectrumClaim, numerical_rank
from .tensor_core import (
    SWAP, SiteEmbedding, X, Z, basis_state, embed, kron_all, pauli, product_state,
)

__all__ = [
    "DomainError", "BranchResolutionError",
    "GybeInstance", "CaseSpec", "CASES",
    "generator", "pair_projector", "swap_13",
    "extraspecial_ansatz", "partition_p1", "partition_p2", "xi_sum", "eta_sum",
    "unitary_w_R", "case2_eigenbasis", "instantiate_case", "registry_listing",
    "registry_json",
]

GYBE_TOL = 1e-10
ANSATZ_NAMES = ("alpha1", "alpha2", "alpha3", "beta1", "beta2", "beta3", "gamma")


class DomainError(ValueError):
    """Free parameters outside the domain where a case's formulas are defined."""


class BranchResolutionError(RuntimeError):
    """No square-root branch choice produced a solution."""


@dataclass(frozen=True)
class GybeInstance:
    """A candidate operator ``R`` on ``m`` qubits for the (d, m, l) equation.

    ``branch`` records the sign picked for each square root in the case
    formulas (+1 is the principal root).
    """

    R: np.ndarray
    m: int
    l: int
    case_id: str = "custom"
    resolved_params: Mapping[str, complex] = field(default_factory=dict)
    branch: tuple[int, ...] = ()
    canonical_eigenbasis: np.ndarray | None = None
    d: int = 2

    def __post_init__(self):
        R = np.asarray(self.R, dtype=complex)
        if self.d != 2:
            raise ValueError("only local dimension 2 is supported")
        if R.shape != (2 ** self.m, 2 ** self.m):
            raise ValueError(f"R has shape {R.shape}, expected {(2 ** self.m,) * 2}")
        if not 1 <= self.l < self.m:
            raise ValueError(f"need 1 <= l < m, got l={self.l}, m={self.m}")
        R.setflags(write=False)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "resolved_params",
                           MappingProxyType(dict(self.resolved_params)))

    @property
    def signature(self) -> tuple[int, int, int]:
        return (self.d, self.m, self.l)

    @property
    def invertible(self) -> bool:
        return numerical_rank(self.R) == self.R.shape[0]


# --------------------------------------------------------------------------
# generators

_WIDTH = {"theta": 2, "xi": 3, "swap": 2, "proj_p": 1, "proj_pp": 2}


def generator(kind: str, j: int, n: int, width: int | None = None) -> np.ndarray:
    """Generator ``kind`` at site ``j`` on an ``n``-qubit chain.

    ``theta``: i X_j Z_{j+1}; ``xi``: i X_j Z_{j+1} Z_{j+2};
    ``eta``: i X_j Z_{j+1} ... Z_{j+width-1};
    ``swap``: exchange of sites j and j+1; ``proj_p``: (1 + X_j)/2;
    ``proj_pp``: 1 + X_j X_{j+1}.
    """
    if kind == "eta":
        if width is None or width < 1:
            raise ValueError("eta generators need a positive width")
        w = width
    elif kind in _WIDTH:
        w = _WIDTH[kind]
    else:
        raise ValueError(f"unknown generator kind {kind!r}")
    place = SiteEmbedding(w, j, n)
    if kind in ("theta", "xi", "eta"):
        local = 1j * kron_all(X, *([Z] * (w - 1)))
    elif kind == "swap":
        local = SWAP
    elif kind == "proj_p":
        local = (np.eye(2) + X) / 2
    else:
        local = np.eye(4) + np.kron(X, X)
    return embed(local, place)


def pair_projector(j: int, k: int, n: int) -> np.ndarray:
    """``1 + X_j X_k`` for any two distinct sites."""
    return np.eye(2 ** n, dtype=complex) + pauli("X", j, n) @ pauli("X", k, n)


def swap_13() -> np.ndarray:
    """Exchange of the outer sites of three qubits, s_1 s_2 s_1."""
    s1 = generator("swap", 1, 3)
    s2 = generator("swap", 2, 3)
    return s1 @ s2 @ s1


# --------------------------------------------------------------------------
# operator families

def extraspecial_ansatz(alpha1=0, alpha2=0, alpha3=0, beta1=0, beta2=0, beta3=0,
                        gamma=0) -> np.ndarray:
    """Four-qubit operator spanned by products of theta_1, theta_2, theta_3.

    Acts on qubits 1..4; qubit 4 only ever sees Z, so it is left diagonal.
    """
    t1, t2, t3 = (generator("theta", j, 4) for j in (1, 2, 3))
    return (np.eye(16, dtype=complex)
            + alpha1 * t1 + alpha2 * t2 + alpha3 * t3
            + beta1 * t1 @ t2 + beta2 * t2 @ t3 + beta3 * t1 @ t3
            + gamma * t1 @ t2 @ t3)


def p1_constraints(alpha1, alpha3, beta1):
    """``(beta2, gamma)`` that put the single-projector family on its solution manifold."""
    den = 1 + alpha1 + beta1
    if abs(den) < 1e-12:
        raise DomainError("1 + alpha1 + beta1 vanishes")
    beta2 = -beta1 * (1 + alpha3) / den
    gamma = beta1 * (alpha3 - alpha1 - beta1) / den
    return beta2, gamma


def partition_p1(alpha1=0, alpha3=0, beta1=0, beta2=0, beta3=0, gamma=0) -> np.ndarray:
    """``s_13 (1 + a1 p1 + a3 p3 + b1 p1p2 + b2 p2p3 + b3 p1p3 + g p1p2p3)`` on three qubits."""
    p1, p2, p3 = (generator("proj_p", j, 3) for j in (1, 2, 3))
    inner = (np.eye(8, dtype=complex) + alpha1 * p1 + alpha3 * p3
             + beta1 * p1 @ p2 + beta2 * p2 @ p3 + beta3 * p1 @ p3
             + gamma * p1 @ p2 @ p3)
    return swap_13() @ inner


def partition_p2(alpha=0, beta=0, gamma=0, delta=0) -> np.ndarray:
    """``s_13 (1 + a p12 + b p23 + g p12 p23 + d p13)`` with ``p_jk = 1 + X_j X_k``."""
    p12 = generator("proj_pp", 1, 3)
    p23 = generator("proj_pp", 2, 3)
    p13 = pair_projector(1, 3, 3)
    inner = (np.eye(8, dtype=complex) + alpha * p12 + beta * p23
             + gamma * p12 @ p23 + delta * p13)
    return swap_13() @ inner


def eta_sum(n: int) -> np.ndarray:
    """``eta_1 + ... + eta_n`` with width-``n`` generators on ``2n - 1`` qubits."""
    size = 2 * n - 1
    return sum(generator("eta", j, size, width=n) for j in range(1, n + 1))


def xi_sum() -> np.ndarray:
    """``xi_1 + xi_2 + xi_3`` on five qubits (the width-3 case of :func:`eta_sum`)."""
    return sum(generator("xi", j, 5) for j in (1, 2, 3))


def unitary_w_R(n: int, sign: int = 1) -> "GybeInstance":
    """Normalized unitary W_n generator on ``2n - 1`` qubits.

    ``R = sqrt(3n-4)/(2 sqrt(n-1)) * 1 + sign/(2 sqrt(n-1)) * (eta_1 + ... + eta_n)``,
    i.e. ``1 + alpha * sum(eta)`` with ``alpha = sign/sqrt(3n-4)`` rescaled
    to be unitary.
    """
    if n < 3:
        raise DomainError("the unitary W_n family needs n >= 3")
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    S = xi_sum() if n == 3 else eta_sum(n)
    size = 2 * n - 1
    c0 = np.sqrt(3 * n - 4) / (2 * np.sqrt(n - 1))
    c1 = sign / (2 * np.sqrt(n - 1))
    R = c0 * np.eye(2 ** size, dtype=complex) + c1 * S
    case = "U3" if n == 3 else "Un"
    params = {"n": n, "sign": sign, "alpha": sign / np.sqrt(3 * n - 4),
              "normalization": c0}
    return GybeInstance(R, m=size, l=1, case_id=case, resolved_params=params)


def case2_eigenbasis() -> np.ndarray:
    """The sixteen hand-written eigenvectors of case 6B as columns (unnormalized)."""
    r = np.sqrt(2)

    def v(*terms):
        out = np.zeros(16, dtype=complex)
        for coeff, bits in terms:
            out[int(bits, 2)] += coeff
        return out

    cols = [
        v((1, "0001"), (1, "1111")),
        v((1, "1110"), (-1, "0000")),
        v((1, "1101"), (-1, "0011")),
        v((1, "0010"), (1, "1100")),
        v((1, "1011"), (-1, "0101")),
        v((1, "0100"), (1, "1010")),
        v((1, "0111"), (1, "1001")),
        v((1, "1000"), (-1, "0110")),
        v((r, "0011"), (-r, "0111"), (-1, "0001"), (1, "1111")),
        v((1, "0000"), (r, "0010"), (-r, "0110"), (1, "1110")),
        v((1, "0011"), (-r, "0001"), (-r, "0101"), (1, "1101")),
        v((1, "1100"), (-r, "0100"), (-r, "0000"), (-1, "0010")),
        v((r, "0011"), (-r, "0111"), (1, "0101"), (1, "1011")),
        v((r, "0010"), (-r, "0110"), (-1, "0100"), (1, "1010")),
        v((r, "0001"), (r, "0101"), (-1, "0111"), (1, "1001")),
        v((r, "0000"), (r, "0100"), (1, "0110"), (1, "1000")),
    ]
    return np.column_stack(cols)


# --------------------------------------------------------------------------
# registry

def _root(z, sign: int) -> complex:
    return sign * np.sqrt(complex(z))


@dataclass(frozen=True)
class CaseSpec:
    """A named parameter family together with what is claimed about it.

    ``resolve(free, signs)`` returns the full parameter map; ``signs`` holds
    one +-1 per square root in the defining formulas.  ``claims(params)``
    returns the claimed flags; a flag of ``None`` means nothing is claimed.
    """

    case_id: str
    description: str
    m: int
    l: int
    free_params: Mapping[str, complex]
    resolve: Callable[[dict, tuple], dict]
    build: Callable[[dict], np.ndarray]
    input_state: Callable[[dict], object]
    n_roots: int = 0
    preferred_branch: tuple[int, ...] | None = None
    claimed_spectrum: Callable[[dict], SpectrumClaim | None] = lambda p: None
    claims: Callable[[dict], dict] = lambda p: {}
    expected_output: Callable[[dict], dict] | None = None
    expected_verdict: Callable[[dict], str | None] = lambda p: None
    validate: Callable[[dict], None] = lambda p: None
    eigenbasis: Callable[[], np.ndarray] | None = None
    far_k_max: int = 4
    m_of: Callable[[dict], int] | None = None

    def branch_order(self) -> list[tuple[int, ...]]:
        combos = list(itertools.product((1, -1), repeat=self.n_roots))
        if self.preferred_branch is not None:
            combos.remove(tuple(self.preferred_branch))
            combos.insert(0, tuple(self.preferred_branch))
        return combos


def _claims(gybe=True, diagonalizable=None, unitary=False, unitarizable=False,
            w_class=True):
    # non-unitary cases are braiding operators; the unitary ones fail far commutativity
    return {"gybe_holds": gybe, "diagonalizable": diagonalizable, "unitary": unitary,
            "unitarizable": unitarizable, "w_class_output": w_class,
            "far_commutative": not unitary}


def _spec(entries, mode="up_to_common_scalar"):
    return SpectrumClaim(tuple(entries), mode)


def _ansatz_build(p):
    return extraspecial_ansatz(**{k: p[k] for k in ANSATZ_NAMES})


def _ansatz_params(**kw):
    p = dict.fromkeys(ANSATZ_NAMES, 0j)
    p.update({k: complex(v) for k, v in kw.items()})
    return p


def _zero_input(n):
    return lambda p: basis_state("0" * n)


# four-qubit ansatz families --------------------------------------------------

def _resolve_5a(f, s):
    b1 = f["beta1"]
    return _ansatz_params(beta1=b1, beta2=-b1, beta3=-b1 ** 2,
                          gamma=1j * _root((1 + b1 ** 2) ** 2, s[0]))


def _resolve_5b(f, s):
    b1 = f["beta1"]
    return _ansatz_params(alpha2=1j * _root((1 + b1 ** 2) ** 2, s[0]),
                          beta1=b1, beta2=-b1, beta3=-b1 ** 2)


def _resolve_5c(f, s):
    a2 = f["alpha2"]
    a1 = _root(a2 * (a2 - 1j), s[0])
    return _ansatz_params(alpha1=a1, alpha2=a2, alpha3=a1, gamma=-a2 + 1j)


def _resolve_5d(f, s):
    a2 = f["alpha2"]
    inner = _root(1 - 4 * a2 ** 2, s[0])
    a1 = _root(-0.5 + a2 ** 2 - 0.5 * inner, s[1])
    if abs(a1) < 1e-14:
        raise DomainError("alpha1 vanishes, alpha3 = alpha2**2/alpha1 undefined")
    return _ansatz_params(alpha1=a1, alpha2=a2, alpha3=a2 ** 2 / a1, gamma=-a2)


def _resolve_6a(f, s):
    # alpha3 (not alpha2) tracks alpha1; see README "Registry notes"
    a1 = f["alpha1"]
    return _ansatz_params(alpha1=a1, alpha3=a1, beta1=-1j, beta2=-1j, beta3=-1)


def _resolve_6b(f, s):
    b1 = f["beta1"]
    return _ansatz_params(alpha1=-1j * b1, alpha3=-1j * b1, beta1=b1, beta2=-b1,
                          gamma=1j * _root(1 + 4 * b1 ** 2, s[0]))


def _resolve_6c(f, s):
    k = f["k"]
    if abs(k) == 0:
        raise DomainError("k must be nonzero")
    b1 = -2 * k
    return _ansatz_params(alpha2=-1j, beta1=b1, beta2=-b1, beta3=1 - b1 ** 2 / 2,
                          gamma=-0.5j * (2 + b1 ** 2)) | {"k": complex(k)}


def _resolve_7a(f, s):
    a2, b2 = f["alpha2"], f["beta2"]
    r = _root(1 + 4 * b2 ** 2, s[0])
    a1 = _root(a2 ** 2 - b2 ** 2 - 1j * a2 * r, s[1])
    return _ansatz_params(alpha1=a1, alpha2=a2, alpha3=a1, beta1=-b2, beta2=b2,
                          gamma=-a2 + 1j * r)


# three-qubit partition families ----------------------------------------------

def _p1_w_point(b1, l1, l3):
    if abs(l1 - 1) < 1e-12 or abs(l1 + 1) < 1e-12:
        raise DomainError("l1 must differ from +-1")
    if abs(l3 + 1) < 1e-12:
        raise DomainError("l3 must differ from -1")
    a1 = -b1 / 2 - 2 / (l1 + 1)
    a3 = ((l1 + 1) * (l3 - 1) * b1 - 4 * (l1 - 1)) / (2 * (l1 - 1) * (l3 + 1))
    b3 = (((l1 - l3) * (l1 + 1) * b1 + 4 * (l1 - 1))
          / ((l1 + 1) * (l1 - 1) * (l3 + 1)))
    b2, g = p1_constraints(a1, a3, b1)
    return {"alpha1": a1, "alpha3": a3, "beta1": complex(b1), "beta2": b2,
            "beta3": b3, "gamma": g, "l1": complex(l1), "l3": complex(l3)}


_P1_KEYS = ("alpha1", "alpha3", "beta1", "beta2", "beta3", "gamma")


def _p1_build(p):
    return partition_p1(**{k: p[k] for k in _P1_KEYS})


def _p1_input(p):
    return product_state([p["l1"], 1], [0, 1], [p["l3"], 1])


def _p1_output(p):
    # the |001> amplitude carries a factor beta1; without it the formula
    # only holds at beta1 = 1
    l1, l3, b1 = p["l1"], p["l3"], p["beta1"]
    return {"001": (l1 + 1) * (l3 - 1) * b1 / 4,
            "010": (l1 - 1) * (l3 - 1),
            "100": -(l1 + 1) * (l3 - 1) * b1 / 4}


def _p1_spectrum(p):
    l1, l3, b1 = p["l1"], p["l3"], p["beta1"]
    e2 = (l1 - 1) * (l3 - 1) / ((l1 + 1) * (l3 + 1))
    e3 = (1j * np.sqrt(complex(l3 ** 2 - 1))
          * np.sqrt(complex((l1 + 1) ** 2 * b1 ** 2 - 4 * (l1 - 1) ** 2))
          / (2 * (l3 + 1) * np.sqrt(complex(l1 ** 2 - 1))))
    return _spec([(1, 2), (e2, 2), (e3, 2), (-e3, 2)], mode="exact")


def _resolve_p1(f, s):
    return _p1_w_point(f["beta1"], f["l1"], f["l3"])


def _resolve_p1_phase(f, s):
    th, ph, l1 = f["theta"], f["phi"], f["l1"]
    den = 1 - l1 + np.exp(1j * th) * (1 + l1)
    if abs(den) < 1e-12 or abs(l1 + 1) < 1e-12:
        raise DomainError("phase-point substitution has a vanishing denominator")
    l3 = 2 * (1 - l1) / den - 1
    b1 = (2 * (l1 - 1) / (l1 + 1) * np.exp(-0.5j * th)
          * _root(np.exp(1j * th) - np.exp(2j * ph), s[0]))
    p = _p1_w_point(b1, l1, l3)
    p.update(theta=complex(th), phi=complex(ph))
    return p


def _p1_phase_spectrum(p):
    th, ph = p["theta"].real, p["phi"].real
    return _spec([(1, 2), (np.exp(1j * th), 2), (np.exp(1j * ph), 2),
                  (-np.exp(1j * ph), 2)], mode="exact")


def _p2_build(p):
    return partition_p2(p["alpha"], p["beta"], p["gamma"], p["delta"])


def _resolve_p2(f, s):
    a, b = complex(f["alpha"]), complex(f["beta"])
    return {"alpha": a, "beta": b, "gamma": -(a + b) / 2, "delta": complex(f["delta"])}


def _resolve_p2_w(f, s):
    a, b = complex(f["alpha"]), complex(f["beta"])
    return _resolve_p2({"alpha": a, "beta": b, "delta": -(2 + a + b) / 2}, s)


def _resolve_p2_phase(f, s):
    th, ph, sg = f["theta"], f["phi"], f["sign"]
    if sg not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    root = _root(np.exp(2j * ph) - np.exp(2j * th), s[0])
    a = 0.5 * (-(np.exp(1j * ph) + 1) + sg * root)
    b = 0.5 * (-(np.exp(1j * ph) + 1) - sg * root)
    p = _resolve_p2_w({"alpha": a, "beta": b}, s)
    p.update(theta=complex(th), phi=complex(ph), sign=complex(sg))
    return p


def _p2_output(p):
    a, b = p["alpha"], p["beta"]
    return {"011": (a - b) / 2, "101": -(1 + a + b), "110": -(a - b) / 2}


def _p2_spectrum(p):
    a, b = p["alpha"], p["beta"]
    r = np.sqrt(complex((1 + 2 * a) * (1 + 2 * b)))
    return _spec([(-(1 + a + b), 4), (r, 2), (-r, 2)], mode="exact")


def _p2_phase_spectrum(p):
    th, ph = p["theta"].real, p["phi"].real
    return _spec([(np.exp(1j * ph), 4), (np.exp(1j * th), 2), (-np.exp(1j * th), 2)],
                 mode="exact")


# unitary families --------------------------------------------------------------

def _resolve_un(f, s):
    n = int(round(complex(f.get("n", 3)).real))
    sign = int(round(complex(f["sign"]).real))
    inst = unitary_w_R(n, sign)
    return dict(inst.resolved_params)


def _un_build(p):
    return unitary_w_R(int(p["n"]), int(p["sign"])).R


def _un_spectrum(p):
    n = int(p["n"])
    c0 = np.sqrt(3 * n - 4) / (2 * np.sqrt(n - 1))
    c1 = np.sqrt(n) / (2 * np.sqrt(n - 1))
    half = 2 ** (2 * n - 1) // 2
    return _spec([(c0 + 1j * c1, half), (c0 - 1j * c1, half)], mode="exact")


def _un_input(p):
    return basis_state("0" * (2 * int(p["n"]) - 1))


def _un_validate(f):
    n = int(round(complex(f.get("n", 3)).real))
    if not 3 <= n <= 6:
        raise DomainError("Un is supported for 3 <= n <= 6")


def _6c_validate(f):
    if abs(f["k"]) == 0:
        raise DomainError("k must be nonzero")


def _k_unit(p):
    return abs(abs(p["k"]) - 1) < 1e-12


def _build_registry() -> dict[str, CaseSpec]:
    s3, s2 = np.sqrt(3), np.sqrt(2)
    cases = [
        CaseSpec("5A-i", "five-state W output, beta-family, beta1 = i/sqrt(3)", 4, 2,
                 {"beta1": 1j / s3}, _resolve_5a, _ansatz_build, _zero_input(4), n_roots=1,
                 claimed_spectrum=lambda p: _spec([(1, 8), (1 / 3, 4), (-1 / 3, 4)]),
                 claims=lambda p: _claims(diagonalizable=True),
                 expected_verdict=lambda p: "impossible_moduli"),
        CaseSpec("5A-ii", "five-state W output, beta-family, beta1 = 1", 4, 2,
                 {"beta1": 1.0}, _resolve_5a, _ansatz_build, _zero_input(4), n_roots=1,
                 claimed_spectrum=lambda p: _spec([(-1, 4), (1, 12)]),
                 claims=lambda p: _claims(diagonalizable=False),
                 expected_verdict=lambda p: "impossible_nondiagonalizable"),
        CaseSpec("5B", "five-state W output, alpha2 from beta1, beta1 = i sqrt(3)", 4, 2,
                 {"beta1": 1j * s3}, _resolve_5b, _ansatz_build, _zero_input(4), n_roots=1,
                 claimed_spectrum=lambda p: _spec([(1, 8), (3, 4), (-3, 4)]),
                 claims=lambda p: _claims(),
                 expected_verdict=lambda p: "impossible_moduli"),
        CaseSpec("5C", "five-state W output, symmetric alphas, alpha2 = 1/2", 4, 2,
                 {"alpha2": 0.5}, _resolve_5c, _ansatz_build, _zero_input(4), n_roots=1,
                 claimed_spectrum=lambda p: _spec([(1 + 0.5j, 8), (-0.5j, 8)]),
                 claims=lambda p: _claims(),
                 expected_verdict=lambda p: "impossible_moduli"),
        CaseSpec("5D", "five-state W output, asymmetric alphas, alpha2 = 1/2", 4, 2,
                 {"alpha2": 0.5}, _resolve_5d, _ansatz_build, _zero_input(4), n_roots=2,
                 claimed_spectrum=lambda p: _spec([(1, 16)], mode="exact"),
                 claims=lambda p: _claims(diagonalizable=False),
                 expected_verdict=lambda p: "impossible_nondiagonalizable"),
        CaseSpec("6A", "six-state output, one-parameter alpha family, alpha1 = -i sqrt(2)",
                 4, 2, {"alpha1": -1j * s2}, _resolve_6a, _ansatz_build, _zero_input(4),
                 claimed_spectrum=lambda p: _spec([(1, 4), (-1, 4), (1 + s2, 4), (1 - s2, 4)]),
                 claims=lambda p: _claims(),
                 expected_verdict=lambda p: "impossible_moduli"),
        CaseSpec("6B", "six-state W output, phase eigenvalues, beta1 = -i/sqrt(2)", 4, 2,
                 {"beta1": -1j / s2}, _resolve_6b, _ansatz_build, _zero_input(4), n_roots=1,
                 preferred_branch=(-1,),
                 claimed_spectrum=lambda p: _spec([(np.exp(1j * np.pi / 4), 8),
                                                   (np.exp(-1j * np.pi / 4), 8)]),
                 claims=lambda p: _claims(diagonalizable=True),
                 expected_verdict=lambda p: "impossible_factorability",
                 eigenbasis=case2_eigenbasis),
        CaseSpec("6C", "six-state output, beta1 = -2k", 4, 2,
                 {"k": 2.0}, _resolve_6c, _ansatz_build, _zero_input(4),
                 claimed_spectrum=lambda p: _spec([(1, 8), (1 - 2 * p["k"] ** 2, 4),
                                                   (-(1 - 2 * p["k"] ** 2), 4)]),
                 claims=lambda p: _claims(diagonalizable=not _k_unit(p)),
                 expected_verdict=lambda p: ("impossible_nondiagonalizable" if _k_unit(p)
                                             else "impossible_moduli"),
                 validate=_6c_validate),
        CaseSpec("7A", "seven-state W output, alpha2 = 1, beta2 = -2^(-1/4) e^(-i pi/4)",
                 4, 2, {"alpha2": 1.0, "beta2": -2 ** -0.25 * np.exp(-1j * np.pi / 4)},
                 _resolve_7a, _ansatz_build, _zero_input(4), n_roots=2,
                 claimed_spectrum=lambda p: _spec([(1 + s2 + 1j, 8), (1 - s2 - 1j, 8)],
                                                  mode="exact"),
                 claims=lambda p: _claims(),
                 expected_verdict=lambda p: "impossible_moduli"),
        CaseSpec("P1", "single-projector partition family at its W point", 3, 2,
                 {"beta1": 1.0, "l1": 3.0, "l3": 2.0}, _resolve_p1, _p1_build, _p1_input,
                 claimed_spectrum=_p1_spectrum, claims=lambda p: _claims(),
                 expected_output=_p1_output,
                 expected_verdict=lambda p: "impossible_moduli"),
        CaseSpec("P1-phase", "single-projector partition family at a phase point", 3, 2,
                 {"theta": np.pi / 3, "phi": np.pi / 5, "l1": 3.0}, _resolve_p1_phase,
                 _p1_build, _p1_input, n_roots=1,
                 claimed_spectrum=_p1_phase_spectrum,
                 claims=lambda p: _claims(unitarizable=None),
                 expected_output=_p1_output),
        CaseSpec("P2", "pair-projector partition family, free delta", 3, 2,
                 {"alpha": 1.0, "beta": 0.0, "delta": 0.25}, _resolve_p2, _p2_build,
                 _zero_input(3),
                 claims=lambda p: _claims(unitarizable=None, w_class=None)),
        CaseSpec("P2-W", "pair-projector partition family at its W point", 3, 2,
                 {"alpha": 1.0, "beta": 0.0}, _resolve_p2_w, _p2_build, _zero_input(3),
                 claimed_spectrum=_p2_spectrum,
                 claims=lambda p: _claims(w_class=abs(p["alpha"] - p["beta"]) > 1e-12),
                 expected_output=_p2_output,
                 expected_verdict=lambda p: "impossible_moduli"),
        CaseSpec("P2-phase", "pair-projector partition family at a phase point", 3, 2,
                 {"theta": np.pi / 3, "phi": np.pi / 5, "sign": 1}, _resolve_p2_phase,
                 _p2_build, _zero_input(3), n_roots=1,
                 claimed_spectrum=_p2_phase_spectrum,
                 claims=lambda p: _claims(unitarizable=None),
                 expected_output=_p2_output),
        CaseSpec("U3", "unitary W generator on five qubits", 5, 1,
                 {"sign": 1}, lambda f, s: _resolve_un({"n": 3, "sign": f["sign"]}, s),
                 _un_build, _un_input,
                 claimed_spectrum=_un_spectrum,
                 claims=lambda p: _claims(diagonalizable=True, unitary=True,
                                          unitarizable=True),
                 expected_verdict=lambda p: "already_unitary", far_k_max=5),
        CaseSpec("Un", "unitary W_n generator on 2n - 1 qubits", 7, 1,
                 {"n": 4, "sign": 1}, _resolve_un, _un_build, _un_input,
                 claimed_spectrum=_un_spectrum,
                 claims=lambda p: _claims(diagonalizable=True, unitary=True,
                                          unitarizable=True),
                 expected_verdict=lambda p: "already_unitary",
                 validate=_un_validate, m_of=lambda p: 2 * int(p["n"]) - 1),
    ]
    return {c.case_id: c for c in cases}


CASES: Mapping[str, CaseSpec] = MappingProxyType(_build_registry())


def _coerce(value):
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    return value


def instantiate_case(case_id: str, tol: float = GYBE_TOL, **free) -> GybeInstance:
    """Build the operator of a registered case at the given free parameters.

    Missing free parameters take the registry defaults.  Square roots are
    taken on the principal branch first; if the resulting operator misses
    the equation by more than ``tol``, other sign combinations are tried
    (the case's preferred branch, when it has one, goes first).

    Raises
    ------
    KeyError
        Unknown ``case_id``.
    DomainError
        Free parameters outside the case's domain.
    BranchResolutionError
        No branch satisfies the equation (only for cases claiming it does).
    """
    from .ybe_verify import gybe_residual

    try:
        spec = CASES[case_id]
    except KeyError:
        raise KeyError(f"unknown case id {case_id!r}") from None
    unknown = set(free) - set(spec.free_params)
    if unknown:
        raise DomainError(f"case {case_id} has no parameters {sorted(unknown)}")
    values = dict(spec.free_params)
    values.update({k: _coerce(v) for k, v in free.items()})
    spec.validate(values)

    claims_gybe = None
    best = None
    for signs in spec.branch_order():
        params = spec.resolve(values, signs)
        R = spec.build(params)
        m = spec.m_of(params) if spec.m_of else spec.m
        res = gybe_residual(R, m, spec.l)
        if best is None or res < best[0]:
            best = (res, signs, params, R, m)
        if claims_gybe is None:
            claims_gybe = spec.claims(params).get("gybe_holds")
        if res < tol:
            break
    res, signs, params, R, m = best
    if res >= tol and claims_gybe:
        raise BranchResolutionError(
            f"{case_id}: no branch reaches residual {tol:g} (best {res:.3g})")
    basis = spec.eigenbasis() if spec.eigenbasis else None
    return GybeInstance(R, m=m, l=spec.l, case_id=case_id, resolved_params=params,
                        branch=tuple(signs), canonical_eigenbasis=basis)


def _jsonable(v):
    v = complex(v)
    return [v.real, v.imag]


def registry_listing() -> list[dict]:
    """Structured description of every registered case, sorted by id."""
    out = []
    for cid in sorted(CASES):
        spec = CASES[cid]
        inst = instantiate_case(cid)
        p = dict(inst.resolved_params)
        claim = spec.claimed_spectrum(p)
        out.append({
            "case_id": cid,
            "description": spec.description,
            "signature": list(inst.signature),
            "free_params": {k: _jsonable(v) for k, v in sorted(spec.free_params.items())},
            "claims": spec.claims(p),
            "claimed_spectrum": claim.to_dict() if claim else None,
            "expected_unitarizability": spec.expected_verdict(p),
        })
    return out


def registry_json() -> str:
    return json.dumps(registry_listing(), indent=2, sort_keys=True)
