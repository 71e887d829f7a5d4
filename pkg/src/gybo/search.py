"""Residual minimization over operator families and seeded probes of solution manifolds."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .operator_zoo import (ANSATZ_NAMES, DomainError, eta_sum, extraspecial_ansatz,
                           generator, p1_constraints, partition_p1, partition_p2, xi_sum)
from .ybe_verify import _three_products, gybe_residual

__all__ = [
    "AnsatzFamily", "SearchResult", "ProbeResult", "FAMILIES",
    "residual", "minimize", "manifold_probe", "get_family", "family_for_case",
    "CONVERGENCE_THRESHOLD", "TARGET_MATCH_DIST",
]

CONVERGENCE_THRESHOLD = 1e-14
TARGET_MATCH_DIST = 1e-5
SAMPLE_BOX = 2.0


@dataclass(frozen=True)
class AnsatzFamily:
    """Parametrized operators on ``m`` qubits.

    ``builder`` maps a complex parameter vector to the matrix and may raise
    :class:`DomainError` at constraint singularities.  ``symmetries`` map a
    parameter vector to equivalent ones when matching known targets.
    """

    name: str
    builder: Callable[[np.ndarray], np.ndarray]
    param_names: tuple[str, ...]
    real_only: tuple[bool, ...]
    signature: tuple[int, int, int]
    known_targets: tuple[tuple[complex, ...], ...] = ()
    symmetries: tuple[Callable[[np.ndarray], np.ndarray], ...] = ()
    description: str = ""

    def __post_init__(self):
        if len(self.real_only) != len(self.param_names):
            raise ValueError("real_only needs one flag per parameter")

    @property
    def m(self) -> int:
        return self.signature[1]

    @property
    def l(self) -> int:
        return self.signature[2]

    def build(self, params) -> np.ndarray:
        params = self.check_params(params)
        R = np.asarray(self.builder(params), dtype=complex)
        if R.shape != (2 ** self.m, 2 ** self.m):
            raise ValueError(f"family {self.name} built a matrix of shape {R.shape}")
        return R

    def check_params(self, params) -> np.ndarray:
        params = np.atleast_1d(np.asarray(params, dtype=complex))
        if params.shape != (len(self.param_names),):
            raise ValueError(
                f"family {self.name} takes {len(self.param_names)} parameters, got {params.size}")
        return params

    # real <-> complex packing for the optimizer
    def pack(self, params) -> np.ndarray:
        params = self.check_params(params)
        out = []
        for z, real in zip(params, self.real_only):
            out.extend([z.real] if real else [z.real, z.imag])
        return np.array(out, dtype=float)

    def unpack(self, x) -> np.ndarray:
        out, i = [], 0
        for real in self.real_only:
            if real:
                out.append(complex(x[i]))
                i += 1
            else:
                out.append(complex(x[i], x[i + 1]))
                i += 2
        return np.array(out, dtype=complex)


@dataclass(frozen=True)
class SearchResult:
    params: tuple[complex, ...]
    residual: float
    iterations: int
    converged: bool
    matched_target: tuple[int, float] | None = None
    evaluations: int = 0

    def to_dict(self) -> dict:
        return {"params": [[z.real, z.imag] for z in self.params],
                "residual": self.residual, "iterations": self.iterations,
                "evaluations": self.evaluations, "converged": self.converged,
                "matched_target": (None if self.matched_target is None else
                                   {"index": self.matched_target[0],
                                    "distance": self.matched_target[1]})}


@dataclass(frozen=True)
class ProbeResult:
    family: str
    samples: int
    passed: int
    rejected: int
    worst_residual: float
    tol: float
    seed: int
    residuals: tuple[float, ...] = field(default=(), repr=False)

    @property
    def pass_fraction(self) -> float:
        return self.passed / self.samples if self.samples else 0.0

    def to_dict(self) -> dict:
        return {"family": self.family, "samples": self.samples, "passed": self.passed,
                "pass_fraction": self.pass_fraction, "rejected": self.rejected,
                "worst_residual": self.worst_residual, "tol": self.tol, "seed": self.seed}


def residual(family: AnsatzFamily, params) -> float:
    """Squared Frobenius norm of ``(R I)(I R)(R I) - (I R)(R I)(I R)``."""
    R = family.build(params)
    lhs, rhs = _three_products(R, 1, family.l + 1, family.m + family.l)
    return float(np.linalg.norm(lhs - rhs) ** 2)


def _match_target(family: AnsatzFamily, params: np.ndarray):
    best = None
    for idx, target in enumerate(family.known_targets):
        target = np.asarray(target, dtype=complex)
        for variant in [params] + [sym(params) for sym in family.symmetries]:
            d = float(np.linalg.norm(np.asarray(variant) - target))
            if best is None or d < best[1]:
                best = (idx, d)
    if best is not None and best[1] < TARGET_MATCH_DIST:
        return best
    return None


def minimize(family: AnsatzFamily, start, max_iter: int = 4000,
             threshold: float = CONVERGENCE_THRESHOLD, xatol: float = 1e-13) -> SearchResult:
    """Nelder-Mead descent on :func:`residual` from ``start``.

    Real-only parameters stay on the real axis; complex ones are searched
    as (re, im) pairs.  The best point seen is returned, so the reported
    residual never exceeds the starting one.  Never raises on
    non-convergence; ``converged`` is ``False`` instead.
    """
    start = family.check_params(start)
    x0 = family.pack(start)
    best = {"f": residual(family, start), "x": x0.copy()}

    def done(x, f, iters, evals):
        params = family.unpack(x)
        return SearchResult(tuple(complex(z) for z in params), float(f), iters,
                            bool(f < threshold), _match_target(family, params), evals)

    if best["f"] < threshold:
        return done(x0, best["f"], 0, 1)

    def objective(x):
        try:
            f = residual(family, family.unpack(x))
        except DomainError:
            return np.inf
        if f < best["f"]:
            best["f"], best["x"] = f, np.array(x, copy=True)
        return f

    res = _scipy_minimize(objective, x0, method="Nelder-Mead",
                          options={"maxiter": max_iter, "maxfev": 4 * max_iter,
                                   "xatol": xatol, "fatol": threshold * 1e-3,
                                   "adaptive": x0.size > 4})
    return done(best["x"], best["f"], int(res.nit), int(res.nfev) + 1)


def manifold_probe(family: AnsatzFamily, samples: int = 100, seed: int = 0,
                   tol: float = 1e-8, box: float = SAMPLE_BOX,
                   max_rejects: int = 10000) -> ProbeResult:
    """Draw seeded parameters in ``|re|, |im| <= box`` and count gYBE solutions.

    A sample passes when the relative residual (Frobenius norm of the
    difference over that of the left side) is below ``tol``.  Samples at
    which the family's constraints are singular are redrawn.
    """
    rng = np.random.default_rng(seed)
    k = len(family.param_names)
    passed = rejected = 0
    worst = 0.0
    residuals = []
    while len(residuals) < samples:
        re = rng.uniform(-box, box, k)
        im = np.where(family.real_only, 0.0, rng.uniform(-box, box, k))
        params = re + 1j * im
        try:
            R = family.build(params)
        except DomainError:
            rejected += 1
            if rejected > max_rejects:
                raise RuntimeError(f"family {family.name}: too many singular samples")
            continue
        r = gybe_residual(R, family.m, family.l)
        residuals.append(r)
        worst = max(worst, r)
        passed += r < tol
    return ProbeResult(family.name, samples, passed, rejected, worst, tol, seed,
                       tuple(residuals))


# --------------------------------------------------------------------------
# families

def _u3sym():
    S = xi_sum()
    a = 1 / np.sqrt(5)
    return AnsatzFamily(
        "U3sym", lambda p: np.eye(32) + p[0] * S, ("alpha",), (True,), (2, 5, 1),
        ((a,), (-a,)), (), "1 + alpha (xi_1 + xi_2 + xi_3)")


def _u3():
    xs = [generator("xi", j, 5) for j in (1, 2, 3)]
    a = 1 / np.sqrt(5)
    return AnsatzFamily(
        "U3", lambda p: np.eye(32) + p[0] * xs[0] + p[1] * xs[1] + p[2] * xs[2],
        ("alpha", "beta", "gamma"), (True, True, True), (2, 5, 1),
        ((a, a, a), (-a, -a, -a)), (), "1 + alpha xi_1 + beta xi_2 + gamma xi_3")


def _un(n: int):
    if not 3 <= n <= 6:
        raise ValueError("Un family supports 3 <= n <= 6")
    S = eta_sum(n)
    a = 1 / np.sqrt(3 * n - 4)
    size = 2 * n - 1
    return AnsatzFamily(
        f"Un{n}", lambda p: np.eye(2 ** size) + p[0] * S, ("alpha",), (True,),
        (2, size, 1), ((a,), (-a,)), (), f"1 + alpha (eta_1 + ... + eta_{n})")


def _ansatz242():
    from .operator_zoo import CASES, instantiate_case

    targets = []
    for cid in ("5A-i", "5A-ii", "5B", "5C", "5D", "6A", "6B", "6C", "7A"):
        p = instantiate_case(cid).resolved_params
        if all(k in p for k in ANSATZ_NAMES) and CASES[cid].m == 4:
            targets.append(tuple(complex(p[k]) for k in ANSATZ_NAMES))
    return AnsatzFamily(
        "ansatz242", lambda p: extraspecial_ansatz(*p), ANSATZ_NAMES,
        (False,) * 7, (2, 4, 2), tuple(targets), (),
        "1 + sum of products of theta_1, theta_2, theta_3")


def _p1_manifold(p):
    a1, a3, b1, b3 = p
    b2, g = p1_constraints(a1, a3, b1)
    return partition_p1(a1, a3, b1, b2, b3, g)


def _p1():
    return AnsatzFamily(
        "P1", _p1_manifold, ("alpha1", "alpha3", "beta1", "beta3"), (False,) * 4,
        (2, 3, 2), description="single-projector family with beta2, gamma eliminated")


def _p2():
    return AnsatzFamily(
        "P2", lambda p: partition_p2(p[0], p[1], -(p[0] + p[1]) / 2, p[2]),
        ("alpha", "beta", "delta"), (False,) * 3, (2, 3, 2),
        description="pair-projector family with gamma = -(alpha + beta)/2")


def _p2_gamma0():
    return AnsatzFamily(
        "P2-gamma0", lambda p: partition_p2(p[0], p[1], 0, p[2]),
        ("alpha", "beta", "delta"), (False,) * 3, (2, 3, 2),
        description="pair-projector family with gamma = 0 (off the solution manifold)")


FAMILIES = {
    "U3sym": _u3sym, "U3": _u3, "Un4": lambda: _un(4), "Un5": lambda: _un(5),
    "Un3": lambda: _un(3), "Un6": lambda: _un(6),
    "ansatz242": _ansatz242, "P1": _p1, "P2": _p2, "P2-gamma0": _p2_gamma0,
}


def get_family(name: str, n: int | None = None) -> AnsatzFamily:
    """Look up a family by name; ``Un`` takes ``n`` (default 4)."""
    if name == "Un":
        return _un(4 if n is None else n)
    try:
        return FAMILIES[name]()
    except KeyError:
        raise KeyError(f"unknown family {name!r}; choose from "
                       f"{', '.join(sorted(FAMILIES))} or Un") from None


def family_for_case(case_id: str) -> AnsatzFamily | None:
    """The sampled solution manifold behind a registry case, if it has one."""
    return {"P1": _p1, "P2": _p2}.get(case_id, lambda: None)()
