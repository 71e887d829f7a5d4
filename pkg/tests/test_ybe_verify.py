import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gybo.operator_zoo import instantiate_case, unitary_w_R, xi_sum
from gybo.tensor_core import SWAP, SiteEmbedding, embed
from gybo.ybe_verify import (DimensionOverflowError, braid_embed, braid_residual,
                             commutator_norms, far_commutativity_check, gybe_residual,
                             order_probe, power_closed_form, power_formula_check, verify_case)


def dense_commutator(R, m, offset):
    n = m + offset
    A = embed(R, SiteEmbedding(m, 1, n))
    B = embed(R, SiteEmbedding(m, 1 + offset, n))
    return np.linalg.norm(A @ B - B @ A), np.linalg.norm(A @ B)


def test_swap_solves_ordinary_ybe():
    assert gybe_residual(SWAP, 2, 1) < 1e-15


def test_non_solution_detected():
    rng = np.random.default_rng(0)
    R = rng.normal(size=(4, 4))
    assert gybe_residual(R, 2, 1) > 1e-3


def test_equation_is_homogeneous():
    inst = instantiate_case("7A")
    assert gybe_residual(3j * inst.R, 4, 2) < 1e-10


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 4), st.integers(1, 5), st.integers(0, 2 ** 31 - 1))
def test_schmidt_commutator_matches_dense(m, offset, seed):
    rng = np.random.default_rng(seed)
    d = 2 ** m
    R = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    comm, prod = commutator_norms(R, m, offset)
    dc, dp = dense_commutator(R, m, offset)
    assert np.isclose(comm, dc, rtol=1e-9, atol=1e-9)
    assert np.isclose(prod, dp, rtol=1e-9)


def test_disjoint_windows_commute_exactly():
    inst = instantiate_case("6B")
    far = far_commutativity_check(inst, 4)
    assert all(v == 0.0 for v in far.values())


def test_u3_far_commutativity_pattern():
    far = far_commutativity_check(unitary_w_R(3), 5)
    assert all(far[k] > 1e-3 for k in (2, 3, 4))
    assert far[5] < 1e-13


def test_braid_relation_follows_from_equation():
    for cid in ("5A-i", "P2-W", "U3"):
        res, mode = braid_residual(instantiate_case(cid))
        assert res < 1e-9 and mode == "full chain"
    res, mode = braid_residual(instantiate_case("Un", n=5))
    assert res < 1e-9 and mode == "support window"


def test_braid_embed_placement():
    inst = instantiate_case("P1")
    B2 = braid_embed(inst, 2, 3)
    assert B2.shape == (2 ** 7, 2 ** 7)
    assert np.allclose(B2, embed(inst.R, SiteEmbedding(3, 3, 7)))


def test_dimension_cap():
    with pytest.raises(DimensionOverflowError):
        gybe_residual(np.eye(2 ** 8), 8, 7)


def test_power_closed_form():
    assert power_formula_check(1, 12) < 1e-10
    assert power_formula_check(-1, 12) < 1e-10
    assert np.allclose(power_closed_form(0), np.eye(32))


def test_power_formula_error_growth_is_mild():
    errs = [power_formula_check(1, p) for p in (8, 16, 32)]
    assert errs[-1] < 32 * 1e-13 * 10


def test_order_probe():
    assert order_probe(SWAP, 10) == 2
    assert order_probe(np.diag([1, 1j]), 10) == 4
    assert order_probe(np.diag([2.0, 2.0]), 3) == 1
    assert order_probe(unitary_w_R(3).R, 1000) is None


def test_order_probe_on_phase_case():
    # eigenvalues (1 +- i) square to +-2i, so the fourth power is a multiple of 1
    R = instantiate_case("6B").R
    assert np.allclose(np.linalg.matrix_power(R, 4), -4 * np.eye(16))
    assert order_probe(R, 16) == 4


def test_verify_case_report_fields():
    rep = verify_case("5B")
    d = rep.to_dict()
    assert rep.passed
    for key in ("gybe_residual", "braid_residual", "far_commutativity", "spectrum_match",
                "diagonalizable", "unitarity_deviation", "slocc", "unitarizability"):
        assert key in d["checks"]
    assert "timings" not in d
    assert "timings" in verify_case("5B", timings=True).to_dict()


def test_verify_case_reports_claim_mismatch():
    rep = verify_case("6C", {"k": 2})
    assert not rep.passed
    assert any("w_class_output" in m for m in rep.mismatches)


def test_xi_sum_square():
    S = xi_sum()
    assert np.linalg.norm(S @ S + 3 * np.eye(32)) < 1e-13
