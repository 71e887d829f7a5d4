import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gybo.operator_zoo import (CASES, DomainError, GybeInstance, _p1_w_point, _p1_build,
                               _p1_input, case2_eigenbasis, eta_sum, extraspecial_ansatz,
                               generator, instantiate_case, pair_projector, partition_p1,
                               registry_json, unitary_w_R, xi_sum)
from gybo.spectral import check_spectrum
from gybo.tensor_core import apply
from gybo.ybe_verify import gybe_residual

@pytest.mark.parametrize("kind,width", [("theta", 2), ("xi", 3), ("eta", 4)])
def test_extraspecial_relations(kind, width):
    n = 2 * width + 1
    gens = [generator(kind, j, n, width=width if kind == "eta" else None)
            for j in range(1, n - width + 2)]
    eye = np.eye(2 ** n)
    for a, g in enumerate(gens):
        assert np.allclose(g @ g, -eye)
        for b in range(a + 1, len(gens)):
            h = gens[b]
            sign = -1 if b - a < width else 1
            assert np.allclose(g @ h, sign * h @ g)


def test_projectors():
    p = generator("proj_p", 1, 2)
    assert np.allclose(p @ p, p)
    pp = generator("proj_pp", 1, 2)
    assert np.allclose(pp @ pp, 2 * pp)
    assert np.allclose(pair_projector(1, 3, 3), pair_projector(3, 1, 3))


def test_generator_bounds():
    with pytest.raises(ValueError):
        generator("theta", 4, 4)
    with pytest.raises(ValueError):
        generator("nope", 1, 4)


def test_sum_identities():
    assert np.allclose(xi_sum() @ xi_sum(), -3 * np.eye(32))
    S = eta_sum(4)
    assert np.allclose(S @ S, -4 * np.eye(128))


def test_ansatz_is_traceless_plus_identity():
    # every product of thetas is traceless, so tr R / 16 = 1 for any parameters
    rng = np.random.default_rng(0)
    R = extraspecial_ansatz(*(rng.normal(size=7) + 1j * rng.normal(size=7)))
    assert np.isclose(np.trace(R) / 16, 1)


@pytest.mark.parametrize("cid", list(CASES))
def test_every_case_solves_equation(cid):
    inst = instantiate_case(cid)
    assert gybe_residual(inst.R, inst.m, inst.l) < 1e-10


@pytest.mark.parametrize("cid,scale", [("5A-i", 2), ("5A-ii", 2), ("5B", 2), ("5C", 2),
                                       ("6A", 2), ("6C", 2), ("6B", np.sqrt(2))])
def test_four_qubit_spectra_are_scaled_claims(cid, scale):
    inst = instantiate_case(cid)
    claim = CASES[cid].claimed_spectrum(dict(inst.resolved_params))
    res = check_spectrum(inst.R, claim)
    assert res.ok
    assert np.isclose(res.scale, scale)


def test_6a_alternative_constraint_has_no_solution():
    # alpha2 = alpha1 with alpha3 = 0 misses the equation on a grid of alpha1
    for a1 in [-1j * np.sqrt(2), 1, 0.5j, 2 + 1j]:
        R = extraspecial_ansatz(alpha1=a1, alpha2=a1, beta1=-1j, beta2=-1j, beta3=-1)
        assert gybe_residual(R, 4, 2) > 1e-3


@settings(max_examples=15, deadline=None)
@given(st.complex_numbers(min_magnitude=0.2, max_magnitude=3))
def test_6a_family_holds_for_any_alpha1(a1):
    inst = instantiate_case("6A", alpha1=a1)
    assert gybe_residual(inst.R, 4, 2) < 1e-10


def test_6b_canonical_basis_branch():
    inst = instantiate_case("6B")
    assert inst.branch == (-1,)
    V = case2_eigenbasis()
    assert np.linalg.matrix_rank(V) == 16
    RV = inst.R @ V
    lam = np.einsum("ij,ij->j", V.conj(), RV) / np.einsum("ij,ij->j", V.conj(), V)
    assert np.linalg.norm(RV - V * lam) < 1e-8


def test_p1_output_amplitudes_off_the_symmetric_point():
    rng = np.random.default_rng(5)
    for _ in range(5):
        b1, l1, l3 = rng.normal(size=3) + 1j * rng.normal(size=3)
        p = _p1_w_point(b1, l1, l3)
        out = apply(_p1_build(p), _p1_input(p)).amplitudes
        k = (l1 + 1) * (l3 - 1) / 4
        assert np.allclose(out[[1, 2, 4]], [k * b1, (l1 - 1) * (l3 - 1), -k * b1])
        assert np.linalg.norm(np.delete(out, [1, 2, 4])) < 1e-10


def test_p1_constraint_singularity():
    with pytest.raises(DomainError):
        instantiate_case("P1", l1=1.0)


def test_unitary_family():
    for n in (3, 4, 5):
        inst = unitary_w_R(n, -1)
        assert np.allclose(inst.R @ inst.R.conj().T, np.eye(2 ** (2 * n - 1)))
    with pytest.raises(DomainError):
        unitary_w_R(2)


def test_instantiate_errors():
    with pytest.raises(KeyError):
        instantiate_case("NOPE")
    with pytest.raises(DomainError):
        instantiate_case("5B", alpha9=1)
    with pytest.raises(DomainError):
        instantiate_case("Un", n=9)
    with pytest.raises(DomainError):
        instantiate_case("6C", k=0)


def test_string_parameters_are_coerced():
    a = instantiate_case("6C", k="2")
    b = instantiate_case("6C", k=2)
    assert np.array_equal(a.R, b.R)


def test_instance_validation():
    with pytest.raises(ValueError):
        GybeInstance(np.eye(8), m=3, l=3, case_id="x", resolved_params={})
    with pytest.raises(ValueError):
        GybeInstance(np.eye(4), m=3, l=1, case_id="x", resolved_params={})


def test_p1_point_is_singular_but_solves():
    inst = instantiate_case("P1")
    assert not inst.invertible
    assert gybe_residual(inst.R, 3, 2) < 1e-12


def test_registry_json_is_stable():
    assert registry_json() == registry_json()
    assert partition_p1().shape == (8, 8)
