import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gybo.tensor_core import (I2, SWAP, X, Y, Z, PureState, SiteEmbedding, apply_on_sites,
                              basis_state, embed, kron_all, op_schmidt_reshape, partial_trace,
                              pauli, product_state)


def rand_op(rng, k):
    d = 2 ** k
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))


def rand_state(rng, n):
    v = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return PureState(n, v / np.linalg.norm(v))


def test_basis_ordering_site1_is_msb():
    assert basis_state("100").amplitudes[4] == 1
    assert basis_state("001").amplitudes[1] == 1
    # X on site 1 of three flips the most significant bit
    out = pauli("X", 1, 3) @ basis_state("000").amplitudes
    assert out[4] == 1


def test_embed_matches_explicit_kron():
    rng = np.random.default_rng(0)
    A = rand_op(rng, 2)
    got = embed(A, SiteEmbedding(2, 2, 4))
    assert np.allclose(got, kron_all(I2, A, I2))


def test_embedding_overflow_rejected():
    with pytest.raises(ValueError):
        SiteEmbedding(3, 3, 4)


def test_swap_exchanges_qubits():
    v = product_state([1, 2], [3, 4]).amplitudes
    w = product_state([3, 4], [1, 2]).amplitudes
    assert np.allclose(SWAP @ v, w)


def test_pauli_algebra():
    assert np.allclose(X @ Y, 1j * Z)
    assert np.allclose(pauli("Z", 2, 2), kron_all(I2, Z))
    with pytest.raises(ValueError):
        pauli("Q", 1, 2)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 3), st.integers(0, 2 ** 31 - 1))
def test_apply_on_sites_matches_dense(m, extra, seed):
    rng = np.random.default_rng(seed)
    n = m + extra
    op = rand_op(rng, m)
    start = 1 + (seed % (extra + 1))
    target = rng.normal(size=(2 ** n, 3)) + 0j
    dense = embed(op, SiteEmbedding(m, start, n)) @ target
    assert np.allclose(apply_on_sites(op, target, start, n), dense)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2 ** 31 - 1))
def test_partial_trace_is_density_matrix(n, seed):
    rng = np.random.default_rng(seed)
    psi = rand_state(rng, n)
    keep = sorted(rng.choice(np.arange(1, n + 1), size=rng.integers(1, n), replace=False))
    rho = partial_trace(psi, keep)
    assert np.isclose(np.trace(rho), 1)
    assert np.allclose(rho, rho.conj().T)
    assert np.linalg.eigvalsh(rho).min() > -1e-12


def test_partial_trace_of_product_and_density_input():
    a = np.array([0.6, 0.8j])
    b = np.array([1, 1]) / np.sqrt(2)
    psi = product_state(a, b)
    assert np.allclose(partial_trace(psi, [1]), np.outer(a, a.conj()))
    rho = np.outer(psi.amplitudes, psi.amplitudes.conj())
    assert np.allclose(partial_trace(rho, [2]), np.outer(b, b.conj()))


def test_operator_schmidt_rank_one_for_products():
    rng = np.random.default_rng(3)
    A, B, C = rand_op(rng, 1), rand_op(rng, 1), rand_op(rng, 1)
    M = kron_all(A, B, C)
    for cut in ([1], [2], [3], [1, 3]):
        assert np.linalg.matrix_rank(op_schmidt_reshape(M, cut), tol=1e-9) == 1
    assert np.linalg.matrix_rank(op_schmidt_reshape(SWAP, [1])) == 4


def test_pure_state_is_immutable_and_not_renormalized():
    s = PureState(1, [3, 4])
    assert s.norm == 5 and not s.normalized
    assert s.normalize().normalized
    with pytest.raises(ValueError):
        s.amplitudes[0] = 1
    with pytest.raises(ValueError):
        PureState(2, [1, 0, 0])
