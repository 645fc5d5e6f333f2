import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liouville.core import IDENTITY_2, SIGMA_3, SIGMA_MINUS, SIGMA_PLUS, kron
from liouville.errors import DimensionMismatch
from liouville.vectorization import (
    SuperKet,
    apply,
    composite_index,
    liouville_inner,
    mho,
    mho_inv,
    super_acomm,
    super_comm,
    superket_basis,
    superket_from_column,
    superket_to_column,
    superop_from_column,
    superop_to_column,
    triple_superop,
    vectorize_product,
)

from conftest import brute_vec, rand_c


def test_mho_examples():
    assert np.array_equal(mho(SIGMA_PLUS).data, [0, 1, 0, 0])
    assert np.array_equal(mho(IDENTITY_2).data, [1, 0, 0, 1])
    a, b = 0.6, 0.8j
    psi = np.array([a, b])
    v = mho(np.outer(psi, psi.conj())).data
    assert np.allclose(v, [abs(a) ** 2, a * np.conj(b), np.conj(a) * b, abs(b) ** 2])


def test_mho_matches_brute_force(rng):
    for d in (1, 2, 3, 5):
        x = rand_c(rng, (d, d))
        assert np.array_equal(mho(x).data, brute_vec(x))


def test_round_trip_is_exact(rng):
    x = rand_c(rng, (4, 4))
    assert np.array_equal(mho_inv(mho(x)), x)
    v = rand_c(rng, 9)
    assert np.array_equal(mho(mho_inv(v)).data, v)


def test_mho_inv_example():
    assert np.array_equal(mho_inv([0, 1, 0, 0]), SIGMA_PLUS)
    g1, g2 = 1.5, 0.5
    assert np.allclose(mho_inv([g2 / g1, 0, 0, 1]), np.diag([g2 / g1, 1]))


def test_superket_validation():
    with pytest.raises(DimensionMismatch):
        SuperKet(np.zeros(5), 2)
    with pytest.raises(DimensionMismatch):
        mho_inv(np.zeros(5))
    with pytest.raises(DimensionMismatch):
        mho_inv(mho(np.eye(2)), dim=3)


def test_basis_orthonormal_and_complete():
    d = 3
    kets = [superket_basis(i, j, d) for i in range(d) for j in range(d)]
    gram = np.array([[a.inner(b) for b in kets] for a in kets])
    assert np.array_equal(gram, np.eye(d * d))
    assert np.array_equal(superket_basis(0, 0, 2).data, [1, 0, 0, 0])
    assert np.array_equal(superket_basis(1, 1, 2).data, [0, 0, 0, 1])
    with pytest.raises(IndexError):
        superket_basis(2, 0, 2)


def test_triple_superop_examples(rng):
    assert np.array_equal(triple_superop(IDENTITY_2, IDENTITY_2), np.eye(4))
    assert np.array_equal(triple_superop(SIGMA_MINUS, SIGMA_PLUS), kron(SIGMA_MINUS, SIGMA_MINUS))
    a, b, c = (rand_c(rng, (3, 3)) for _ in range(3))
    assert np.abs(triple_superop(a, c) @ mho(b).data - brute_vec(a @ b @ c)).max() <= 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_triple_product_property(d, seed):
    r = np.random.default_rng(seed)
    a, b, c = (rand_c(r, (d, d)) for _ in range(3))
    scale = max(1.0, np.linalg.norm(a, 2) * np.linalg.norm(b, 2) * np.linalg.norm(c, 2))
    assert np.abs(apply(triple_superop(a, c), mho(b)).data - mho(a @ b @ c).data).max() <= 1e-12 * scale


def test_super_commutator(rng):
    x, y = rand_c(rng, (3, 3)), rand_c(rng, (3, 3))
    assert np.array_equal(super_comm(x, y), -super_comm(y, x))
    assert np.array_equal(super_comm(x, x), np.zeros((9, 9)))
    assert np.array_equal(super_comm(SIGMA_3, IDENTITY_2), np.diag([0, 2, -2, 0]))
    a, b = rand_c(rng, (3, 3)), rand_c(rng, (3, 3))
    assert np.allclose(super_comm(a, np.eye(3)) @ mho(b).data, mho(a @ b - b @ a).data, atol=1e-12)


def test_super_anticommutator(rng):
    x, y = rand_c(rng, (2, 2)), rand_c(rng, (2, 2))
    assert np.array_equal(super_acomm(x, y), super_acomm(y, x))
    assert np.array_equal(super_acomm(IDENTITY_2, IDENTITY_2), 2 * np.eye(4))
    assert np.array_equal(super_acomm(SIGMA_PLUS @ SIGMA_MINUS, IDENTITY_2), np.diag([2, 1, 1, 0]))
    a, b = rand_c(rng, (3, 3)), rand_c(rng, (3, 3))
    assert np.allclose(super_acomm(a, np.eye(3)) @ mho(b).data, mho(a @ b + b @ a).data, atol=1e-12)


def test_composite_factorisation(rng):
    assert np.array_equal(vectorize_product(IDENTITY_2, IDENTITY_2).data, mho(np.eye(4)).data)
    v = vectorize_product(SIGMA_PLUS, SIGMA_MINUS)
    # bra index (e, g) and ket index (g, e), with e = 0 and g = 1
    row, col = composite_index(0, 1, 2), composite_index(1, 0, 2)
    assert v.data[row * 4 + col] == 1
    a, b = rand_c(rng, (2, 2)), rand_c(rng, (2, 2))
    v = vectorize_product(a, b).data
    for n in range(2):
        for m in range(2):
            for n2 in range(2):
                for m2 in range(2):
                    lhs = v[composite_index(n, m, 2) * 4 + composite_index(n2, m2, 2)]
                    rhs = superket_basis(n, n2, 2).inner(mho(a)) * superket_basis(m, m2, 2).inner(mho(b))
                    assert abs(lhs - rhs) <= 1e-13


def test_inner_product_identities(rng):
    for d in (2, 3, 4):
        a, b = rand_c(rng, (d, d)), rand_c(rng, (d, d))
        scale = np.linalg.norm(a) * np.linalg.norm(b)
        assert abs(liouville_inner(a, b) - np.trace(b @ a.conj().T)) <= 1e-12 * scale
        assert abs(liouville_inner(np.eye(d), b) - np.trace(b)) <= 1e-12 * np.linalg.norm(b) * d
        assert abs(mho(a).inner(mho(b)) - np.vdot(mho(a).data, mho(b).data)) == 0


def test_apply_dimension_check():
    with pytest.raises(DimensionMismatch):
        apply(np.eye(9), mho(np.eye(2)))


def test_column_stacking_interop(rng):
    d = 3
    x = rand_c(rng, (d, d))
    col = superket_to_column(mho(x))
    assert np.array_equal(col, x.reshape(-1, order="F"))
    assert np.array_equal(superket_from_column(col).data, mho(x).data)
    a, c = rand_c(rng, (d, d)), rand_c(rng, (d, d))
    s = triple_superop(a, c)
    # column stacking uses C^T (x) A for the same map
    assert np.allclose(superop_to_column(s), np.kron(c.T, a))
    assert np.array_equal(superop_from_column(superop_to_column(s)), s)
