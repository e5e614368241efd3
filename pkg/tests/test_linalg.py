import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ensemble_slc import linalg
from ensemble_slc.errors import DimensionError


def random_skew_hermitian(rng, n, scale=1.0):
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (x - x.conj().T) / 2


def eig_oracle(a):
    # exp(A) with A = -i H, H = i A Hermitian
    lam, v = np.linalg.eigh(1j * a)
    return v @ np.diag(np.exp(-1j * lam)) @ v.conj().T


def test_mat_exp_zero_is_identity():
    np.testing.assert_array_equal(linalg.mat_exp(np.zeros((2, 2))), np.eye(2))


def test_mat_exp_diagonal():
    a, b = 0.3, -1.7
    got = linalg.mat_exp(np.diag([1j * a, 1j * b]))
    np.testing.assert_allclose(got, np.diag([np.exp(1j * a), np.exp(1j * b)]), atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_mat_exp_matches_eigendecomposition(n):
    rng = np.random.default_rng(n)
    for _ in range(20):
        a = random_skew_hermitian(rng, n, scale=3.0)
        np.testing.assert_allclose(linalg.mat_exp(a), eig_oracle(a), rtol=0, atol=1e-10)


def test_mat_exp_generic_fallback():
    a = np.array([[0.0, 1.0], [0.0, 0.0]])  # nilpotent, not normal
    np.testing.assert_allclose(linalg.mat_exp(a), [[1, 1], [0, 1]], atol=1e-14)


def test_mat_exp_rejects_non_square():
    with pytest.raises(DimensionError):
        linalg.mat_exp(np.zeros((2, 3)))


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 5), seed=st.integers(0, 2**32 - 1), scale=st.floats(1e-6, 50.0))
def test_exponential_of_skew_hermitian_is_unitary(n, seed, scale):
    rng = np.random.default_rng(seed)
    a = random_skew_hermitian(rng, n, scale)
    u = linalg.mat_exp(a)
    assert linalg.unitarity_error(u) <= 1e-10
    np.testing.assert_allclose(u, eig_oracle(a), rtol=0, atol=1e-10)
    psi = rng.normal(size=n) + 1j * rng.normal(size=n)
    assert abs(linalg.norm(linalg.apply(u, psi)) - linalg.norm(psi)) <= 1e-10 * linalg.norm(psi)


def test_batched_exponentials_match_single():
    rng = np.random.default_rng(7)
    for n in (2, 3):
        stack = np.stack([random_skew_hermitian(rng, n) for _ in range(6)])
        full, half = linalg.skew_hermitian_exponentials(stack, 0.3, 0.15)
        for a, f, h in zip(stack, full, half):
            np.testing.assert_allclose(f, eig_oracle(0.3 * a), atol=1e-13)
            np.testing.assert_allclose(h @ h, f, atol=1e-13)


def test_pauli_path_handles_zero_generator_in_stack():
    stack = np.zeros((3, 2, 2), dtype=complex)
    stack[1] = np.diag([0.5j, -0.5j])
    out = linalg.expm_skew_hermitian(stack)
    np.testing.assert_allclose(out[0], np.eye(2), atol=0)
    np.testing.assert_allclose(out[1], np.diag(np.exp([0.5j, -0.5j])), atol=1e-15)


def test_inner_product():
    psi = np.array([1, 1j]) / np.sqrt(2)
    assert linalg.inner_product(psi, psi) == pytest.approx(1.0)
    assert linalg.inner_product([1, 0], [0, 1]) == 0
    assert linalg.inner_product(psi, [1, 0]) == pytest.approx(1 / np.sqrt(2))
    phi = np.array([0.3 - 0.2j, 0.9j])
    assert linalg.inner_product(psi, phi) == pytest.approx(np.conj(linalg.inner_product(phi, psi)))


def test_inner_product_dimension_mismatch():
    with pytest.raises(DimensionError):
        linalg.inner_product([1, 0], [1, 0, 0])


def test_apply_adjoint_mul():
    rng = np.random.default_rng(3)
    psi = rng.normal(size=3) + 1j * rng.normal(size=3)
    np.testing.assert_array_equal(linalg.apply(np.eye(3), psi), psi)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    np.testing.assert_array_equal(linalg.adjoint(linalg.adjoint(a)), a)
    lhs = linalg.adjoint(linalg.mul(a, b))
    rhs = linalg.mul(linalg.adjoint(b), linalg.adjoint(a))
    np.testing.assert_allclose(lhs, rhs, atol=1e-14)
    with pytest.raises(DimensionError):
        linalg.apply(a, psi[:2])
    with pytest.raises(DimensionError):
        linalg.mul(a, np.eye(2))


def test_predicates():
    h = np.array([[1, 2 - 1j], [2 + 1j, -3]])
    assert linalg.is_hermitian(h)
    assert not linalg.is_skew_hermitian(h)
    assert linalg.is_skew_hermitian(1j * h)
    assert linalg.is_unitary(np.array([[0, 1], [1, 0]]))
    assert not linalg.is_unitary(2 * np.eye(2))
