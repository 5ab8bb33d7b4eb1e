import numpy as np
import pytest
from hypothesis import given, strategies as st

from biorth.errors import InputError, SingularityError, SingularMatrixError
from biorth.linalg import (
    as_square,
    as_vectors,
    cholesky_factor,
    gram,
    inner,
    inverse_rows,
    lu,
    lu_condition,
    solve_hpd,
)


def random_hpd(rng, n, complex_field=True):
    X = rng.standard_normal((n, n)) + (1j * rng.standard_normal((n, n)) if complex_field else 0)
    return X @ X.conj().T + n * np.eye(n)


def test_inner_conjugates_second_argument():
    assert inner([1j], [1]) == 1j
    assert inner([1], [1j]) == -1j
    assert inner([1, 1j], [1, 1j]) == 2


def test_inner_length_mismatch():
    with pytest.raises(InputError):
        inner([1, 2], [1])


def test_gram_matches_loops(rng):
    V = rng.standard_normal((4, 6)) + 1j * rng.standard_normal((4, 6))
    G = gram(V)
    for j in range(4):
        for k in range(4):
            assert G[j, k] == pytest.approx(inner(V[k], V[j]), abs=1e-12)
    assert np.array_equal(G, G.conj().T)


def test_gram_weight_scales(rng):
    V = rng.standard_normal((3, 5))
    assert np.allclose(gram(V, 0.25), 0.25 * gram(V))


def test_as_vectors_rejects_bad_input():
    with pytest.raises(InputError):
        as_vectors(np.zeros((0, 3)))
    with pytest.raises(InputError):
        as_vectors([[1.0, np.nan]])
    assert as_vectors([1, 2, 3]).shape == (1, 3)


def test_as_square_rejects_rectangular():
    with pytest.raises(InputError, match="square"):
        as_square(np.ones((2, 3)))
    with pytest.raises(InputError):
        as_square([[1, np.inf], [0, 1]])


@given(n=st.integers(1, 12), seed=st.integers(0, 10**6), complex_field=st.booleans())
def test_cholesky_reconstructs(n, seed, complex_field):
    rng = np.random.default_rng(seed)
    G = random_hpd(rng, n, complex_field)
    L, cond = cholesky_factor(G)
    assert np.allclose(L @ L.conj().T, G, atol=1e-10 * np.abs(G).max())
    assert np.allclose(np.triu(L, 1), 0)
    # the estimator is a lower bound on the 1-norm condition number, and rarely far below it
    true = np.linalg.cond(G, 1)
    assert cond <= true * (1 + 1e-8)
    assert cond >= true / 10


def test_cholesky_rejects_non_hermitian():
    with pytest.raises(InputError, match="Hermitian"):
        cholesky_factor(np.array([[2.0, 1.0], [0.0, 2.0]]))


def test_cholesky_names_failing_pivot():
    G = np.array([[1.0, 0, 0], [0, 1.0, 1.0], [0, 1.0, 1.0]])
    with pytest.raises(SingularityError) as info:
        cholesky_factor(G)
    assert info.value.pivot == 2


def test_cholesky_condition_cap():
    G = np.diag([1.0, 1e-9])
    with pytest.raises(SingularityError) as info:
        cholesky_factor(G, cond_cap=1e6)
    assert info.value.condition == pytest.approx(1e9, rel=1e-6)
    assert info.value.pivot == 1
    cholesky_factor(G, cond_cap=None)


def test_solve_hpd_matches_numpy(rng):
    G = random_hpd(rng, 7)
    b = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    assert np.allclose(solve_hpd(G, b), np.linalg.solve(G, b), atol=1e-12)
    B = rng.standard_normal((7, 3))
    assert np.allclose(solve_hpd(G, B), np.linalg.solve(G, B), atol=1e-12)
    with pytest.raises(InputError):
        solve_hpd(G, np.ones(3))


@given(n=st.integers(1, 16), seed=st.integers(0, 10**6), complex_field=st.booleans())
def test_inverse_rows_matches_numpy(n, seed, complex_field):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n)) + (1j * rng.standard_normal((n, n)) if complex_field else 0)
    A = A + n * np.eye(n)
    assert np.allclose(inverse_rows(A), np.linalg.inv(A), atol=1e-10)


def test_lu_zero_pivot():
    A = np.array([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(SingularMatrixError) as info:
        lu(A)
    assert info.value.pivot == 1


def test_inverse_rows_condition_cap():
    A = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-13]])
    inverse_rows(A)
    with pytest.raises(SingularMatrixError):
        inverse_rows(A, cond_cap=1e12)


def test_lu_condition_close_to_numpy(rng):
    A = rng.standard_normal((10, 10))
    LU, perm = lu(A)
    est = lu_condition(A, LU, perm)
    true = np.linalg.cond(A, 1)
    assert true / 10 <= est <= true * (1 + 1e-8)
