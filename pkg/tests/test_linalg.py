import numpy as np
import pytest
from hypothesis import given

from schattenlab import linalg
from schattenlab.linalg import LinalgError, adjoint, matmul, nullspace, operator_norm, rank, svd, svd_values, trace
from schattenlab.oracles import matmul_loops, power_iteration_norm, singular_values_charpoly
from schattenlab.random_models import complex_matrix, unitary
from strategies import matrices, seeds

# examples


def test_matmul_identity_and_zero(rng):
    a = complex_matrix(rng, 3, 4)
    assert np.array_equal(matmul(np.eye(3), a), a)
    assert np.array_equal(matmul(a, np.zeros((4, 2))), np.zeros((3, 2)))


def test_matmul_against_loops(rng):
    a, b = complex_matrix(rng, 3), complex_matrix(rng, 3)
    np.testing.assert_allclose(matmul(a, b), matmul_loops(a, b), rtol=0, atol=1e-13)


def test_matmul_shape_mismatch():
    with pytest.raises(LinalgError, match="mismatch"):
        matmul(np.eye(2), np.eye(3))


def test_adjoint_examples(rng):
    s = rng.normal(size=(3, 3))
    s = s + s.T
    assert np.array_equal(adjoint(s), s)
    np.testing.assert_array_equal(adjoint([[0, 1j], [0, 0]]), [[0, 0], [-1j, 0]])
    a = complex_matrix(rng, 2, 5)
    want = np.array([[np.conj(a[j, i]) for j in range(2)] for i in range(5)])
    np.testing.assert_array_equal(adjoint(a), want)


@pytest.mark.parametrize(
    "a, expected",
    [
        (np.eye(3), [1, 1, 1]),
        (np.diag([3.0, -4.0]), [4, 3]),
        ([[0, 2], [0, 0]], [2, 0]),
    ],
)
def test_svd_values_examples(a, expected):
    np.testing.assert_allclose(svd_values(a), expected, atol=1e-15)


def test_svd_values_rejects_non_finite():
    with pytest.raises(LinalgError, match="non-finite"):
        svd_values([[1.0, np.nan], [0, 1]])
    with pytest.raises(LinalgError, match="2-D"):
        svd_values([1.0, 2.0])


def test_svd_non_convergence_is_an_error(monkeypatch, rng):
    monkeypatch.setattr(linalg, "MAX_SWEEPS", 1)
    with pytest.raises(LinalgError, match="did not converge"):
        svd_values(complex_matrix(rng, 6))


def test_trace_examples(rng):
    assert trace(np.eye(5)) == 5
    assert trace([[0, 1], [0, 0]]) == 0
    a = complex_matrix(rng, 4)
    assert trace(a) == pytest.approx(a[0, 0] + a[1, 1] + a[2, 2] + a[3, 3], abs=1e-14)
    with pytest.raises(LinalgError, match="non-square"):
        trace(np.ones((2, 3)))


def test_operator_norm_examples(rng):
    assert operator_norm(unitary(rng, 4)) == pytest.approx(1.0, abs=1e-13)
    assert operator_norm(np.diag([1.0, 5.0, 2.0])) == 5.0
    a = complex_matrix(rng, 5, 3)
    assert operator_norm(a) == pytest.approx(power_iteration_norm(a), rel=1e-9)


def test_svd_reconstruction_and_orthonormality(rng):
    for shape in [(5, 3), (3, 5), (4, 4), (1, 6), (6, 1)]:
        a = complex_matrix(rng, *shape)
        u, s, vh = svd(a)
        np.testing.assert_allclose((u * s) @ vh, a, atol=1e-12 * s[0])
        k = min(shape)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(k), atol=1e-12)
        np.testing.assert_allclose(vh @ vh.conj().T, np.eye(k), atol=1e-12)
        assert np.all(np.diff(s) <= 0)


def test_backward_error_envelope(rng):
    # larger than the property tests, still well inside the design envelope
    a = complex_matrix(rng, 60, 40)
    u, s, vh = svd(a)
    err = np.max(np.abs((u * s) @ vh - a)) / s[0]
    assert err <= 1e-12 * 60


def test_rank_deficient_and_graded_matrices(rng):
    x, y = complex_matrix(rng, 6, 2), complex_matrix(rng, 2, 5)
    s = svd_values(x @ y)
    assert s[2] <= 1e-13 * s[0]
    graded = np.diag(10.0 ** -np.arange(8)) @ unitary(rng, 8)
    np.testing.assert_allclose(svd_values(graded), 10.0 ** -np.arange(8), rtol=1e-10)


def test_rank_and_nullspace():
    a = np.array([[1, 2, 3], [2, 4, 6], [1, 0, 1]], dtype=complex)
    assert rank(a) == 2
    n = nullspace(a)
    assert n.shape == (3, 1)
    np.testing.assert_allclose(a @ n, 0, atol=1e-14)
    basis, free = nullspace(np.zeros((0, 3)), return_free=True)
    assert free == [0, 1, 2] and np.array_equal(basis, np.eye(3))


# properties


@given(seeds)
def test_matmul_matches_loop_oracle(seed):
    rng = np.random.default_rng(seed)
    n, k, m = (int(x) for x in rng.integers(1, 7, size=3))
    a, b = complex_matrix(rng, n, k), complex_matrix(rng, k, m)
    np.testing.assert_allclose(matmul(a, b), matmul_loops(a, b), atol=1e-12)


@given(matrices())
def test_adjoint_is_an_involution(a):
    assert np.array_equal(adjoint(adjoint(a)), a)


@given(matrices())
def test_squares_match_charpoly_eigenvalues(a):
    s = svd_values(a)
    ref = singular_values_charpoly(a)
    np.testing.assert_allclose(s**2, ref**2, rtol=0, atol=1e-10 * s[0] ** 2)


@given(matrices(), seeds)
def test_unitary_invariance(a, seed):
    rng = np.random.default_rng(seed)
    u, v = unitary(rng, a.shape[0]), unitary(rng, a.shape[1])
    np.testing.assert_allclose(svd_values(u @ a @ v), svd_values(a), atol=1e-10 * svd_values(a)[0])


@given(matrices())
def test_adjoint_has_same_singular_values(a):
    np.testing.assert_allclose(svd_values(adjoint(a)), svd_values(a), atol=1e-12 * svd_values(a)[0])


@given(seeds)
def test_trace_is_cyclic(seed):
    rng = np.random.default_rng(seed)
    n, k = (int(x) for x in rng.integers(1, 7, size=2))
    a, b = complex_matrix(rng, n, k), complex_matrix(rng, k, n)
    assert abs(trace(matmul(a, b)) - trace(matmul(b, a))) <= 1e-10 * (1 + abs(trace(matmul(a, b))))


@given(seeds)
def test_operator_norm_is_submultiplicative(seed):
    rng = np.random.default_rng(seed)
    n, k, m = (int(x) for x in rng.integers(1, 7, size=3))
    a, b = complex_matrix(rng, n, k), complex_matrix(rng, k, m)
    assert operator_norm(a @ b) <= operator_norm(a) * operator_norm(b) + 1e-10
