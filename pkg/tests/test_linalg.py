import numpy as np
import pytest

from pseudoselect.exceptions import DimensionMismatchError, NotPositiveDefiniteError
from pseudoselect.linalg import CholeskyFactor, SpdMatrix, cholesky, log_det_spd, solve_spd

from oracles import cofactor_determinant


def test_spd_matrix_rejects_asymmetry():
    with pytest.raises(DimensionMismatchError):
        SpdMatrix(np.array([[1.0, 2.0], [2.0 + 1e-15, 1.0]]))


def test_spd_matrix_rejects_nonsquare():
    with pytest.raises(DimensionMismatchError):
        SpdMatrix(np.ones((2, 3)))


def test_cholesky_identity():
    factor = cholesky(SpdMatrix(np.eye(2)))
    assert np.array_equal(factor.lower, np.eye(2))


def test_cholesky_hand_case():
    factor = cholesky(SpdMatrix(np.array([[4.0, 2.0], [2.0, 3.0]])))
    expected = np.array([[2.0, 0.0], [1.0, np.sqrt(2.0)]])
    assert np.allclose(factor.lower, expected, atol=1e-14)
    # reconstruction by hand multiplication
    assert np.max(np.abs(factor.lower @ factor.lower.T - [[4.0, 2.0], [2.0, 3.0]])) < 1e-14


def test_cholesky_indefinite_raises():
    with pytest.raises(NotPositiveDefiniteError):
        cholesky(SpdMatrix(np.array([[1.0, 2.0], [2.0, 1.0]])))  # eigenvalue -1


def test_cholesky_near_singular_pivot_raises():
    tiny = SpdMatrix(np.diag([1.0, 1e-13]))
    with pytest.raises(NotPositiveDefiniteError):
        cholesky(tiny)


def test_log_det_identity_any_dim():
    for dim in (1, 3, 6):
        assert log_det_spd(cholesky(SpdMatrix(np.eye(dim)))) == 0.0


def test_log_det_diagonal():
    value = log_det_spd(cholesky(SpdMatrix(np.diag([2.0, 3.0]))))
    assert abs(value - np.log(6.0)) < 1e-12


def test_log_det_matches_cofactor_oracle_5x5():
    rng = np.random.default_rng(7)
    b = rng.uniform(-1, 1, size=(5, 5))
    a = b @ b.T + 5.0 * np.eye(5)
    a = (a + a.T) / 2
    value = log_det_spd(cholesky(SpdMatrix(a)))
    assert abs(value - np.log(cofactor_determinant(a))) < 1e-8


def test_log_det_matches_cofactor_oracle_dims_1_to_6():
    rng = np.random.default_rng(11)
    for dim in range(1, 7):
        for _ in range(5):
            b = rng.normal(size=(dim, dim))
            a = b @ b.T + 0.5 * np.eye(dim)
            a = (a + a.T) / 2
            value = log_det_spd(cholesky(SpdMatrix(a)))
            assert abs(value - np.log(cofactor_determinant(a))) < 1e-8


def test_solve_identity():
    factor = cholesky(SpdMatrix(np.eye(2)))
    assert np.array_equal(solve_spd(factor, np.array([3.0, -1.0])), [3.0, -1.0])


def test_solve_hand_case_residual():
    a = np.array([[4.0, 2.0], [2.0, 3.0]])
    b = np.array([10.0, 8.0])
    x = solve_spd(cholesky(SpdMatrix(a)), b)
    assert np.max(np.abs(a @ x - b)) < 1e-10


def test_solve_dimension_mismatch():
    factor = cholesky(SpdMatrix(np.eye(2)))
    with pytest.raises(DimensionMismatchError):
        solve_spd(factor, np.ones(3))


def test_reconstruction_property_random_spd():
    rng = np.random.default_rng(42)
    for _ in range(30):
        dim = int(rng.integers(1, 7))
        b = rng.normal(size=(dim, dim))
        shift = rng.uniform(0.1, 3.0)
        a = b @ b.T + shift * np.eye(dim)
        a = (a + a.T) / 2
        factor = cholesky(SpdMatrix(a))
        assert np.all(np.diag(factor.lower) > 0)
        assert np.max(np.abs(factor.lower @ factor.lower.T - a)) < 1e-10


def test_solve_residual_property_random():
    rng = np.random.default_rng(43)
    for _ in range(30):
        dim = int(rng.integers(1, 7))
        b_mat = rng.normal(size=(dim, dim))
        a = b_mat @ b_mat.T + 0.5 * np.eye(dim)
        a = (a + a.T) / 2
        rhs = rng.normal(size=dim) * 10
        x = solve_spd(cholesky(SpdMatrix(a)), rhs)
        bound = 1e-8 * (1 + np.max(np.abs(rhs)))
        assert np.max(np.abs(a @ x - rhs)) < bound


def test_factor_dim_property():
    factor = CholeskyFactor(np.eye(4))
    assert factor.dim == 4
