import numpy as np
import pytest

from movingmesh import TridiagonalError, solve_tridiagonal


def test_identity_system(rng):
    r = rng.normal(size=9)
    x = solve_tridiagonal(np.zeros(8), np.ones(9), np.zeros(8), r)
    assert np.array_equal(x, r)


def test_hand_elimination_3x3():
    x = solve_tridiagonal([-1.0, -1.0], [2.0, 2.0, 2.0], [-1.0, -1.0],
                          [1.0, 0.0, 1.0])
    assert np.allclose(x, [1.0, 1.0, 1.0], rtol=1e-14)


def test_scalar_system():
    assert solve_tridiagonal([], [5.0], [], [10.0])[0] == 2.0


def test_zero_pivot_reports_index():
    with pytest.raises(TridiagonalError) as err:
        solve_tridiagonal([1.0], [0.0, 1.0], [1.0], [1.0, 1.0])
    assert err.value.index == 0
    # pivot killed by elimination: row 1 pivot = 1 - 2*2/1 ... pick exact zero
    with pytest.raises(TridiagonalError) as err:
        solve_tridiagonal([2.0], [1.0, 4.0], [2.0], [1.0, 1.0])
    assert err.value.index == 1


def test_against_dense_oracle(rng):
    """Random diagonally dominant systems vs numpy dense elimination."""
    for _ in range(300):
        n = int(rng.integers(1, 65))
        lower = rng.normal(size=max(n - 1, 0))
        upper = rng.normal(size=max(n - 1, 0))
        diag = rng.normal(size=n)
        bump = np.zeros(n)
        bump[:-1] += np.abs(upper)
        bump[1:] += np.abs(lower)
        diag = np.sign(diag) * (np.abs(diag) + bump + 0.5)
        rhs = rng.normal(size=n)
        dense = np.diag(diag)
        if n > 1:
            dense += np.diag(lower, -1) + np.diag(upper, 1)
        expected = np.linalg.solve(dense, rhs)
        got = solve_tridiagonal(lower, diag, upper, rhs)
        assert np.allclose(got, expected, rtol=1e-12, atol=1e-13)


def test_size_validation():
    with pytest.raises(ValueError):
        solve_tridiagonal([1.0], [1.0, 1.0, 1.0], [1.0], [1.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        solve_tridiagonal([], [], [], [])
