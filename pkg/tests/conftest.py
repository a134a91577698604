import numpy as np
import pytest

from movingmesh import PhysicalGrid


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger JIT compilation once so timed tests measure the algorithm."""
    from movingmesh import kernels

    lower = np.array([-1.0, -1.0])
    diag = np.array([2.0, 2.0, 2.0])
    rhs = np.array([1.0, 0.0, 1.0])
    kernels.thomas_solve(lower, diag, lower, rhs)
    kernels.adaptive_theta(np.array([1.0, -1.0]), np.array([1, -1]),
                           np.array([0.5, 0.5]))
    v = np.linspace(0.0, 1.0, 5)
    cells = np.zeros(4)
    ones = np.ones(4)
    nodes5 = np.ones(5)
    kernels.advect_update(v, v, ones, ones, cells, nodes5, nodes5,
                          cells, 0.01, 0.25)
    H = np.full(5, 2.0)
    q = np.zeros(5)
    kernels.swe_fluxes(H, q, H, cells, ones, cells, cells, 0.01, 0.25, 9.81)
    kernels.swe_mass_update(H, cells, nodes5, nodes5, 0.01, 0.25)
    kernels.swe_momentum_update(q, H, H, cells, H, H, nodes5, nodes5,
                                0.01, 0.25, 9.81)


def random_grid(rng, n_cells, length):
    """Strictly increasing random grid pinned at 0 and length."""
    widths = rng.uniform(0.2, 1.0, n_cells)
    x = np.concatenate([[0.0], np.cumsum(widths)])
    x *= length / x[-1]
    x[0] = 0.0
    x[-1] = length
    return PhysicalGrid(x, length)


def perturbed_grid(grid, rng, scale=0.2):
    """Shift interior nodes by a fraction of the local cell width."""
    x = grid.nodes.copy()
    widths = np.diff(grid.nodes)
    room = np.minimum(widths[:-1], widths[1:])
    x[1:-1] += rng.uniform(-scale, scale, x.size - 2) * room
    return PhysicalGrid(x, grid.length)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
