"""Monitor functions and equidistribution-driven grid motion.

Nodes are placed so that (monitor value) x (cell width) is constant
across cells: the initial grid solves the nonlinear elliptic problem
(w x_q)_q = 0 by fixed-point iteration, and each time step relaxes the
grid through the implicit parabolic problem (w x_q)_q = beta x_t (the
MMPDE5 equation) with the monitor frozen on the current layer, so one
tridiagonal solve per step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import GridError, IterationError, MovingMeshError
from .geometry import PhysicalGrid
from .tridiag import solve_tridiagonal

MONITOR_KINDS = ("gradient", "amplitude", "combined")


@dataclass(frozen=True)
class MonitorSpec:
    """Which monitor function drives the node density.

    gradient:  w = 1 + alpha*|u_x|          (shocks, fronts)
    amplitude: w = 1 + alpha*|u|            (extrema, no differentiation)
    combined:  w = 1 + alpha0*|u| + alpha1*|u_x|
    """

    kind: str
    alpha: float = 0.0
    alpha0: float = 0.0
    alpha1: float = 0.0

    def __post_init__(self):
        if self.kind not in MONITOR_KINDS:
            raise MovingMeshError(f"unknown monitor kind {self.kind!r}")
        if min(self.alpha, self.alpha0, self.alpha1) < 0.0:
            raise MovingMeshError("monitor weights must be non-negative")

    @classmethod
    def gradient(cls, alpha: float) -> "MonitorSpec":
        return cls(kind="gradient", alpha=alpha)

    @classmethod
    def amplitude(cls, alpha: float) -> "MonitorSpec":
        return cls(kind="amplitude", alpha=alpha)

    @classmethod
    def combined(cls, alpha0: float, alpha1: float) -> "MonitorSpec":
        return cls(kind="combined", alpha0=alpha0, alpha1=alpha1)


@dataclass(frozen=True)
class GridMotionParams:
    """Grid diffusion/smoothing coefficients and initial-grid iteration knobs."""

    beta: float
    sigma: float
    init_tol: float = 1.0e-10
    init_max_iter: int = 200

    def __post_init__(self):
        if self.beta < 0.0 or self.sigma < 0.0:
            raise MovingMeshError("beta and sigma must be non-negative")
        if not 0.0 < self.init_tol < 1.0:
            raise MovingMeshError("init_tol must lie in (0, 1)")


def monitor_cells(field: np.ndarray, nodes: np.ndarray,
                  spec: MonitorSpec) -> np.ndarray:
    """Discrete per-cell monitor values for node data on raw node positions."""
    field = np.asarray(field, dtype=np.float64)
    if field.size != nodes.size:
        raise ValueError(f"field has {field.size} values for {nodes.size} nodes")
    widths = np.diff(nodes)
    if np.any(widths <= 0.0):
        raise GridError("collapsed cell while evaluating the monitor")
    if spec.kind == "gradient":
        return 1.0 + spec.alpha * np.abs(np.diff(field)) / widths
    if spec.kind == "amplitude":
        return 1.0 + spec.alpha * np.abs(0.5 * (field[:-1] + field[1:]))
    return (1.0 + spec.alpha0 * np.abs(0.5 * (field[:-1] + field[1:]))
            + spec.alpha1 * np.abs(np.diff(field)) / widths)


def evaluate_monitor(field: np.ndarray, grid: PhysicalGrid,
                     spec: MonitorSpec) -> np.ndarray:
    """Per-cell monitor w_{j+1/2} >= 1 for a node field on a grid."""
    return monitor_cells(field, grid.nodes, spec)


def smooth_monitor(w: np.ndarray, sigma: float) -> np.ndarray:
    """Implicit smoothing of the cell monitor, first and last cell pinned.

    Solves (1+sigma)*ws_j - (sigma/2)*(ws_{j-1} + ws_{j+1}) = w_j on the
    interior cells; sigma = 0 returns the input unchanged.
    """
    w = np.asarray(w, dtype=np.float64)
    m = w.size
    if sigma == 0.0 or m < 3:
        return w.copy()
    inner = m - 2
    diag = np.full(inner, 1.0 + sigma)
    off = np.full(inner - 1, -0.5 * sigma)
    rhs = w[1:-1].copy()
    rhs[0] += 0.5 * sigma * w[0]
    rhs[-1] += 0.5 * sigma * w[-1]
    smoothed = np.empty(m)
    smoothed[0] = w[0]
    smoothed[-1] = w[-1]
    smoothed[1:-1] = solve_tridiagonal(off, diag, off, rhs)
    return smoothed


def _grid_solve(w: np.ndarray, x_old: np.ndarray | None, length: float,
                coeff: float) -> np.ndarray:
    """Solve the interior tridiagonal problem of (w x_q)_q = coeff*(x - x_old).

    coeff = 0 gives the elliptic (initial-grid) problem; coeff > 0 is
    beta*h^2/tau of the parabolic step with x_old the current layer.
    """
    n = w.size
    diag = w[:-1] + w[1:] + coeff
    lower = -w[1:-1]
    upper = -w[1:-1]
    if coeff == 0.0:
        rhs = np.zeros(n - 1)
    else:
        rhs = coeff * x_old[1:-1]
    rhs[-1] += w[-1] * length
    interior = solve_tridiagonal(lower, diag, upper, rhs)
    nodes = np.empty(n + 1)
    nodes[0] = 0.0
    nodes[-1] = length
    nodes[1:-1] = interior
    return nodes


#: Iterations without a new best residual before the initial-grid
#: iteration is declared stagnant and the settled grid accepted.
STAGNATION_WINDOW = 40


def equidistribute_grid(cell_monitor: Callable[[np.ndarray], np.ndarray],
                        n_cells: int, length: float,
                        params: GridMotionParams) -> PhysicalGrid:
    """Fixed-point iteration for the equidistributed initial grid.

    cell_monitor maps a node array to per-cell monitor values (already
    smoothed if smoothing is wanted); iteration starts from the uniform
    grid and stops when the largest node displacement falls below
    init_tol * length.

    The plain Picard map overshoots for sharp monitors, so steps are
    relaxed adaptively (halve the factor when the residual grows,
    recover on success).  Data with an unresolvable monitor spike (a
    discontinuity under a gradient monitor) admits no discrete fixed
    point at all: the straddling cell carries more monitor mass than
    the equidistributed share no matter how small it gets, and the
    iteration cycles.  In that case the settled relaxed grid, whose
    cluster sits on the spike, is returned once the residual stops
    improving.
    """
    x = np.linspace(0.0, length, n_cells + 1)
    omega = 1.0
    prev_resid = np.inf
    best_resid = np.inf
    stall = 0
    for _ in range(params.init_max_iter):
        w = np.asarray(cell_monitor(x), dtype=np.float64)
        if w.size != n_cells:
            raise ValueError(f"monitor returned {w.size} cells for {n_cells}")
        x_new = _grid_solve(w, None, length, 0.0)
        if np.any(np.diff(x_new) <= 0.0):
            raise GridError("node crossing during initial grid iteration")
        resid = float(np.max(np.abs(x_new - x)))
        if resid <= params.init_tol * length:
            return PhysicalGrid(x_new, length)
        if resid < best_resid:
            best_resid = resid
            stall = 0
        else:
            stall += 1
            if stall >= STAGNATION_WINDOW:
                return PhysicalGrid(x, length)
        omega = max(0.5 * omega, 1.0 / 64.0) if resid > prev_resid \
            else min(1.25 * omega, 1.0)
        prev_resid = resid
        x = x + omega * (x_new - x)
    raise IterationError(
        f"initial grid did not settle in {params.init_max_iter} iterations "
        f"(best residual {best_resid:.3e})"
    )


def build_initial_grid(ic: Callable[[np.ndarray], np.ndarray],
                       spec: MonitorSpec, params: GridMotionParams,
                       n_cells: int, length: float) -> PhysicalGrid:
    """Equidistributed grid adapted to an initial condition."""

    def cell_monitor(nodes: np.ndarray) -> np.ndarray:
        field = np.asarray(ic(nodes), dtype=np.float64)
        w = monitor_cells(field, nodes, spec)
        return smooth_monitor(w, params.sigma)

    return equidistribute_grid(cell_monitor, n_cells, length, params)


def advance_grid(grid_n: PhysicalGrid, w_smoothed: np.ndarray, beta: float,
                 tau: float) -> PhysicalGrid:
    """One implicit parabolic relaxation step of the grid.

    The monitor is frozen on the current layer, so the step is one
    linear tridiagonal solve; ends stay pinned.
    """
    if tau <= 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    if beta <= 0.0:
        raise ValueError(f"beta must be positive for evolution, got {beta}")
    w = np.asarray(w_smoothed, dtype=np.float64)
    n = grid_n.n_cells
    if w.size != n:
        raise ValueError(f"monitor has {w.size} cells for a {n}-cell grid")
    h = 1.0 / n
    coeff = beta * h * h / tau
    nodes = _grid_solve(w, grid_n.nodes, grid_n.length, coeff)
    if np.any(np.diff(nodes) <= 0.0):
        raise GridError("node crossing after grid evolution step")
    return PhysicalGrid(nodes, grid_n.length)


def equidistribution_residual(grid: PhysicalGrid, w: np.ndarray) -> float:
    """Relative departure of w * dx / h from its equidistributed constant."""
    w = np.asarray(w, dtype=np.float64)
    widths = grid.cell_widths
    if w.size != widths.size:
        raise ValueError(f"{w.size} monitor cells for {widths.size} grid cells")
    c_h = float(np.sum(widths * w))
    h = 1.0 / grid.n_cells
    return float(np.max(np.abs(w * widths / h - c_h)) / c_h)
