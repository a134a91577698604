"""Predictor-corrector scheme for linear advection on fixed and moving grids.

The two-stage update (cell-centred predictor at fractional time, then a
conservative node-centred corrector on J*v) collapses to a one-step
canonical form controlled by the per-cell parameter theta: theta = 0 is
Lax-Wendroff, 1/C - 1 first-order upwind, 1/C^2 - 1 Lax-Friedrichs.
The adaptive strategy switches between these per cell to keep the step
total-variation diminishing under the local CFL bound C <= 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import CFLViolationError, MovingMeshError
from .geometry import GridMetrics, PhysicalGrid, compute_metrics, node_jacobians

#: Cap on theta when the relative speed (hence the local CFL) vanishes.
THETA_CAP = 1.0e6

STRATEGY_KINDS = ("adaptive", "lax-wendroff", "upwind", "lax-friedrichs", "custom")


@dataclass(frozen=True)
class AdvectionProblem:
    """Constant-speed advection on [0, length] with far-field Dirichlet ends."""

    speed: float
    length: float
    ic: Callable[[np.ndarray], np.ndarray]
    bc_left: float
    bc_right: float

    def __post_init__(self):
        if self.length <= 0.0:
            raise MovingMeshError(f"length must be positive, got {self.length}")


@dataclass(frozen=True)
class ThetaStrategy:
    """Per-cell rule selecting the scheme parameter theta >= 0."""

    kind: str
    fn: Optional[Callable] = None

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise MovingMeshError(f"unknown theta strategy {self.kind!r}")
        if self.kind == "custom" and self.fn is None:
            raise MovingMeshError("custom strategy needs a callable")

    @classmethod
    def adaptive(cls) -> "ThetaStrategy":
        return cls("adaptive")

    @classmethod
    def lax_wendroff(cls) -> "ThetaStrategy":
        return cls("lax-wendroff")

    @classmethod
    def upwind(cls) -> "ThetaStrategy":
        return cls("upwind")

    @classmethod
    def lax_friedrichs(cls) -> "ThetaStrategy":
        return cls("lax-friedrichs")

    @classmethod
    def custom(cls, fn: Callable) -> "ThetaStrategy":
        return cls("custom", fn=fn)


def relative_speed(speed, xt_half: np.ndarray) -> np.ndarray:
    """Wave speed seen by the moving nodes, per cell."""
    return np.asarray(speed, dtype=np.float64) - xt_half


def local_cfl(metrics: GridMetrics, speed, tau: float | None = None):
    """Per-cell local CFL numbers (tau/h)*|abar|/J and their maximum."""
    if tau is None:
        tau = metrics.tau
    abar = relative_speed(speed, metrics.xt_half)
    cells = (tau / metrics.h) * np.abs(abar) / metrics.j_half
    return cells, float(np.max(cells)) if cells.size else 0.0


def choose_tau(grid: PhysicalGrid, speed, target_c: float,
               xt_half: np.ndarray | None = None,
               tau_max: float = np.inf) -> float:
    """Largest tau whose max local CFL equals target_c.

    Node velocities are not known before the grid moves, so the caller
    passes the previous step's cell velocities (zero on the first step).
    """
    if not 0.0 < target_c <= 1.0:
        raise MovingMeshError(f"target CFL must lie in (0, 1], got {target_c}")
    widths = grid.cell_widths
    abar = np.asarray(speed, dtype=np.float64)
    if xt_half is not None:
        abar = abar - xt_half
    rate = float(np.max(np.abs(abar) / widths))
    if rate <= 0.0:
        return tau_max
    return min(target_c / rate, tau_max)


def theta_first_order(cfl_cells: np.ndarray, cap: float = THETA_CAP) -> np.ndarray:
    """theta0 = 1/C - 1 per cell, capped where C vanishes."""
    with np.errstate(divide="ignore"):
        theta0 = np.where(cfl_cells > 0.0, 1.0 / cfl_cells - 1.0, cap)
    return np.minimum(theta0, cap)


def select_theta(v: np.ndarray, metrics: GridMetrics, speed, tau: float,
                 strategy: ThetaStrategy) -> np.ndarray:
    """Per-cell theta for the canonical scheme; speed may be scalar or per cell."""
    cfl_cells, _ = local_cfl(metrics, speed, tau)
    if strategy.kind == "lax-wendroff":
        return np.zeros(cfl_cells.size)
    if strategy.kind == "upwind":
        return theta_first_order(cfl_cells)
    if strategy.kind == "lax-friedrichs":
        with np.errstate(divide="ignore"):
            theta = np.where(cfl_cells > 0.0, 1.0 / cfl_cells**2 - 1.0, THETA_CAP)
        return np.minimum(theta, THETA_CAP)
    if strategy.kind == "custom":
        return np.asarray(strategy.fn(v, metrics, speed, tau), dtype=np.float64)
    abar = relative_speed(speed, metrics.xt_half)
    v_q = np.diff(v) / metrics.h
    indicator = np.abs(abar) * (1.0 - cfl_cells) * v_q
    sgn = np.sign(abar).astype(np.int64)
    theta0 = theta_first_order(cfl_cells)
    return kernels.adaptive_theta(indicator, sgn, theta0)


def check_stability(theta: np.ndarray, cfl_cells: np.ndarray) -> None:
    """Enforce sqrt(1+theta)*C <= 1 per cell; names the worst cell."""
    margin = np.sqrt(1.0 + theta) * cfl_cells
    worst = int(np.argmax(margin))
    if margin[worst] > 1.0 + 1.0e-12:
        raise CFLViolationError(
            f"stability bound exceeded in cell {worst}: "
            f"sqrt(1+theta)*C = {margin[worst]:.6f}"
        )


def step_moving(v: np.ndarray, grid_n: PhysicalGrid, grid_np1: PhysicalGrid,
                tau: float, problem: AdvectionProblem,
                strategy: ThetaStrategy):
    """One two-stage step on a moving grid.

    Returns (v at the next layer, per-cell corrector fluxes); boundary
    nodes take the problem's far-field values.
    """
    metrics = compute_metrics(grid_n, grid_np1, tau)
    theta = select_theta(v, metrics, problem.speed, tau, strategy)
    cfl_cells, _ = local_cfl(metrics, problem.speed, tau)
    check_stability(theta, cfl_cells)
    abar = relative_speed(problem.speed, metrics.xt_half)
    f = problem.speed * v
    j_node_new = node_jacobians(grid_np1.nodes, metrics.h)
    v_new, flux = kernels.advect_update(
        v, f, abar, metrics.j_half, metrics.xt_half,
        metrics.j_node, j_node_new, theta, tau, metrics.h)
    v_new[0] = problem.bc_left
    v_new[-1] = problem.bc_right
    return v_new, flux


def step_fixed_canonical(u: np.ndarray, dx: float, speed: float, tau: float,
                         theta: np.ndarray) -> np.ndarray:
    """One-step canonical form on a uniform fixed grid with a given theta field.

    Serves as the independent oracle for the two-stage implementation;
    end nodes are left untouched.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if theta.size != u.size - 1:
        raise ValueError(f"{theta.size} theta cells for {u.size} nodes")
    u_x = np.diff(u) / dx
    weighted = (1.0 + theta) * u_x
    u_new = u.copy()
    u_new[1:-1] = (u[1:-1]
                   - tau * speed * (u[2:] - u[:-2]) / (2.0 * dx)
                   + (tau * tau * speed * speed / (2.0 * dx))
                   * (weighted[1:] - weighted[:-1]))
    return u_new
