"""Predictor-corrector scheme for nonlinear scalar conservation laws.

Generalizes the moving-grid advection scheme: the per-cell wave speed
comes from the divided difference of the flux (exact discrete
compatibility f_q = a*v_q), and the predictor transports the flux
itself, which keeps the corrector conservative.  Burgers f = u^2/2 is
the canonical instance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .errors import MovingMeshError
from .geometry import PhysicalGrid, compute_metrics, node_jacobians
from .linear import (ThetaStrategy, check_stability, local_cfl,
                     relative_speed, select_theta)

#: Relative threshold below which two states count as equal.
EQUAL_STATE_RTOL = 1.0e-12


@dataclass(frozen=True)
class FluxFunction:
    """Flux f(u) together with its exact derivative a(u) = f'(u)."""

    f: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray]

    @classmethod
    def burgers(cls) -> "FluxFunction":
        return cls(f=lambda u: 0.5 * u * u, df=lambda u: u)

    @classmethod
    def linear(cls, speed: float) -> "FluxFunction":
        return cls(f=lambda u: speed * u,
                   df=lambda u: np.full_like(np.asarray(u, dtype=float), speed))


def harten_speed(flux: FluxFunction, v_left, v_right):
    """Divided-difference wave speed per cell, a(v_left) at equal states.

    Satisfies f(v_right) - f(v_left) = speed * (v_right - v_left)
    exactly whenever the states differ.
    """
    v_left = np.asarray(v_left, dtype=np.float64)
    v_right = np.asarray(v_right, dtype=np.float64)
    scale = np.maximum(np.maximum(np.abs(v_left), np.abs(v_right)), 1.0)
    dv = v_right - v_left
    degenerate = np.abs(dv) <= EQUAL_STATE_RTOL * scale
    safe_dv = np.where(degenerate, 1.0, dv)
    divided = (np.asarray(flux.f(v_right)) - np.asarray(flux.f(v_left))) / safe_dv
    return np.where(degenerate, np.asarray(flux.df(v_left)), divided)


def step_scalar_moving(v: np.ndarray, grid_n: PhysicalGrid,
                       grid_np1: PhysicalGrid, tau: float,
                       flux: FluxFunction, strategy: ThetaStrategy,
                       bc_left: float, bc_right: float):
    """One conservative step of the generalized scheme on a moving grid.

    Returns (v at the next layer, per-cell corrector fluxes); boundary
    nodes are held at the far-field states.
    """
    metrics = compute_metrics(grid_n, grid_np1, tau)
    speeds = harten_speed(flux, v[:-1], v[1:])
    theta = select_theta(v, metrics, speeds, tau, strategy)
    cfl_cells, _ = local_cfl(metrics, speeds, tau)
    check_stability(theta, cfl_cells)
    abar = relative_speed(speeds, metrics.xt_half)
    f = np.asarray(flux.f(v), dtype=np.float64)
    j_node_new = node_jacobians(grid_np1.nodes, metrics.h)
    v_new, cell_flux = kernels.advect_update(
        v, f, abar, metrics.j_half, metrics.xt_half,
        metrics.j_node, j_node_new, theta, tau, metrics.h)
    v_new[0] = bc_left
    v_new[-1] = bc_right
    return v_new, cell_flux


def nonconservative_demo_step(u: np.ndarray, dx: float, tau: float) -> np.ndarray:
    """Defective upwind update with the nodal speed u_j (demonstration only).

    Unlike the averaged-speed variant, this update admits no flux form,
    so it mispredicts shock speeds; it exists to witness that failure
    in tests.  Uniform static grid, left value held.
    """
    if not isinstance(u, np.ndarray):
        raise MovingMeshError("expected a node array")
    u_new = u.copy()
    u_new[1:] = u[1:] - (tau / dx) * u[1:] * (u[1:] - u[:-1])
    return u_new
