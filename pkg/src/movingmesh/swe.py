"""Predictor-corrector scheme for the 1D nonlinear shallow water equations.

State per node: total depth H > 0 and depth-averaged velocity u; the
conservative pair is (H, Hu).  The cell Jacobian of the flux uses the
product form -u_l*u_r + g*Hbar, which keeps the discrete compatibility
f_q = A v_q exact and, together with the four-point source sampling of
the corrector, makes the lake-at-rest state an exact fixed point of the
scheme on any static grid (well-balancedness).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .errors import CFLViolationError, DryStateError, MovingMeshError
from .geometry import (GridMetrics, PhysicalGrid, compute_metrics,
                       metrics_from_nodes, node_jacobians)
from .linear import THETA_CAP, theta_first_order


@dataclass(frozen=True)
class SWEState:
    """Total depth and velocity per node."""

    depth: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        depth = np.ascontiguousarray(self.depth, dtype=np.float64)
        velocity = np.ascontiguousarray(self.velocity, dtype=np.float64)
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "velocity", velocity)
        if depth.shape != velocity.shape:
            raise MovingMeshError("depth and velocity must share a shape")

    @property
    def discharge(self) -> np.ndarray:
        return self.depth * self.velocity

    def elevation(self, bed: np.ndarray) -> np.ndarray:
        """Free-surface elevation over the still-water level."""
        return self.depth - bed


@dataclass(frozen=True)
class Bathymetry:
    """Still-water depth h(x) > 0, resampled after every grid move."""

    depth_at: Callable[[np.ndarray], np.ndarray]

    def sample(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.depth_at(np.asarray(x, dtype=np.float64)),
                          dtype=np.float64)

    @classmethod
    def flat(cls, h0: float) -> "Bathymetry":
        return cls(lambda x: np.full_like(np.asarray(x, dtype=np.float64), h0))


@dataclass(frozen=True)
class WallBoundary:
    """Reflective solid walls at both ends (closed channel)."""


@dataclass(frozen=True)
class FarFieldBoundary:
    """End nodes held at known far-field states (H, u)."""

    left: tuple[float, float]
    right: tuple[float, float]


@dataclass(frozen=True)
class EigenStructure:
    """Eigen-decomposition A = R diag(lambda1, lambda2) L of one cell."""

    c: float
    lambda1: float
    lambda2: float
    jacobian: np.ndarray
    left: np.ndarray
    right: np.ndarray


def eigen_structure(u_left: float, u_right: float, h_half: float,
                    grav: float, h_min: float = 0.0) -> EigenStructure:
    """Cell Jacobian eigenstructure from the two node velocities and mean depth."""
    if h_half <= h_min or h_half <= 0.0:
        raise DryStateError(f"cell mean depth {h_half} at or below minimum {h_min}")
    vbar = 0.5 * (u_left + u_right)
    c2 = vbar * vbar - u_left * u_right + grav * h_half
    c = float(np.sqrt(c2))
    lam1 = vbar - c
    lam2 = vbar + c
    jac = np.array([[0.0, 1.0],
                    [-u_left * u_right + grav * h_half, 2.0 * vbar]])
    left = np.array([[-lam2, 1.0],
                     [-lam1, 1.0]]) / c2
    right = 0.5 * c * np.array([[-1.0, 1.0],
                                [-lam1, lam2]])
    return EigenStructure(c=c, lambda1=lam1, lambda2=lam2,
                          jacobian=jac, left=left, right=right)


def cell_wave_speeds(H: np.ndarray, u: np.ndarray, grav: float):
    """Per-cell gravity-wave speed and characteristic speeds (c, lam1, lam2)."""
    hbar = 0.5 * (H[:-1] + H[1:])
    vbar = 0.5 * (u[:-1] + u[1:])
    c2 = vbar * vbar - u[:-1] * u[1:] + grav * hbar
    c = np.sqrt(c2)
    return c, vbar - c, vbar + c


def _indicators(H, u, eta, metrics: GridMetrics, tau, grav):
    """Characteristic indicators, directions and CFL numbers per family."""
    c, lam1, lam2 = cell_wave_speeds(H, u, grav)
    lb1 = lam1 - metrics.xt_half
    lb2 = lam2 - metrics.xt_half
    h = metrics.h
    cfl1 = (tau / h) * np.abs(lb1) / metrics.j_half
    cfl2 = (tau / h) * np.abs(lb2) / metrics.j_half
    eta_q = np.diff(eta) / h
    u_q = np.diff(u) / h
    hbar = 0.5 * (H[:-1] + H[1:])
    c2 = c * c
    p1 = (-c * eta_q + hbar * u_q) / c2
    p2 = (c * eta_q + hbar * u_q) / c2
    g1 = np.abs(lb1) * (1.0 - cfl1) * p1
    g2 = np.abs(lb2) * (1.0 - cfl2) * p2
    return (g1, g2), (np.sign(lb1).astype(np.int64), np.sign(lb2).astype(np.int64)), \
        (cfl1, cfl2), (lb1, lb2)


def check_swe_cfl(cfl1: np.ndarray, cfl2: np.ndarray) -> float:
    """Raise naming (family, cell) when a local CFL number exceeds one."""
    for k, cfl in ((1, cfl1), (2, cfl2)):
        worst = int(np.argmax(cfl))
        if cfl[worst] > 1.0 + 1.0e-12:
            raise CFLViolationError(
                f"local CFL {cfl[worst]:.6f} > 1 for family {k} in cell {worst}"
            )
    return float(max(np.max(cfl1), np.max(cfl2)))


def select_theta_swe(state: SWEState, bed: np.ndarray, metrics: GridMetrics,
                     tau: float, grav: float, kind: str = "adaptive"):
    """Per-family theta fields via the three-case rule on the characteristic
    indicators (kind='adaptive') or the first-order value (kind='upwind')."""
    H, u = state.depth, state.velocity
    eta = H - bed
    (g1, g2), (s1, s2), (cfl1, cfl2), _ = _indicators(H, u, eta, metrics, tau, grav)
    check_swe_cfl(cfl1, cfl2)
    th0_1 = theta_first_order(cfl1, THETA_CAP)
    th0_2 = theta_first_order(cfl2, THETA_CAP)
    if kind == "upwind":
        return th0_1, th0_2
    if kind != "adaptive":
        raise MovingMeshError(f"unknown theta kind {kind!r}")
    return (kernels.adaptive_theta(g1, s1, th0_1),
            kernels.adaptive_theta(g2, s2, th0_2))


def predictor_flux(state: SWEState, metrics: GridMetrics, bed: np.ndarray,
                   th1: np.ndarray, th2: np.ndarray, tau: float, grav: float):
    """Modified cell-centre fluxes (fhat1, fhat2) of the predictor stage."""
    return kernels.swe_fluxes(state.depth, state.discharge, bed,
                              metrics.xt_half, metrics.j_half,
                              th1, th2, tau, metrics.h, grav)


def corrector_step(state: SWEState, fhat1: np.ndarray, fhat2: np.ndarray,
                   metrics: GridMetrics, j_node_new: np.ndarray,
                   bed_n: np.ndarray, bed_np1: np.ndarray, tau: float,
                   grav: float, new_boundary, h_min: float = 0.0):
    """Two-pass conservative update: depth first, then discharge.

    new_boundary = ((H, q) left, (H, q) right) supplies the next layer's
    end-node values, which the source stencil of the first and last
    interior nodes reads.  Returns (H_new, q_new, (flux1, flux2)).
    """
    H, q = state.depth, state.discharge
    hbar = 0.5 * (H[:-1] + H[1:])
    qbar = 0.5 * (q[:-1] + q[1:])
    flux1 = fhat1 - metrics.xt_half * hbar
    flux2 = fhat2 - metrics.xt_half * qbar
    h_new = kernels.swe_mass_update(H, flux1, metrics.j_node, j_node_new,
                                    tau, metrics.h)
    (h_l, q_l), (h_r, q_r) = new_boundary
    h_new[0] = h_l
    h_new[-1] = h_r
    low = int(np.argmin(h_new))
    if h_new[low] <= max(h_min, 0.0):
        raise DryStateError(
            f"depth {h_new[low]:.3e} at node {low} fell to or below "
            f"the minimum {h_min:.3e}"
        )
    q_new = kernels.swe_momentum_update(q, H, h_new, flux2, bed_n, bed_np1,
                                        metrics.j_node, j_node_new, tau,
                                        metrics.h, grav)
    q_new[0] = q_l
    q_new[-1] = q_r
    return h_new, q_new, (flux1, flux2)


def _mirror_extend(x, odd=False):
    """Two-ghost reflection of a node array about both end values."""
    if odd:
        head = [-x[2], -x[1]]
        tail = [-x[-2], -x[-3]]
    else:
        head = [x[2], x[1]]
        tail = [x[-2], x[-3]]
    return np.concatenate([head, x, tail])


def _mirror_extend_coords(x, length):
    head = [-x[2], -x[1]]
    tail = [2.0 * length - x[-2], 2.0 * length - x[-3]]
    return np.concatenate([head, x, tail])


def step_swe_moving(state: SWEState, grid_n: PhysicalGrid,
                    grid_np1: PhysicalGrid, tau: float,
                    bathymetry: Bathymetry, grav: float,
                    boundary, strategy: str = "adaptive",
                    h_min: float = 0.0):
    """One full scheme step on a moving grid.

    boundary is a WallBoundary (reflective ghost images, closed channel)
    or a FarFieldBoundary.  Returns (next state, (flux1, flux2)) with
    the flux arrays on the physical cells for conservation bookkeeping.
    """
    if np.min(state.depth) <= max(h_min, 0.0):
        raise DryStateError("dry or sub-minimum depth entering the step")
    bed_n = bathymetry.sample(grid_n.nodes)
    bed_np1 = bathymetry.sample(grid_np1.nodes)
    h = 1.0 / grid_n.n_cells

    if isinstance(boundary, WallBoundary):
        length = grid_n.length
        x_n = _mirror_extend_coords(grid_n.nodes, length)
        x_np1 = _mirror_extend_coords(grid_np1.nodes, length)
        H = _mirror_extend(state.depth)
        q = _mirror_extend(state.discharge, odd=True)
        bed_lo = _mirror_extend(bed_n)
        bed_hi = _mirror_extend(bed_np1)
        metrics = metrics_from_nodes(x_n, x_np1, tau, h)
        eta = H - bed_lo
        (g1, g2), (s1, s2), (cfl1, cfl2), _ = _indicators(
            H, q / H, eta, metrics, tau, grav)
        check_swe_cfl(cfl1[1:-1], cfl2[1:-1])
        th0_1 = theta_first_order(cfl1, THETA_CAP)
        th0_2 = theta_first_order(cfl2, THETA_CAP)
        if strategy == "adaptive":
            th1 = kernels.adaptive_theta(g1, s1, th0_1)
            th2 = kernels.adaptive_theta(g2, s2, th0_2)
        else:
            th1, th2 = th0_1, th0_2
        fhat1, fhat2 = kernels.swe_fluxes(H, q, bed_lo, metrics.xt_half,
                                          metrics.j_half, th1, th2, tau,
                                          h, grav)
        hbar = 0.5 * (H[:-1] + H[1:])
        qbar = 0.5 * (q[:-1] + q[1:])
        flux1 = fhat1 - metrics.xt_half * hbar
        flux2 = fhat2 - metrics.xt_half * qbar
        j_node_new = node_jacobians(x_np1, h)
        h_new = kernels.swe_mass_update(H, flux1, metrics.j_node,
                                        j_node_new, tau, h)
        # re-mirror the inner ghosts so the source stencil of the wall
        # nodes sees the reflected next-layer depths
        h_new[1] = h_new[3]
        h_new[-2] = h_new[-4]
        low = int(np.argmin(h_new[2:-2]))
        if h_new[2 + low] <= max(h_min, 0.0):
            raise DryStateError(
                f"depth {h_new[2 + low]:.3e} at node {low} fell to or "
                f"below the minimum {h_min:.3e}"
            )
        q_new = kernels.swe_momentum_update(q, H, h_new, flux2, bed_lo,
                                            bed_hi, metrics.j_node,
                                            j_node_new, tau, h, grav)
        h_out = h_new[2:-2]
        q_out = q_new[2:-2]
        return SWEState(h_out, q_out / h_out), (flux1[2:-2], flux2[2:-2])

    if not isinstance(boundary, FarFieldBoundary):
        raise MovingMeshError(f"unsupported boundary {boundary!r}")
    metrics = compute_metrics(grid_n, grid_np1, tau)
    th1, th2 = select_theta_swe(state, bed_n, metrics, tau, grav,
                                kind=strategy)
    fhat1, fhat2 = predictor_flux(state, metrics, bed_n, th1, th2, tau, grav)
    j_node_new = node_jacobians(grid_np1.nodes, h)
    (h_l, u_l) = boundary.left
    (h_r, u_r) = boundary.right
    h_new, q_new, fluxes = corrector_step(
        state, fhat1, fhat2, metrics, j_node_new, bed_n, bed_np1, tau,
        grav, new_boundary=((h_l, h_l * u_l), (h_r, h_r * u_r)),
        h_min=h_min)
    return SWEState(h_new, q_new / h_new), fluxes


def _split_matrices(H, u, xt_half, grav):
    """Stacked 2x2 upwind splitting matrices per cell.

    Returns (A_plus, A_minus, RSLG_vec factors): A_pm = R Lambda_pm L
    built from the relative speeds; sgn holds sign(lambda_k - xt).
    """
    c, lam1, lam2 = cell_wave_speeds(H, u, grav)
    lb1 = lam1 - xt_half
    lb2 = lam2 - xt_half
    m = c.size
    left = np.empty((m, 2, 2))
    right = np.empty((m, 2, 2))
    c2 = c * c
    left[:, 0, 0] = -lam2 / c2
    left[:, 0, 1] = 1.0 / c2
    left[:, 1, 0] = -lam1 / c2
    left[:, 1, 1] = 1.0 / c2
    right[:, 0, 0] = -0.5 * c
    right[:, 0, 1] = 0.5 * c
    right[:, 1, 0] = -0.5 * c * lam1
    right[:, 1, 1] = 0.5 * c * lam2
    lp = np.stack([0.5 * (lb1 + np.abs(lb1)), 0.5 * (lb2 + np.abs(lb2))], axis=1)
    lm = np.stack([0.5 * (lb1 - np.abs(lb1)), 0.5 * (lb2 - np.abs(lb2))], axis=1)
    sgn = np.stack([np.sign(lb1), np.sign(lb2)], axis=1)
    a_plus = np.einsum("mij,mj,mjk->mik", right, lp, left)
    a_minus = np.einsum("mij,mj,mjk->mik", right, lm, left)
    return a_plus, a_minus, right, left, sgn


def flux_form_equivalence_check(state: SWEState, grid_n: PhysicalGrid,
                                grid_np1: PhysicalGrid, tau: float,
                                bathymetry: Bathymetry, grav: float) -> float:
    """Max relative discrepancy between three forms of the theta0 scheme.

    With theta forced to its first-order value the update can be written
    (a) as the standard predictor-corrector pair, (b) in conservative
    flux form with the split matrices, and (c) in the non-conservative
    form obtained through the discrete geometric conservation law.  All
    three are evaluated for one step and compared on interior nodes.
    Requires every relative characteristic speed to be nonzero.
    """
    metrics = compute_metrics(grid_n, grid_np1, tau)
    bed_n = bathymetry.sample(grid_n.nodes)
    bed_np1 = bathymetry.sample(grid_np1.nodes)
    H, q = state.depth, state.discharge
    u = state.velocity
    h = metrics.h
    eta = H - bed_n
    (_, _), (_, _), (cfl1, cfl2), (lb1, lb2) = _indicators(
        H, u, eta, metrics, tau, grav)
    check_swe_cfl(cfl1, cfl2)
    if min(np.min(np.abs(lb1)), np.min(np.abs(lb2))) == 0.0:
        raise MovingMeshError("degenerate cell: a relative speed vanishes")

    j_node_new = node_jacobians(grid_np1.nodes, h)
    ends = ((H[0], q[0]), (H[-1], q[-1]))

    # (a) predictor-corrector with theta = 1/C - 1
    th1 = 1.0 / cfl1 - 1.0
    th2 = 1.0 / cfl2 - 1.0
    fhat1, fhat2 = predictor_flux(state, metrics, bed_n, th1, th2, tau, grav)
    ha, qa, _ = corrector_step(state, fhat1, fhat2, metrics, j_node_new,
                               bed_n, bed_np1, tau, grav, ends)

    # shared pieces of forms (b) and (c)
    a_plus, a_minus, right, left, sgn = _split_matrices(
        H, u, metrics.xt_half, grav)
    hbar = 0.5 * (H[:-1] + H[1:])
    g_vec = np.zeros((hbar.size, 2))
    g_vec[:, 1] = grav * hbar * np.diff(bed_n) / h
    rslg = np.einsum("mij,mj,mjk,mk->mi", right, sgn, left, g_vec)
    dv = np.stack([np.diff(H), np.diff(q)], axis=1)
    vbar_vec = np.stack([hbar, 0.5 * (q[:-1] + q[1:])], axis=1)
    f_vec = np.stack([q, q * u + 0.5 * grav * H * H], axis=1)

    def corrector_from_fluxes(phi):
        mass = phi[:, 0]
        mom = phi[:, 1]
        h_new = H.copy()
        h_new[1:-1] = (metrics.j_node[1:-1] * H[1:-1]
                       - (tau / h) * (mass[1:] - mass[:-1])) / j_node_new[1:-1]
        hmid = ((h_new[2:] + H[2:]) + (h_new[:-2] + H[:-2])) * 0.25
        hqmid = ((bed_np1[2:] - bed_np1[:-2])
                 + (bed_n[2:] - bed_n[:-2])) * (0.25 / h)
        gstar = grav * hmid * hqmid
        q_new = q.copy()
        q_new[1:-1] = (metrics.j_node[1:-1] * q[1:-1]
                       - (tau / h) * (mom[1:] - mom[:-1])
                       + tau * gstar) / j_node_new[1:-1]
        return h_new, q_new

    # (b) conservative flux form
    phi = (0.5 * (f_vec[:-1] + f_vec[1:])
           - 0.5 * np.einsum("mij,mj->mi", a_plus - a_minus, dv)
           - metrics.xt_half[:, None] * vbar_vec
           + 0.5 * h * rslg)
    hb, qb = corrector_from_fluxes(phi)

    # (c) non-conservative form via the discrete GCL
    v_q = dv / h
    up = np.einsum("mij,mj->mi", a_plus, v_q)
    um = np.einsum("mij,mj->mi", a_minus, v_q)
    hc = H.copy()
    hc[1:-1] = H[1:-1] - (tau / j_node_new[1:-1]) * (up[:-1, 0] + um[1:, 0]) \
        + (tau / j_node_new[1:-1]) * (-(0.5) * (rslg[1:, 0] - rslg[:-1, 0]))
    hmid = ((hc[2:] + H[2:]) + (hc[:-2] + H[:-2])) * 0.25
    hqmid = ((bed_np1[2:] - bed_np1[:-2]) + (bed_n[2:] - bed_n[:-2])) * (0.25 / h)
    gstar = grav * hmid * hqmid
    qc = q.copy()
    qc[1:-1] = q[1:-1] - (tau / j_node_new[1:-1]) * (up[:-1, 1] + um[1:, 1]) \
        + (tau / j_node_new[1:-1]) * (gstar - 0.5 * (rslg[1:, 1] - rslg[:-1, 1]))

    scale = max(float(np.max(np.abs(H))), float(np.max(np.abs(q))), 1.0)
    disc = 0.0
    for other_h, other_q in ((hb, qb), (hc, qc)):
        disc = max(disc,
                   float(np.max(np.abs(other_h[1:-1] - ha[1:-1]))),
                   float(np.max(np.abs(other_q[1:-1] - qa[1:-1]))))
    return disc / scale
