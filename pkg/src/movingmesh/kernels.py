"""Dispatch to the active kernel backend.

The active module is chosen once at import from ``backend.BACKEND``;
tests and benchmarks may rebind ``_active`` to compare backends.
"""

from . import backend

if backend.BACKEND == "numba":
    from . import _kernels_numba as _active
else:
    from . import _kernels_numpy as _active


def thomas_solve(lower, diag, upper, rhs):
    return _active.thomas_solve(lower, diag, upper, rhs)


def adaptive_theta(g, s, theta0):
    return _active.adaptive_theta(g, s, theta0)


def advect_update(v, f, abar, j_half, xt_half, j_node_old, j_node_new,
                  theta, tau, h):
    return _active.advect_update(v, f, abar, j_half, xt_half,
                                 j_node_old, j_node_new, theta, tau, h)


def swe_fluxes(H, q, bed, xt_half, j_half, th1, th2, tau, dq, grav):
    return _active.swe_fluxes(H, q, bed, xt_half, j_half, th1, th2,
                              tau, dq, grav)


def swe_mass_update(H, flux1, j_node_old, j_node_new, tau, dq):
    return _active.swe_mass_update(H, flux1, j_node_old, j_node_new, tau, dq)


def swe_momentum_update(q, H_old, H_new, flux2, bed_old, bed_new,
                        j_node_old, j_node_new, tau, dq, grav):
    return _active.swe_momentum_update(q, H_old, H_new, flux2, bed_old,
                                       bed_new, j_node_old, j_node_new,
                                       tau, dq, grav)
