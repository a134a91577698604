"""Numba implementations of the hot per-step kernels.

Every function here has a twin with the same signature and semantics in
``_kernels_numpy``.  Keep the arithmetic (order of operations included)
aligned between the two files so both backends agree to rounding.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def thomas_solve(lower, diag, upper, rhs):
    """Forward elimination / back substitution for a tridiagonal system.

    Returns (solution, bad_row); bad_row is -1 on success, otherwise
    the row index where a zero pivot stopped the elimination.
    """
    n = diag.shape[0]
    cp = np.zeros(n)
    dp = np.empty(n)
    x = np.empty(n)
    piv = diag[0]
    if piv == 0.0:
        return x, 0
    if n > 1:
        cp[0] = upper[0] / piv
    dp[0] = rhs[0] / piv
    for i in range(1, n):
        piv = diag[i] - lower[i - 1] * cp[i - 1]
        if piv == 0.0:
            return x, i
        if i < n - 1:
            cp[i] = upper[i] / piv
        dp[i] = (rhs[i] - lower[i - 1] * dp[i - 1]) / piv
    x[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x, -1


@njit(cache=True)
def adaptive_theta(g, s, theta0):
    """Three-case TVD selection of the scheme parameter per cell.

    g: upwind indicator per cell; s: upwind direction (-1, 0, +1);
    theta0: per-cell first-order value (already capped by the caller).
    A neighbour index falling outside the array selects the diffusive
    case, as does a vanishing indicator with a non-vanishing neighbour.
    """
    m = g.shape[0]
    theta = np.empty(m)
    for i in range(m):
        si = s[i]
        gi = g[i]
        if si == 0 or (gi == 0.0 and (i - si < 0 or i - si >= m)):
            theta[i] = 0.0
            continue
        nb = i - si
        if nb < 0 or nb >= m:
            theta[i] = theta0[i]
            continue
        gn = g[nb]
        if gi == 0.0:
            theta[i] = 0.0 if gn == 0.0 else theta0[i]
        elif gi * gn < 0.0:
            theta[i] = theta0[i]
        elif abs(gi) <= abs(gn):
            theta[i] = 0.0
        else:
            theta[i] = theta0[i] * (1.0 - gn / gi)
    return theta


@njit(cache=True)
def advect_update(v, f, abar, j_half, xt_half, j_node_old, j_node_new,
                  theta, tau, h):
    """One predictor-corrector step for a scalar law on a moving grid.

    v, f: node values of the solution and of its flux; abar: per-cell
    wave speed relative to the nodes.  Returns the updated node values
    (end nodes copied, boundary rule applied by the caller) and the
    per-cell corrector fluxes.
    """
    m = abar.shape[0]
    flux = np.empty(m)
    v_new = np.empty(m + 1)
    for i in range(m):
        vq = (v[i + 1] - v[i]) / h
        fhat = 0.5 * (f[i] + f[i + 1]) \
            - 0.5 * tau * (1.0 + theta[i]) * abar[i] * abar[i] / j_half[i] * vq
        flux[i] = fhat - xt_half[i] * 0.5 * (v[i] + v[i + 1])
    v_new[0] = v[0]
    v_new[m] = v[m]
    for j in range(1, m):
        v_new[j] = (j_node_old[j] * v[j]
                    - (tau / h) * (flux[j] - flux[j - 1])) / j_node_new[j]
    return v_new, flux


@njit(cache=True)
def swe_fluxes(H, q, bed, xt_half, j_half, th1, th2, tau, dq, grav):
    """Predictor fluxes of the shallow-water scheme, one pair per cell.

    The characteristic correction is expanded component-wise; the
    lambda1*lambda2 product is formed as u_l*u_r - g*Hbar so that the
    correction cancels identically on the lake-at-rest state.
    """
    m = xt_half.shape[0]
    fhat1 = np.empty(m)
    fhat2 = np.empty(m)
    for i in range(m):
        hl = H[i]
        hr = H[i + 1]
        ul = q[i] / hl
        ur = q[i + 1] / hr
        hbar = 0.5 * (hl + hr)
        vbar = 0.5 * (ul + ur)
        ghbar = grav * hbar
        c2 = vbar * vbar - ul * ur + ghbar
        c = np.sqrt(c2)
        lam1 = vbar - c
        lam2 = vbar + c
        xt = xt_half[i]
        lb1 = lam1 - xt
        lb2 = lam2 - xt
        vq1 = (hr - hl) / dq
        vq2 = (q[i + 1] - q[i]) / dq
        prod = ul * ur - ghbar
        # same association as ghbar*vq1 so the two cancel exactly at rest
        gsrc = ghbar * ((bed[i + 1] - bed[i]) / dq)
        row1 = -prod * vq1 + lam1 * vq2 + xt * (lam2 * vq1 - vq2) - gsrc
        row2 = -prod * vq1 + lam2 * vq2 + xt * (lam1 * vq1 - vq2) - gsrc
        w1 = (1.0 + th1[i]) * lb1 * row1 / c2
        w2 = (1.0 + th2[i]) * lb2 * row2 / c2
        corr1 = 0.5 * c * (w2 - w1)
        corr2 = 0.5 * c * (lam2 * w2 - lam1 * w1)
        f1l = q[i]
        f1r = q[i + 1]
        f2l = q[i] * ul + 0.5 * grav * hl * hl
        f2r = q[i + 1] * ur + 0.5 * grav * hr * hr
        fhat1[i] = 0.5 * (f1l + f1r) - 0.5 * tau * corr1 / j_half[i]
        fhat2[i] = 0.5 * (f2l + f2r) - 0.5 * tau * corr2 / j_half[i]
    return fhat1, fhat2


@njit(cache=True)
def swe_mass_update(H, flux1, j_node_old, j_node_new, tau, dq):
    """Conservative depth update at interior nodes (ends copied)."""
    m = flux1.shape[0]
    h_new = np.empty(m + 1)
    h_new[0] = H[0]
    h_new[m] = H[m]
    for j in range(1, m):
        h_new[j] = (j_node_old[j] * H[j]
                    - (tau / dq) * (flux1[j] - flux1[j - 1])) / j_node_new[j]
    return h_new


@njit(cache=True)
def swe_momentum_update(q, H_old, H_new, flux2, bed_old, bed_new,
                        j_node_old, j_node_new, tau, dq, grav):
    """Conservative discharge update with the balanced source sampling.

    H_new must already carry the boundary values of the next layer: the
    four-point source stencil of the first and last interior nodes
    reads them.
    """
    m = flux2.shape[0]
    q_new = np.empty(m + 1)
    q_new[0] = q[0]
    q_new[m] = q[m]
    for j in range(1, m):
        hmid = ((H_new[j + 1] + H_old[j + 1])
                + (H_new[j - 1] + H_old[j - 1])) * 0.25
        hqmid = ((bed_new[j + 1] - bed_new[j - 1])
                 + (bed_old[j + 1] - bed_old[j - 1])) * (0.25 / dq)
        gstar = grav * hmid * hqmid
        q_new[j] = (j_node_old[j] * q[j]
                    - (tau / dq) * (flux2[j] - flux2[j - 1])
                    + tau * gstar) / j_node_new[j]
    return q_new
