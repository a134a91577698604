"""Pure-NumPy implementations of the hot per-step kernels.

Fallback twins of ``_kernels_numba``: same signatures, same semantics.
Elementwise work is vectorized; the tridiagonal elimination is a plain
Python loop because the recurrence is sequential.
"""

import numpy as np


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


def adaptive_theta(g, s, theta0):
    """Three-case TVD selection of the scheme parameter per cell."""
    m = g.shape[0]
    nb = np.arange(m) - s
    out_of_range = (nb < 0) | (nb >= m)
    gn = g[np.clip(nb, 0, m - 1)]
    gi = g

    second_order = np.zeros(m)
    limited = np.where(gi != 0.0, theta0 * (1.0 - gn / np.where(gi == 0.0, 1.0, gi)), 0.0)
    diffusive = theta0

    theta = np.where(
        gi == 0.0,
        np.where(gn == 0.0, 0.0, diffusive),
        np.where(
            gi * gn < 0.0,
            diffusive,
            np.where(np.abs(gi) <= np.abs(gn), second_order, limited),
        ),
    )
    # a missing neighbour selects the diffusive case, unless the cell
    # carries no indicator at all
    theta = np.where(out_of_range, np.where(gi == 0.0, 0.0, diffusive), theta)
    theta = np.where(s == 0, 0.0, theta)
    return theta


def advect_update(v, f, abar, j_half, xt_half, j_node_old, j_node_new,
                  theta, tau, h):
    """One predictor-corrector step for a scalar law on a moving grid."""
    vq = (v[1:] - v[:-1]) / h
    fhat = 0.5 * (f[:-1] + f[1:]) \
        - 0.5 * tau * (1.0 + theta) * abar * abar / j_half * vq
    flux = fhat - xt_half * 0.5 * (v[:-1] + v[1:])
    v_new = v.copy()
    v_new[1:-1] = (j_node_old[1:-1] * v[1:-1]
                   - (tau / h) * (flux[1:] - flux[:-1])) / j_node_new[1:-1]
    return v_new, flux


def swe_fluxes(H, q, bed, xt_half, j_half, th1, th2, tau, dq, grav):
    """Predictor fluxes of the shallow-water scheme, one pair per cell."""
    hl = H[:-1]
    hr = H[1:]
    ul = q[:-1] / hl
    ur = q[1:] / hr
    hbar = 0.5 * (hl + hr)
    vbar = 0.5 * (ul + ur)
    ghbar = grav * hbar
    c2 = vbar * vbar - ul * ur + ghbar
    c = np.sqrt(c2)
    lam1 = vbar - c
    lam2 = vbar + c
    xt = xt_half
    lb1 = lam1 - xt
    lb2 = lam2 - xt
    vq1 = (hr - hl) / dq
    vq2 = (q[1:] - q[:-1]) / dq
    prod = ul * ur - ghbar
    # same association as ghbar*vq1 so the two cancel exactly at rest
    gsrc = ghbar * ((bed[1:] - bed[:-1]) / dq)
    row1 = -prod * vq1 + lam1 * vq2 + xt * (lam2 * vq1 - vq2) - gsrc
    row2 = -prod * vq1 + lam2 * vq2 + xt * (lam1 * vq1 - vq2) - gsrc
    w1 = (1.0 + th1) * lb1 * row1 / c2
    w2 = (1.0 + th2) * lb2 * row2 / c2
    corr1 = 0.5 * c * (w2 - w1)
    corr2 = 0.5 * c * (lam2 * w2 - lam1 * w1)
    f1 = q
    f2 = q * (q / H) + 0.5 * grav * H * H
    fhat1 = 0.5 * (f1[:-1] + f1[1:]) - 0.5 * tau * corr1 / j_half
    fhat2 = 0.5 * (f2[:-1] + f2[1:]) - 0.5 * tau * corr2 / j_half
    return fhat1, fhat2


def swe_mass_update(H, flux1, j_node_old, j_node_new, tau, dq):
    """Conservative depth update at interior nodes (ends copied)."""
    h_new = H.copy()
    h_new[1:-1] = (j_node_old[1:-1] * H[1:-1]
                   - (tau / dq) * (flux1[1:] - flux1[:-1])) / j_node_new[1:-1]
    return h_new


def swe_momentum_update(q, H_old, H_new, flux2, bed_old, bed_new,
                        j_node_old, j_node_new, tau, dq, grav):
    """Conservative discharge update with the balanced source sampling."""
    hmid = ((H_new[2:] + H_old[2:]) + (H_new[:-2] + H_old[:-2])) * 0.25
    hqmid = ((bed_new[2:] - bed_new[:-2])
             + (bed_old[2:] - bed_old[:-2])) * (0.25 / dq)
    gstar = grav * hmid * hqmid
    q_new = q.copy()
    q_new[1:-1] = (j_node_old[1:-1] * q[1:-1]
                   - (tau / dq) * (flux2[1:] - flux2[:-1])
                   + tau * gstar) / j_node_new[1:-1]
    return q_new
