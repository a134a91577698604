"""Closed-form and implicit exact solutions plus the initial-condition library.

Covers translated profiles for linear advection, the pre/post-breaking
weak solution of the Burgers ramp, and the leftward simple wave of the
shallow water system (constant Riemann invariant s = u + 2c), whose
profile follows from a scalar implicit equation solved by safeguarded
bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from .errors import MovingMeshError

BISECTION_TOL = 1.0e-12
BISECTION_MAX_ITER = 200


# ---------------------------------------------------------------------------
# initial conditions
# ---------------------------------------------------------------------------

def step_ic(x_star: float, left: float = 1.0, right: float = 0.0):
    """Discontinuous profile: left value for x <= x_star, right beyond."""
    def ic(x):
        x = np.asarray(x, dtype=np.float64)
        return np.where(x <= x_star, left, right)
    return ic


def gaussian_ic(x0: float, width: float = 25.0):
    """Bell profile exp(-width*(x - x0)^2)."""
    def ic(x):
        x = np.asarray(x, dtype=np.float64)
        return np.exp(-width * (x - x0) ** 2)
    return ic


def ramp_ic(u_left: float, u_right: float, x_left: float, x_right: float):
    """Two constant states joined by a linear ramp on [x_left, x_right]."""
    def ic(x):
        x = np.asarray(x, dtype=np.float64)
        ramp = ((x - x_right) * u_left + (x_left - x) * u_right) \
            / (x_left - x_right)
        return np.where(x <= x_left, u_left,
                        np.where(x >= x_right, u_right, ramp))
    return ic


def smooth_step_ic(x_left: float, width: float):
    """Monotone half-cosine front from 1 to 0 over [x_left, x_left+width].

    Compactly supported transition with no exponential tails, so a
    gradient-ratio limiter stays second order on it; used by the
    convergence studies.
    """
    def ic(x):
        x = np.asarray(x, dtype=np.float64)
        s = np.clip((x - x_left) / width, 0.0, 1.0)
        return 0.5 * (1.0 + np.cos(np.pi * s))
    return ic


def cosine_pulse_ic(amplitude: float, x_crest: float, wavelength: float):
    """Compact cosine elevation pulse of given amplitude and wavelength."""
    def ic(x):
        x = np.asarray(x, dtype=np.float64)
        inside = np.abs(x - x_crest) <= 0.5 * wavelength
        shape = 0.5 * amplitude * (
            1.0 + np.cos(2.0 * np.pi * (x - x_crest) / wavelength))
        return np.where(inside, shape, 0.0)
    return ic


def solitary_wave_ic(amplitude: float, h0: float, grav: float,
                     x_crest: float):
    """Solitary-wave elevation/velocity pair over a flat bottom.

    Returns (eta(x), u(x)); the sech^2 profile and the velocity relation
    come from the analytic solitary wave of the Serre equations.
    """
    kappa = math.sqrt(3.0 * grav * amplitude) \
        / (2.0 * h0 * math.sqrt(grav * (h0 + amplitude)))
    celerity = math.sqrt(grav * (h0 + amplitude))

    def eta(x):
        x = np.asarray(x, dtype=np.float64)
        return amplitude / np.cosh(kappa * (x - x_crest)) ** 2

    def u(x):
        e = eta(x)
        return -celerity * e / (h0 + e)

    return eta, u


# ---------------------------------------------------------------------------
# linear advection
# ---------------------------------------------------------------------------

def advection_exact(ic: Callable, speed: float, x, t: float):
    """Translated initial profile ic(x - speed*t)."""
    return ic(np.asarray(x, dtype=np.float64) - speed * t)


# ---------------------------------------------------------------------------
# Burgers ramp
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BurgersRampProblem:
    """Compressive linear ramp between two constant states."""

    u_left: float
    u_right: float
    x_left: float
    x_right: float

    def __post_init__(self):
        if self.u_left <= self.u_right:
            raise MovingMeshError("ramp must be compressive: u_left > u_right")
        if self.x_right <= self.x_left:
            raise MovingMeshError("need x_left < x_right")

    @property
    def t_star(self) -> float:
        """Breaking time of the ramp."""
        return -(self.x_right - self.x_left) / (self.u_right - self.u_left)

    @property
    def x_star(self) -> float:
        """Breaking location."""
        return self.x_left + self.u_left * self.t_star

    @property
    def shock_speed(self) -> float:
        """Rankine-Hugoniot speed (u_left + u_right)/2 of the formed shock."""
        return 0.5 * (self.u_left + self.u_right)


def burgers_exact(problem: BurgersRampProblem, x, t: float):
    """Weak solution of the ramp problem: steepening ramp, then a shock."""
    if t < 0.0:
        raise MovingMeshError(f"t must be non-negative, got {t}")
    x = np.asarray(x, dtype=np.float64)
    p = problem
    if t < p.t_star:
        left_edge = p.x_left + p.u_left * t
        right_edge = p.x_right + p.u_right * t
        ramp = (x - p.x_star) / (t - p.t_star)
        return np.where(x <= left_edge, p.u_left,
                        np.where(x >= right_edge, p.u_right, ramp))
    front = p.x_star + p.shock_speed * (t - p.t_star)
    return np.where(x <= front, p.u_left, p.u_right)


# ---------------------------------------------------------------------------
# shallow-water simple wave
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RWaveProblem:
    """Leftward simple wave over a flat bottom of depth h0.

    eta0 evaluates the initial elevation; support, when given, is the
    interval carrying the disturbance and enables the breaking-time
    estimate and its pre-breaking guard.
    """

    eta0: Callable[[np.ndarray], np.ndarray]
    h0: float
    grav: float
    support: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if self.h0 <= 0.0 or self.grav <= 0.0:
            raise MovingMeshError("h0 and grav must be positive")

    @property
    def c0(self) -> float:
        return math.sqrt(self.grav * self.h0)

    @property
    def s0(self) -> float:
        """Constant Riemann invariant u + 2c of the wave."""
        return 2.0 * self.c0

    @cached_property
    def t_star(self) -> float:
        if self.support is None:
            raise MovingMeshError("breaking-time estimate needs a support interval")
        return rwave_catastrophe_time(self)


def rwave_p0(problem: RWaveProblem, x):
    """Initial value of the transported characteristic variable."""
    eta = np.asarray(problem.eta0(np.asarray(x, dtype=np.float64)))
    return 2.0 * problem.c0 - 3.0 * np.sqrt(problem.grav * (eta + problem.h0))


def rwave_u0(problem: RWaveProblem, x):
    """Initial velocity consistent with the constant invariant."""
    eta = np.asarray(problem.eta0(np.asarray(x, dtype=np.float64)))
    return 2.0 * problem.c0 - 2.0 * np.sqrt(problem.grav * (eta + problem.h0))


def _p_residual(problem: RWaveProblem, p: float, x: float, t: float) -> float:
    eta = float(problem.eta0(x - p * t))
    return p + 3.0 * math.sqrt(problem.grav * (eta + problem.h0)) - 2.0 * problem.c0


def rwave_solve(problem: RWaveProblem, x: float, t: float,
                tol: float = BISECTION_TOL, check_breaking: bool = True):
    """Solve the implicit characteristic equation at one point.

    Returns (p, eta, u).  Valid before the breaking time only; the
    residual function is monotone there, so safeguarded bisection on a
    widening bracket is enough.  check_breaking=False skips the guard
    and returns a branch of the (then multivalued) relation.
    """
    if t < 0.0:
        raise MovingMeshError(f"t must be non-negative, got {t}")
    if check_breaking and problem.support is not None and t >= problem.t_star:
        raise MovingMeshError(
            f"t = {t} is past the breaking time {problem.t_star:.4f}; "
            "the implicit solution holds before breaking only"
        )
    c0 = problem.c0
    if t == 0.0:
        p = float(rwave_p0(problem, x))
    else:
        p_hi = -c0
        width = c0
        for _ in range(64):
            if _p_residual(problem, p_hi, x, t) >= 0.0:
                break
            p_hi += width
            width *= 2.0
        else:
            raise MovingMeshError(f"no upper bracket for p at x={x}, t={t}")
        p_lo = min(2.0 * c0 - 3.0 * math.sqrt(
            problem.grav * (problem.h0 + _local_eta_max(problem, x, t))),
            p_hi - 1.0)
        width = c0
        for _ in range(64):
            if _p_residual(problem, p_lo, x, t) <= 0.0:
                break
            p_lo -= width
            width *= 2.0
        else:
            raise MovingMeshError(f"no lower bracket for p at x={x}, t={t}")
        for _ in range(BISECTION_MAX_ITER):
            p = 0.5 * (p_lo + p_hi)
            res = _p_residual(problem, p, x, t)
            if abs(res) <= tol:
                break
            if res > 0.0:
                p_hi = p
            else:
                p_lo = p
        else:
            p = 0.5 * (p_lo + p_hi)
    eta = ((2.0 * c0 - p) / (3.0 * math.sqrt(problem.grav))) ** 2 - problem.h0
    u = 2.0 * c0 - 2.0 * math.sqrt(problem.grav * (eta + problem.h0))
    return p, eta, u


def _local_eta_max(problem: RWaveProblem, x: float, t: float) -> float:
    """Upper estimate of eta0 over the characteristic fan feeding (x, t)."""
    c0 = problem.c0
    span = np.linspace(x - 4.0 * c0 * t, x + 4.0 * c0 * t, 257)
    return max(float(np.max(problem.eta0(span))), 0.0)


def rwave_profile(problem: RWaveProblem, x: np.ndarray, t: float,
                  tol: float = BISECTION_TOL, check_breaking: bool = True):
    """(eta, u) arrays of the simple wave sampled at the given nodes."""
    x = np.asarray(x, dtype=np.float64)
    eta = np.empty(x.size)
    u = np.empty(x.size)
    for i, xi in enumerate(x):
        _, eta[i], u[i] = rwave_solve(problem, float(xi), t, tol,
                                      check_breaking)
    return eta, u


def rwave_catastrophe_time(problem: RWaveProblem,
                           n_samples: int = 10_000) -> float:
    """First characteristic crossing time -1/min p0'(x).

    Dense sampling of a finite-difference p0' over the support, then a
    golden-section refinement around the minimizer.  Returns +inf when
    no compressive region exists.
    """
    if problem.support is None:
        raise MovingMeshError("breaking-time estimate needs a support interval")
    lo, hi = problem.support
    pad = 0.05 * (hi - lo)
    xs = np.linspace(lo - pad, hi + pad, n_samples)
    dx = 1.0e-6 * (hi - lo)

    def slope(points):
        return (np.asarray(rwave_p0(problem, points + dx))
                - np.asarray(rwave_p0(problem, points - dx))) / (2.0 * dx)

    slopes = slope(xs)
    k = int(np.argmin(slopes))
    a = xs[max(k - 1, 0)]
    b = xs[min(k + 1, n_samples - 1)]
    inv_phi = 0.5 * (math.sqrt(5.0) - 1.0)
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc = float(slope(np.array([c]))[0])
    fd = float(slope(np.array([d]))[0])
    for _ in range(200):
        if b - a < 1.0e-12 * (hi - lo):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = float(slope(np.array([c]))[0])
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = float(slope(np.array([d]))[0])
    smin = min(float(np.min(slopes)), fc, fd)
    if smin >= 0.0:
        return math.inf
    return -1.0 / smin
