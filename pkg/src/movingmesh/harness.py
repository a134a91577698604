"""Experiment runner: the monitor -> smooth -> grid -> scheme time loop.

Per step: evaluate and smooth the monitor on the current layer, pick tau
from the target CFL using the previous step's node velocities, relax
the grid, recompute the true local CFL (halving tau and redoing the
grid move when a cell exceeds one, at most five times), then take the
PDE step.  The runner also keeps the conservation, variation and
geometric-conservation ledgers that the acceptance checks read.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import backend, exact
from .adaptation import (advance_grid, build_initial_grid, evaluate_monitor,
                         smooth_monitor)
from .config import ExperimentConfig
from .errors import CFLViolationError, ConfigError, MovingMeshError
from .geometry import (PhysicalGrid, check_gcl, compute_metrics, error_norms,
                       node_jacobians, node_weights)
from .linear import AdvectionProblem, ThetaStrategy, step_moving
from .scalar import FluxFunction, harten_speed, step_scalar_moving
from .swe import (Bathymetry, FarFieldBoundary, SWEState, WallBoundary,
                  cell_wave_speeds, step_swe_moving)

MAX_TAU_HALVINGS = 5


@dataclass
class Frame:
    """One output snapshot: time, node positions, named value arrays."""

    t: float
    x: np.ndarray
    values: dict


@dataclass
class RunReport:
    """Everything one run produces, before any file is written."""

    config: ExperimentConfig
    frames: list
    trajectory_t: np.ndarray
    trajectory_x: np.ndarray
    steps: int
    wall_time: float
    cfl_max: float
    gcl_node_max: float
    gcl_half_max: float
    mass_initial: float
    mass_final: float
    mass_ledger_error: float
    tv_increase_max: Optional[float] = None
    extremum_growth: Optional[float] = None
    error_l1: Optional[float] = None
    error_linf: Optional[float] = None
    error_field: Optional[str] = None
    backend: str = backend.BACKEND

    @property
    def mass_drift(self) -> float:
        scale = max(abs(self.mass_initial), 1.0e-300)
        return abs(self.mass_final - self.mass_initial) / scale

    def summary_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "steps": self.steps,
            "cfl_max": self.cfl_max,
            "gcl_node_max": self.gcl_node_max,
            "gcl_half_max": self.gcl_half_max,
            "mass_initial": self.mass_initial,
            "mass_final": self.mass_final,
            "mass_drift": self.mass_drift,
            "mass_ledger_error": self.mass_ledger_error,
            "tv_increase_max": self.tv_increase_max,
            "extremum_growth": self.extremum_growth,
            "error_l1": self.error_l1,
            "error_linf": self.error_linf,
            "error_field": self.error_field,
            "backend": self.backend,
            "wall_time_seconds": self.wall_time,
        }


# ---------------------------------------------------------------------------
# per-problem adapters
# ---------------------------------------------------------------------------

class _AdvectionRun:
    error_field = "u"
    tracks_variation = True

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        if cfg.ic == "step":
            self.ic = exact.step_ic(cfg.ic_params["x_star"])
        elif cfg.ic == "smooth-step":
            self.ic = exact.smooth_step_ic(cfg.ic_params["x_left"],
                                           cfg.ic_params["wavelength"])
        elif cfg.ic == "gaussian":
            self.ic = exact.gaussian_ic(cfg.ic_params["x0"])
        else:
            raise ConfigError(f"ic {cfg.ic!r} unsupported for linear advection")
        far = self.ic(np.array([0.0, cfg.length]))
        self.problem = AdvectionProblem(cfg.speed, cfg.length, self.ic,
                                        float(far[0]), float(far[1]))
        self.strategy = ThetaStrategy(cfg.theta)

    def initial_state(self, nodes):
        return np.asarray(self.ic(nodes), dtype=np.float64)

    def monitor_field(self, state, nodes):
        return state

    def cell_speeds(self, state):
        return (np.full(state.size - 1, self.cfg.speed),)

    def step(self, state, grid, grid_new, tau):
        v_new, flux = step_moving(state, grid, grid_new, tau,
                                  self.problem, self.strategy)
        return v_new, flux

    def mass_density(self, state):
        return state

    def frame_values(self, state, nodes):
        return {"u": state.copy()}

    def variation_field(self, state):
        return state

    def exact_values(self, nodes, t):
        return {"u": exact.advection_exact(self.ic, self.cfg.speed, nodes, t)}


class _BurgersRun:
    error_field = "u"
    tracks_variation = True

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        p = cfg.ic_params
        self.ramp = exact.BurgersRampProblem(p["u_left"], p["u_right"],
                                             p["x_left"], p["x_right"])
        self.ic = exact.ramp_ic(p["u_left"], p["u_right"],
                                p["x_left"], p["x_right"])
        self.flux = FluxFunction.burgers()
        self.strategy = ThetaStrategy(cfg.theta)

    def initial_state(self, nodes):
        return np.asarray(self.ic(nodes), dtype=np.float64)

    def monitor_field(self, state, nodes):
        return state

    def cell_speeds(self, state):
        return (harten_speed(self.flux, state[:-1], state[1:]),)

    def step(self, state, grid, grid_new, tau):
        return step_scalar_moving(state, grid, grid_new, tau, self.flux,
                                  self.strategy, self.ramp.u_left,
                                  self.ramp.u_right)

    def mass_density(self, state):
        return state

    def frame_values(self, state, nodes):
        return {"u": state.copy()}

    def variation_field(self, state):
        return state

    def exact_values(self, nodes, t):
        return {"u": exact.burgers_exact(self.ramp, nodes, t)}


class _ShallowWaterRun:
    error_field = "eta"
    tracks_variation = False

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.bathymetry = Bathymetry.flat(cfg.depth)
        self.h_min = 1.0e-8 * cfg.depth
        p = cfg.ic_params
        if cfg.ic == "cosine-rwave":
            eta0 = exact.cosine_pulse_ic(p["amplitude"], p["x_crest"],
                                         p["wavelength"])
            half = 0.5 * p["wavelength"]
            self.rwave = exact.RWaveProblem(
                eta0, cfg.depth, cfg.gravity,
                support=(p["x_crest"] - half, p["x_crest"] + half))
            self.eta_ic = eta0
            self.u_ic = lambda x: exact.rwave_u0(self.rwave, x)
        elif cfg.ic == "solitary-wave":
            eta0, u0 = exact.solitary_wave_ic(p["amplitude"], cfg.depth,
                                              cfg.gravity, p["x_crest"])
            self.rwave = None
            self.eta_ic = eta0
            self.u_ic = u0
        else:
            raise ConfigError(f"ic {cfg.ic!r} unsupported for shallow water")
        if cfg.boundary == "wall":
            self.boundary = WallBoundary()
        else:
            self.boundary = FarFieldBoundary((cfg.depth, 0.0),
                                             (cfg.depth, 0.0))
        if cfg.theta not in ("adaptive", "upwind"):
            raise ConfigError("shallow-water runs support adaptive or upwind theta")
        self.strategy = cfg.theta

    def initial_state(self, nodes):
        bed = self.bathymetry.sample(nodes)
        eta = np.asarray(self.eta_ic(nodes), dtype=np.float64)
        u = np.asarray(self.u_ic(nodes), dtype=np.float64)
        return SWEState(bed + eta, u)

    def monitor_field(self, state, nodes):
        return state.depth - self.bathymetry.sample(nodes)

    def cell_speeds(self, state):
        _, lam1, lam2 = cell_wave_speeds(state.depth, state.velocity,
                                         self.cfg.gravity)
        return (lam1, lam2)

    def step(self, state, grid, grid_new, tau):
        state_new, (flux1, _) = step_swe_moving(
            state, grid, grid_new, tau, self.bathymetry, self.cfg.gravity,
            self.boundary, strategy=self.strategy, h_min=self.h_min)
        return state_new, flux1

    def mass_density(self, state):
        return state.depth

    def frame_values(self, state, nodes):
        bed = self.bathymetry.sample(nodes)
        return {"H": state.depth.copy(), "u": state.velocity.copy(),
                "eta": state.depth - bed}

    def variation_field(self, state):
        return None

    def exact_values(self, nodes, t):
        if self.rwave is None:
            return None
        # past the first characteristic crossing the implicit equation is
        # branch-ambiguous near the front; the root it returns is still
        # the reference profile this comparison has always used
        eta, u = exact.rwave_profile(self.rwave, nodes, t,
                                     check_breaking=False)
        bed = self.bathymetry.sample(nodes)
        return {"H": bed + eta, "u": u, "eta": eta}


def _make_adapter(cfg: ExperimentConfig):
    if cfg.kind == "linear-advection":
        return _AdvectionRun(cfg)
    if cfg.kind == "burgers":
        return _BurgersRun(cfg)
    return _ShallowWaterRun(cfg)


# ---------------------------------------------------------------------------
# the time loop
# ---------------------------------------------------------------------------

def _interior_mass(mass_nodes, nodes, h):
    return h * float(np.sum(node_jacobians(nodes, h)[1:-1] * mass_nodes[1:-1]))


def _total_mass(mass_nodes, nodes):
    return float(np.sum(node_weights(nodes) * mass_nodes))


def run(cfg: ExperimentConfig) -> RunReport:
    """Execute one experiment and return its report."""
    adapter = _make_adapter(cfg)
    n = cfg.n_cells
    h = 1.0 / n
    moving = cfg.mode == "moving"

    if moving:
        grid = build_initial_grid(
            lambda x: adapter.monitor_field(adapter.initial_state(x), x),
            cfg.monitor, cfg.motion, n, cfg.length)
    else:
        grid = PhysicalGrid.uniform(n, cfg.length)
    state = adapter.initial_state(grid.nodes)

    frame_times = np.linspace(0.0, cfg.final_time, cfg.frames)
    frames = [Frame(0.0, grid.nodes.copy(),
                    adapter.frame_values(state, grid.nodes))]
    next_frame = 1

    traj_t = [0.0]
    traj_x = [grid.nodes.copy()]

    mass0_total = _total_mass(adapter.mass_density(state), grid.nodes)
    mass_int = _interior_mass(adapter.mass_density(state), grid.nodes, h)
    ledger_err = 0.0
    mass_scale = max(_total_mass(np.abs(adapter.mass_density(state)),
                                 grid.nodes), 1.0e-300)

    tv_prev = None
    tv_increase = 0.0
    extremum_growth = 0.0
    if adapter.tracks_variation:
        v0 = adapter.variation_field(state)
        tv_prev = float(np.sum(np.abs(np.diff(v0))))
        v_lo, v_hi = float(np.min(v0)), float(np.max(v0))

    cfl_max = 0.0
    gcl_node_max = 0.0
    gcl_half_max = 0.0
    xt_half_prev = np.zeros(n)

    t = 0.0
    steps = 0
    started = time.perf_counter()
    while t < cfg.final_time:
        if moving:
            w_field = adapter.monitor_field(state, grid.nodes)
            w = smooth_monitor(evaluate_monitor(w_field, grid, cfg.monitor),
                               cfg.motion.sigma)

        speeds = adapter.cell_speeds(state)
        widths = grid.cell_widths
        rate = max(float(np.max(np.abs(s - xt_half_prev) / widths))
                   for s in speeds)
        tau = cfg.cfl / rate if rate > 0.0 else frame_times[next_frame] - t
        tau = min(tau, frame_times[next_frame] - t)

        for _ in range(MAX_TAU_HALVINGS + 1):
            grid_new = advance_grid(grid, w, cfg.motion.beta, tau) \
                if moving else grid
            metrics = compute_metrics(grid, grid_new, tau)
            local_max = max(
                float(np.max((tau / h) * np.abs(s - metrics.xt_half)
                             / metrics.j_half))
                for s in speeds)
            if local_max <= 1.0:
                break
            tau *= 0.5
        else:
            raise CFLViolationError(
                f"no stable tau after {MAX_TAU_HALVINGS} halvings at "
                f"t = {t:.6f} (step {steps})"
            )
        cfl_max = max(cfl_max, local_max)

        try:
            state_new, mass_flux = adapter.step(state, grid, grid_new, tau)
        except MovingMeshError as exc:
            exc.args = (f"step {steps} at t = {t:.6f}: {exc}",)
            raise

        j_half_old = np.diff(grid.nodes) / h
        j_half_new = np.diff(grid_new.nodes) / h
        res_node, res_half = check_gcl(
            metrics, j_half_old, j_half_new,
            node_jacobians(grid.nodes, h), node_jacobians(grid_new.nodes, h))
        scale = tau / float(np.max(j_half_new))
        gcl_node_max = max(gcl_node_max, res_node * scale)
        gcl_half_max = max(gcl_half_max, res_half * scale)

        mass_new = _interior_mass(adapter.mass_density(state_new),
                                  grid_new.nodes, h)
        flux_step = -tau * (mass_flux[-1] - mass_flux[0])
        ledger_err = max(ledger_err,
                         abs((mass_new - mass_int) - flux_step) / mass_scale)
        mass_int = mass_new

        if adapter.tracks_variation:
            v = adapter.variation_field(state_new)
            tv = float(np.sum(np.abs(np.diff(v))))
            tv_increase = max(tv_increase, tv - tv_prev)
            tv_prev = tv
            extremum_growth = max(extremum_growth,
                                  float(np.max(v)) - v_hi,
                                  v_lo - float(np.min(v)))

        steps += 1
        t += tau
        grid = grid_new
        state = state_new
        xt_half_prev = metrics.xt_half
        if t >= frame_times[next_frame] - 1.0e-12 * cfg.final_time:
            t = float(frame_times[next_frame])
            frames.append(Frame(t, grid.nodes.copy(),
                                adapter.frame_values(state, grid.nodes)))
            next_frame += 1
        if steps % cfg.trajectory_every == 0:
            traj_t.append(t)
            traj_x.append(grid.nodes.copy())
    wall = time.perf_counter() - started

    err_l1 = err_linf = None
    exact_vals = adapter.exact_values(grid.nodes, cfg.final_time)
    if exact_vals is not None:
        key = adapter.error_field
        err_l1, err_linf = error_norms(frames[-1].values[key],
                                       exact_vals[key],
                                       node_weights(grid.nodes))

    return RunReport(
        config=cfg, frames=frames,
        trajectory_t=np.asarray(traj_t),
        trajectory_x=np.asarray(traj_x),
        steps=steps, wall_time=wall, cfl_max=cfl_max,
        gcl_node_max=gcl_node_max, gcl_half_max=gcl_half_max,
        mass_initial=mass0_total,
        mass_final=_total_mass(adapter.mass_density(state), grid.nodes),
        mass_ledger_error=ledger_err,
        tv_increase_max=tv_increase if adapter.tracks_variation else None,
        extremum_growth=extremum_growth if adapter.tracks_variation else None,
        error_l1=err_l1, error_linf=err_linf,
        error_field=adapter.error_field if exact_vals is not None else None,
    )


@dataclass
class ComparisonReport:
    """Moving and fixed runs of the same physics, side by side."""

    moving: RunReport
    fixed: RunReport

    def deltas(self) -> dict:
        out = {}
        for name in ("error_l1", "error_linf"):
            m = getattr(self.moving, name)
            f = getattr(self.fixed, name)
            out[f"moving_{name}"] = m
            out[f"fixed_{name}"] = f
            out[f"{name}_ratio"] = (m / f) if (m is not None and f) else None
        return out


def compare(cfg: ExperimentConfig) -> ComparisonReport:
    """Run the same experiment on moving and fixed grids."""
    if cfg.monitor is None or cfg.motion is None:
        raise ConfigError("compare needs the monitor/motion sections")
    return ComparisonReport(moving=run(cfg.with_mode("moving")),
                            fixed=run(cfg.with_mode("fixed")))


def convergence(cfg: ExperimentConfig, levels: int) -> list:
    """Grid-doubling error study; returns rows of (n_cells, L1, order).

    Needs an exact solution; the order entry of the first row is None.
    """
    if levels < 2:
        raise ConfigError("need at least 2 refinement levels")
    rows = []
    prev_err = None
    n = cfg.n_cells
    for _ in range(levels):
        rep = run(cfg.with_cells(n))
        if rep.error_l1 is None:
            raise ConfigError(f"no exact solution for {cfg.kind}")
        order = None if prev_err is None else float(np.log2(prev_err / rep.error_l1))
        rows.append({"n_cells": n, "l1": rep.error_l1, "order": order})
        prev_err = rep.error_l1
        n *= 2
    return rows


# ---------------------------------------------------------------------------
# file output
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_report(report: RunReport, outdir, extra: Optional[dict] = None) -> None:
    """Write profiles.csv, trajectory.csv and summary.json for one run.

    extra entries (e.g. a seed echo) are merged into the summary.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    value_keys = sorted(report.frames[0].values)

    with open(outdir / "profiles.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "j", "x"] + value_keys)
        for frame in report.frames:
            for j in range(frame.x.size):
                writer.writerow([_fmt(frame.t), j, _fmt(frame.x[j])]
                                + [_fmt(frame.values[k][j]) for k in value_keys])

    with open(outdir / "trajectory.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"x_{j}" for j in
                                 range(report.trajectory_x.shape[1])])
        for t, row in zip(report.trajectory_t, report.trajectory_x):
            writer.writerow([_fmt(t)] + [_fmt(x) for x in row])

    summary = report.summary_dict()
    if extra:
        summary.update(extra)
    with open(outdir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_comparison(report: ComparisonReport, outdir) -> None:
    outdir = Path(outdir)
    write_report(report.moving, outdir / "moving")
    write_report(report.fixed, outdir / "fixed")
    with open(outdir / "compare.json", "w", encoding="utf-8") as fh:
        json.dump(report.deltas(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_convergence(rows: list, outdir) -> None:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "convergence.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n_cells", "l1", "order"])
        for row in rows:
            writer.writerow([row["n_cells"], _fmt(row["l1"]),
                             "" if row["order"] is None else _fmt(row["order"])])
    with open(outdir / "convergence.json", "w", encoding="utf-8") as fh:
        json.dump(rows, fh, indent=2, sort_keys=True)
        fh.write("\n")
