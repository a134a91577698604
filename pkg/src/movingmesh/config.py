"""Experiment configuration: file parsing, validation, and built-in presets.

Config files are sectioned ``key = value`` text with one section per
concern: [problem], [grid], [monitor], [scheme], [output].  Unknown
sections or keys are errors, so a config file is a complete, auditable
record of a run.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from typing import Optional

from .adaptation import GridMotionParams, MonitorSpec
from .errors import ConfigError

PROBLEM_KINDS = ("linear-advection", "burgers", "swe")
IC_NAMES = ("step", "smooth-step", "gaussian", "ramp", "cosine-rwave",
            "solitary-wave")
GRID_MODES = ("fixed", "moving")
THETA_NAMES = ("adaptive", "lax-wendroff", "upwind", "lax-friedrichs")
BOUNDARY_NAMES = ("farfield", "wall")

_SECTION_KEYS = {
    "problem": {
        "kind", "length", "final_time", "ic", "speed", "gravity", "depth",
        "boundary", "x_star", "x0", "u_left", "u_right", "x_left", "x_right",
        "amplitude", "x_crest", "wavelength",
    },
    "grid": {"n_cells", "mode", "beta", "sigma", "init_tol", "init_max_iter"},
    "monitor": {"kind", "alpha", "alpha0", "alpha1"},
    "scheme": {"theta", "cfl"},
    "output": {"frames", "trajectory_every"},
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one simulation run."""

    name: str
    kind: str
    length: float
    final_time: float
    n_cells: int
    cfl: float
    ic: str
    ic_params: dict = field(default_factory=dict)
    speed: float = 0.0              # linear advection
    gravity: float = 9.81           # shallow water
    depth: float = 1.0              # still-water depth of the flat bottom
    boundary: str = "farfield"      # shallow water: farfield | wall
    mode: str = "moving"
    theta: str = "adaptive"
    monitor: Optional[MonitorSpec] = None
    motion: Optional[GridMotionParams] = None
    frames: int = 11
    trajectory_every: int = 1

    def __post_init__(self):
        if self.kind not in PROBLEM_KINDS:
            raise ConfigError(f"unknown problem kind {self.kind!r}")
        if self.ic not in IC_NAMES:
            raise ConfigError(f"unknown initial condition {self.ic!r}")
        if self.mode not in GRID_MODES:
            raise ConfigError(f"unknown grid mode {self.mode!r}")
        if self.theta not in THETA_NAMES:
            raise ConfigError(f"unknown theta strategy {self.theta!r}")
        if self.boundary not in BOUNDARY_NAMES:
            raise ConfigError(f"unknown boundary rule {self.boundary!r}")
        if self.length <= 0.0:
            raise ConfigError(f"length must be positive, got {self.length}")
        if self.final_time <= 0.0:
            raise ConfigError(f"final_time must be positive, got {self.final_time}")
        if self.n_cells < 2:
            raise ConfigError(f"need at least 2 cells, got {self.n_cells}")
        if not 0.0 < self.cfl <= 1.0:
            raise ConfigError(f"target CFL must lie in (0, 1], got {self.cfl}")
        if self.frames < 2:
            raise ConfigError(f"need at least 2 output frames, got {self.frames}")
        if self.trajectory_every < 1:
            raise ConfigError("trajectory_every must be >= 1")
        if self.kind == "swe":
            if self.gravity <= 0.0 or self.depth <= 0.0:
                raise ConfigError("gravity and depth must be positive")
            if self.ic not in ("cosine-rwave", "solitary-wave"):
                raise ConfigError(f"ic {self.ic!r} is not a shallow-water profile")
        elif self.ic in ("cosine-rwave", "solitary-wave"):
            raise ConfigError(f"ic {self.ic!r} needs the swe problem kind")
        if self.kind == "burgers" and self.ic != "ramp":
            raise ConfigError("burgers runs use the ramp initial condition")
        if self.mode == "moving":
            if self.monitor is None:
                raise ConfigError("moving-grid runs need a [monitor] section")
            if self.motion is None or self.motion.beta <= 0.0:
                raise ConfigError("moving-grid runs need beta > 0 in [grid]")

    def with_mode(self, mode: str) -> "ExperimentConfig":
        return replace(self, mode=mode)

    def with_cells(self, n_cells: int) -> "ExperimentConfig":
        return replace(self, n_cells=n_cells)

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "kind": self.kind,
            "length": self.length,
            "final_time": self.final_time,
            "n_cells": self.n_cells,
            "cfl": self.cfl,
            "ic": self.ic,
            "ic_params": dict(self.ic_params),
            "mode": self.mode,
            "theta": self.theta,
            "frames": self.frames,
            "trajectory_every": self.trajectory_every,
        }
        if self.kind == "linear-advection":
            d["speed"] = self.speed
        if self.kind == "swe":
            d["gravity"] = self.gravity
            d["depth"] = self.depth
            d["boundary"] = self.boundary
        if self.monitor is not None:
            d["monitor"] = {
                "kind": self.monitor.kind,
                "alpha": self.monitor.alpha,
                "alpha0": self.monitor.alpha0,
                "alpha1": self.monitor.alpha1,
            }
        if self.motion is not None:
            d["beta"] = self.motion.beta
            d["sigma"] = self.motion.sigma
        return d


_IC_PARAM_KEYS = {
    "step": ("x_star",),
    "smooth-step": ("x_left", "wavelength"),
    "gaussian": ("x0",),
    "ramp": ("u_left", "u_right", "x_left", "x_right"),
    "cosine-rwave": ("amplitude", "x_crest", "wavelength"),
    "solitary-wave": ("amplitude", "x_crest"),
}


def _get_float(sec, key, default=None):
    if key not in sec:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return float(sec[key])
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: {exc}") from exc


def _get_int(sec, key, default=None):
    if key not in sec:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return int(sec[key])
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: {exc}") from exc


def parse_config(text: str, name: str = "config") -> ExperimentConfig:
    """Build an ExperimentConfig from sectioned key = value text."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    for section in cp.sections():
        if section not in _SECTION_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        unknown = set(cp[section]) - _SECTION_KEYS[section]
        if unknown:
            raise ConfigError(
                f"unknown keys in [{section}]: {', '.join(sorted(unknown))}"
            )
    if "problem" not in cp or "grid" not in cp or "scheme" not in cp:
        raise ConfigError("config needs [problem], [grid] and [scheme] sections")

    prob = cp["problem"]
    kind = prob.get("kind", "")
    if kind == "scalar-burgers":
        kind = "burgers"
    ic = prob.get("ic", "")
    if ic not in _IC_PARAM_KEYS:
        raise ConfigError(f"unknown initial condition {ic!r}")
    ic_params = {k: _get_float(prob, k) for k in _IC_PARAM_KEYS[ic]}

    grid = cp["grid"]
    mode = grid.get("mode", "moving")
    motion = None
    if "beta" in grid or "sigma" in grid:
        motion = GridMotionParams(
            beta=_get_float(grid, "beta", 0.0),
            sigma=_get_float(grid, "sigma", 0.0),
            init_tol=_get_float(grid, "init_tol", 1.0e-10),
            init_max_iter=_get_int(grid, "init_max_iter", 200),
        )

    monitor = None
    if "monitor" in cp:
        msec = cp["monitor"]
        mkind = msec.get("kind", "")
        if mkind == "gradient":
            monitor = MonitorSpec.gradient(_get_float(msec, "alpha"))
        elif mkind == "amplitude":
            monitor = MonitorSpec.amplitude(_get_float(msec, "alpha"))
        elif mkind == "combined":
            monitor = MonitorSpec.combined(_get_float(msec, "alpha0"),
                                           _get_float(msec, "alpha1"))
        else:
            raise ConfigError(f"unknown monitor kind {mkind!r}")

    scheme = cp["scheme"]
    out = cp["output"] if "output" in cp else {}

    return ExperimentConfig(
        name=name,
        kind=kind,
        length=_get_float(prob, "length"),
        final_time=_get_float(prob, "final_time"),
        n_cells=_get_int(grid, "n_cells"),
        cfl=_get_float(scheme, "cfl"),
        ic=ic,
        ic_params=ic_params,
        speed=_get_float(prob, "speed", 0.0),
        gravity=_get_float(prob, "gravity", 9.81),
        depth=_get_float(prob, "depth", 1.0),
        boundary=prob.get("boundary", "farfield"),
        mode=mode,
        theta=scheme.get("theta", "adaptive"),
        monitor=monitor,
        motion=motion,
        frames=_get_int(out, "frames", 11) if out else 11,
        trajectory_every=_get_int(out, "trajectory_every", 1) if out else 1,
    )


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, name=str(path))


def _preset_advect_step() -> ExperimentConfig:
    return ExperimentConfig(
        name="advect-step", kind="linear-advection", length=30.0,
        final_time=10.0, n_cells=150, cfl=0.8, ic="step",
        ic_params={"x_star": 10.0}, speed=1.0, mode="moving",
        monitor=MonitorSpec.gradient(10.0),
        motion=GridMotionParams(beta=150.0, sigma=100.0),
    )


def _preset_advect_gauss() -> ExperimentConfig:
    return ExperimentConfig(
        name="advect-gauss", kind="linear-advection", length=5.0,
        final_time=3.0, n_cells=150, cfl=0.8, ic="gaussian",
        ic_params={"x0": 1.0}, speed=1.0, mode="moving",
        monitor=MonitorSpec.amplitude(20.0),
        motion=GridMotionParams(beta=20.0, sigma=10.0),
    )


def _preset_burgers_shock() -> ExperimentConfig:
    return ExperimentConfig(
        name="burgers-shock", kind="burgers", length=30.0,
        final_time=10.0, n_cells=60, cfl=0.2, ic="ramp",
        ic_params={"u_left": 1.0, "u_right": -1.0,
                   "x_left": 10.0, "x_right": 20.0},
        mode="moving",
        monitor=MonitorSpec.gradient(15.0),
        motion=GridMotionParams(beta=80.0, sigma=60.0),
    )


def _preset_burgers_moving_shock() -> ExperimentConfig:
    base = _preset_burgers_shock()
    params = dict(base.ic_params)
    params["u_right"] = 0.0
    return replace(base, name="burgers-moving-shock", ic_params=params)


def _preset_swe_rwave() -> ExperimentConfig:
    return ExperimentConfig(
        name="swe-rwave", kind="swe", length=40.0, final_time=5.0,
        n_cells=100, cfl=0.95, ic="cosine-rwave",
        ic_params={"amplitude": 0.2, "x_crest": 30.0, "wavelength": 10.0},
        gravity=9.81, depth=1.0, boundary="farfield", mode="moving",
        monitor=MonitorSpec.combined(10.0, 10.0),
        motion=GridMotionParams(beta=5.0, sigma=5.0),
    )


PRESETS = {
    "advect-step": _preset_advect_step,
    "advect-gauss": _preset_advect_gauss,
    "burgers-shock": _preset_burgers_shock,
    "burgers-moving-shock": _preset_burgers_moving_shock,
    "swe-rwave": _preset_swe_rwave,
}

#: Short aliases matching the numbered parameter tables of the experiments.
PRESET_ALIASES = {
    "table1": "advect-step",
    "table2": "advect-gauss",
    "table3": "burgers-shock",
    "table3b": "burgers-moving-shock",
    "table4": "swe-rwave",
}

PRESET_DESCRIPTIONS = {
    "advect-step": "linear advection of a step front (l=30, N=150, C=0.8, T=10)",
    "advect-gauss": "linear advection of a Gaussian bell (l=5, N=150, C=0.8, T=3)",
    "burgers-shock": "Burgers ramp collapsing to a standing shock (N=60, C=0.2, T=10)",
    "burgers-moving-shock": "Burgers ramp with a right-moving shock (u_right=0)",
    "swe-rwave": "shallow-water leftward simple wave over a flat bottom (N=100, C=0.95, T=5)",
}


def load_preset(name: str) -> ExperimentConfig:
    key = PRESET_ALIASES.get(name, name)
    if key not in PRESETS:
        known = sorted(PRESETS) + sorted(PRESET_ALIASES)
        raise ConfigError(f"unknown preset {name!r}; known: {', '.join(known)}")
    return PRESETS[key]()


def resolve(source: str) -> ExperimentConfig:
    """Interpret a CLI argument as a preset name or a config file path."""
    if source in PRESETS or source in PRESET_ALIASES:
        return load_preset(source)
    try:
        return load_config(source)
    except FileNotFoundError:
        raise ConfigError(
            f"{source!r} is neither a preset nor a readable config file"
        ) from None
