"""Reference and physical grids, metric terms, and discrete identities.

The physical nodes x_j are images of a uniform reference grid q_j = j*h,
h = 1/N, under a time-dependent map.  Per-cell Jacobians J = x_q and
node velocities x_t are the only metric data the schemes need; the
discrete geometric conservation law ties them together and is what
makes constant states exact on a moving grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridError

#: A cell narrower than this fraction of the domain counts as collapsed.
COLLAPSE_REL_TOL = 1.0e-14


@dataclass(frozen=True)
class ReferenceGrid:
    """Uniform grid of the reference domain [0, 1]."""

    n_cells: int

    def __post_init__(self):
        if self.n_cells < 2:
            raise GridError(f"need at least 2 cells, got {self.n_cells}")

    @property
    def h(self) -> float:
        return 1.0 / self.n_cells

    @property
    def q(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_cells + 1)


@dataclass(frozen=True)
class PhysicalGrid:
    """Moving node positions on [0, length], pinned at both ends."""

    nodes: np.ndarray
    length: float

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=np.float64)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < 3:
            raise GridError("grid needs at least 3 nodes (2 cells)")
        if self.length <= 0.0:
            raise GridError(f"domain length must be positive, got {self.length}")
        if nodes[0] != 0.0 or nodes[-1] != self.length:
            raise GridError(
                f"end nodes must sit at 0 and {self.length}, "
                f"got {nodes[0]} and {nodes[-1]}"
            )
        widths = np.diff(nodes)
        bad = np.nonzero(widths <= COLLAPSE_REL_TOL * self.length)[0]
        if bad.size:
            j = int(bad[0])
            raise GridError(
                f"cell {j} collapsed or inverted: width {widths[j]:.3e} "
                f"between nodes {j} and {j + 1}"
            )
        nodes.setflags(write=False)

    @classmethod
    def uniform(cls, n_cells: int, length: float) -> "PhysicalGrid":
        if n_cells < 2:
            raise GridError(f"need at least 2 cells, got {n_cells}")
        return cls(np.linspace(0.0, length, n_cells + 1), length)

    @property
    def n_cells(self) -> int:
        return self.nodes.size - 1

    @property
    def cell_widths(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def min_cell_width(self) -> float:
        return float(np.min(self.cell_widths))


@dataclass(frozen=True)
class GridMetrics:
    """Per-step metric terms of the reference-to-physical map.

    j_half:  cell Jacobians from the old grid, length N
    j_node:  node Jacobians (two-cell average; one-sided at the ends)
    xt_node: node velocities (x_new - x_old)/tau
    xt_half: cell-centre velocities (node average)
    """

    j_half: np.ndarray
    j_node: np.ndarray
    xt_node: np.ndarray
    xt_half: np.ndarray
    tau: float
    h: float


def node_jacobians(nodes: np.ndarray, h: float) -> np.ndarray:
    """Node Jacobians of a node array: interior two-cell averages, one-sided ends."""
    j_half = np.diff(nodes) / h
    j_node = np.empty(nodes.size)
    j_node[1:-1] = 0.5 * (j_half[:-1] + j_half[1:])
    j_node[0] = j_half[0]
    j_node[-1] = j_half[-1]
    return j_node


def metrics_from_nodes(x_old: np.ndarray, x_new: np.ndarray, tau: float,
                       h: float) -> GridMetrics:
    """Metric terms from two raw node arrays (no end-pinning checks)."""
    widths = np.diff(x_old)
    bad = np.nonzero(widths <= 0.0)[0]
    if bad.size:
        raise GridError(f"cell {int(bad[0])} of the old grid is not increasing")
    bad = np.nonzero(np.diff(x_new) <= 0.0)[0]
    if bad.size:
        raise GridError(f"cell {int(bad[0])} of the new grid is not increasing")
    j_half = widths / h
    xt_node = (x_new - x_old) / tau
    xt_half = 0.5 * (xt_node[:-1] + xt_node[1:])
    return GridMetrics(j_half=j_half, j_node=node_jacobians(x_old, h),
                       xt_node=xt_node, xt_half=xt_half, tau=tau, h=h)


def compute_metrics(grid_old: PhysicalGrid, grid_new: PhysicalGrid,
                    tau: float) -> GridMetrics:
    """Metric terms for one step from grid_old to grid_new over tau."""
    if grid_old.n_cells != grid_new.n_cells:
        raise GridError("grids must share the cell count")
    if grid_old.length != grid_new.length:
        raise GridError("grids must share the domain length")
    if tau <= 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    h = 1.0 / grid_old.n_cells
    return metrics_from_nodes(grid_old.nodes, grid_new.nodes, tau, h)


def check_gcl(metrics: GridMetrics, j_half_old, j_half_new,
              j_node_old, j_node_new):
    """Residuals of the discrete geometric conservation law.

    Returns (max node residual, max half-node residual); both vanish to
    rounding for metrics produced by compute_metrics.
    """
    tau = metrics.tau
    h = metrics.h
    node_res = (j_node_new[1:-1] - j_node_old[1:-1]) / tau \
        - np.diff(metrics.xt_half) / h
    half_res = (j_half_new - j_half_old) / tau \
        - np.diff(metrics.xt_node) / h
    return float(np.max(np.abs(node_res))), float(np.max(np.abs(half_res)))


def error_norms(numeric, exact, weights):
    """(L1, Linf) of numeric - exact; L1 weighted by the cell sizes."""
    numeric = np.asarray(numeric, dtype=np.float64)
    exact = np.asarray(exact, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if numeric.shape != exact.shape or numeric.shape != weights.shape:
        raise ValueError(
            f"length mismatch: {numeric.shape}, {exact.shape}, {weights.shape}"
        )
    diff = np.abs(numeric - exact)
    return float(np.sum(diff * weights)), float(np.max(diff))


def node_weights(nodes: np.ndarray) -> np.ndarray:
    """Trapezoidal control lengths of node-centred values."""
    w = np.empty(nodes.size)
    w[1:-1] = 0.5 * (nodes[2:] - nodes[:-2])
    w[0] = 0.5 * (nodes[1] - nodes[0])
    w[-1] = 0.5 * (nodes[-1] - nodes[-2])
    return w
