"""Conservative TVD predictor-corrector finite-volume schemes on
adaptively moving 1D grids.

Grid nodes follow the equidistribution principle: an initial elliptic
solve adapts the mesh to the initial data, and a cheap implicit
parabolic relaxation moves it every step, so no interpolation between
meshes is ever needed and conservation is exact.  Solvers cover linear
advection, scalar conservation laws (Burgers), and the nonlinear
shallow water equations with a well-balanced source discretization.
"""

from .adaptation import (GridMotionParams, MonitorSpec, advance_grid,
                         build_initial_grid, equidistribute_grid,
                         equidistribution_residual, evaluate_monitor,
                         smooth_monitor)
from .backend import BACKEND, using_numba
from .config import (PRESET_ALIASES, PRESETS, ExperimentConfig, load_config,
                     load_preset, parse_config)
from .errors import (CFLViolationError, ConfigError, DryStateError, GridError,
                     IterationError, MovingMeshError, TridiagonalError)
from .exact import (BurgersRampProblem, RWaveProblem, advection_exact,
                    burgers_exact, cosine_pulse_ic, gaussian_ic, ramp_ic,
                    rwave_catastrophe_time, rwave_p0, rwave_profile,
                    rwave_solve, rwave_u0, smooth_step_ic, solitary_wave_ic,
                    step_ic)
from .geometry import (GridMetrics, PhysicalGrid, ReferenceGrid, check_gcl,
                       compute_metrics, error_norms, node_weights)
from .harness import (ComparisonReport, RunReport, compare, convergence, run,
                      write_comparison, write_convergence, write_report)
from .linear import (AdvectionProblem, ThetaStrategy, choose_tau, local_cfl,
                     select_theta, step_fixed_canonical, step_moving)
from .scalar import (FluxFunction, harten_speed, nonconservative_demo_step,
                     step_scalar_moving)
from .swe import (Bathymetry, EigenStructure, FarFieldBoundary, SWEState,
                  WallBoundary, corrector_step, eigen_structure,
                  flux_form_equivalence_check, predictor_flux,
                  select_theta_swe, step_swe_moving)
from .tridiag import solve_tridiagonal

__version__ = "0.1.0"
