"""Discretized best-response dynamics of Rock-Paper-Scissors."""
from .attractor import (
    AttractorReport,
    PeriodicOrbit,
    bifurcation_points_sym,
    enumerate_attractor,
    head_tail_count,
    lambda_star,
    limit_count,
    r_root,
    w_fixed_point,
)
from .core import GameParams, Region, Trajectory, best_response, classify_region, iterate_T, step_T
from .estimator import BestResponseDynamics
from .exceptions import (
    BifurcationBoundary,
    BoundViolation,
    BracketFailure,
    GammaCollision,
    OrbitClosureFailure,
    ThresholdCollision,
)
from .poincare import branch_fixed_point, classify_Bk, itinerary, poincare_step, return_structure, return_time
from .scan import basin_raster, bifurcation_sweep, classify_basins, first_lambda_with_count
from .symmetry import Branch, cyclic_shift, f_orbit, lift_orbit, project_pi, step_F, step_f
from .verify import run_verify

__version__ = "0.1.0"
