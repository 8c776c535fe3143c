"""Infectious-probability engine for disk-shaped wireless edge cells.

Closed-form infectious probability under static, random-direction,
random-walk and random-waypoint mobility, validated against Monte-Carlo
simulation of the same strength model.
"""

from ._kernels import BACKEND
from .analytic import (
    AnalyticResult,
    p_inf,
    p_inf_rd,
    p_inf_rwk,
    p_inf_rwp,
    p_inf_static,
    q_function,
    total_risk,
)
from .distributions import (
    DistanceLaw,
    disk_uniform_law,
    minor_given_nearest_disk,
    nearest_of_n,
    rwk_conditional_cdf,
    rwk_law,
    rwp_law,
    rwp_minor_given_nearest,
    stationary_law,
)
from .moments import MomentPair, rwk_moments, rwp_moments, static_moments
from .montecarlo import (
    McEstimate,
    empirical_distance_law,
    estimate_p_inf,
    estimate_total_risk,
    instantaneous_strength,
    ks_statistic,
)
from .mobility import (
    Position,
    TrajectoryState,
    new_trajectory_state,
    sample_uniform_disk,
    simulate_positions,
    stationary_radii,
    step,
)
from .scenario import (
    ConfigError,
    McSettings,
    MobilityParams,
    RandomDirection,
    RandomWalk,
    RandomWaypoint,
    ScenarioConfig,
    Static,
    ValidationError,
    parse_config,
    serialize_config,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticResult",
    "BACKEND",
    "ConfigError",
    "DistanceLaw",
    "McEstimate",
    "McSettings",
    "MobilityParams",
    "MomentPair",
    "Position",
    "RandomDirection",
    "RandomWalk",
    "RandomWaypoint",
    "ScenarioConfig",
    "Static",
    "TrajectoryState",
    "ValidationError",
    "__version__",
    "disk_uniform_law",
    "empirical_distance_law",
    "estimate_p_inf",
    "estimate_total_risk",
    "instantaneous_strength",
    "ks_statistic",
    "minor_given_nearest_disk",
    "nearest_of_n",
    "new_trajectory_state",
    "p_inf",
    "p_inf_rd",
    "p_inf_rwk",
    "p_inf_rwp",
    "p_inf_static",
    "parse_config",
    "q_function",
    "rwk_conditional_cdf",
    "rwk_law",
    "rwk_moments",
    "rwp_law",
    "rwp_minor_given_nearest",
    "rwp_moments",
    "sample_uniform_disk",
    "serialize_config",
    "simulate_positions",
    "static_moments",
    "stationary_law",
    "stationary_radii",
    "step",
    "total_risk",
    "validate",
]
