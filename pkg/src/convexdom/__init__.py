"""Convex dominance of Bayesian estimators across sensors.

Checks sufficient conditions under which one observation kernel yields
conditional-mean estimates that dominate another's in the convex order,
verifies them numerically, and applies them to a two-state POMDP.
"""
__version__ = "0.1.0"

from .core import (
    AdditiveKernel,
    Belief,
    FiniteKernel,
    GridDensityKernel,
    SensorPair,
    StateLevels,
    StochasticMatrix,
    first_order_compare,
    mlr_compare,
)
from .densities import Exponential, Gamma, Gaussian, PowerLaw, Uniform, discretize_to_kernel
from .errors import ConvexDomError
from .filtering import filter_sequence, filter_update, grid_filter_update
from .orders import (
    channel_capacity,
    check_aggregated_sc,
    check_blackwell_left,
    check_blackwell_right,
    check_boundary_a3,
    check_global_filter_a5_a6,
    check_signed_ratio_a4,
    check_single_crossing_a2,
    check_tp2,
    dominance_report,
)
from .pomdp import PomdpModel, value_iterate, verify_lower_bound
from .verdict import Status, Verdict
from .verify import mse_monte_carlo, psi_exact

__all__ = [
    "AdditiveKernel", "Belief", "FiniteKernel", "GridDensityKernel", "SensorPair", "StateLevels",
    "StochasticMatrix", "first_order_compare", "mlr_compare", "Exponential", "Gamma", "Gaussian",
    "PowerLaw", "Uniform", "discretize_to_kernel", "ConvexDomError", "filter_sequence", "filter_update",
    "grid_filter_update", "channel_capacity", "check_aggregated_sc", "check_blackwell_left",
    "check_blackwell_right", "check_boundary_a3", "check_global_filter_a5_a6", "check_signed_ratio_a4",
    "check_single_crossing_a2", "check_tp2", "dominance_report", "PomdpModel", "value_iterate",
    "verify_lower_bound", "Status", "Verdict", "mse_monte_carlo", "psi_exact",
]
