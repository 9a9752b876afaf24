"""Expected search cost under periodic pile cleanup.

n objects sit on sorted shelves.  Each request moves the found object
onto an unsorted pile; when the pile reaches size m everything is
reshelved.  The library computes the exact expected cost per search
F(m; n) under four memory/shelf models, a closed-form approximation
with a two-candidate bracket for its minimizer, the optimal pile sizes,
and seeded Monte Carlo estimates for arbitrary request distributions,
plus a self-check battery tying the routes together.
"""

from .cost_model import (
    Model,
    binary_success_cost,
    binary_fail_cost,
    sequential_cost,
    list_search_cost,
    pile_search_cost,
    cleanup_cost,
    star_cost,
)
from .occupancy import (
    PrecisionConfig,
    ConvergenceError,
    PrecisionLossError,
    OccupancyMoments,
    stirling2,
    path_count,
    expected_len,
    var_len,
    tau_mean,
    recip_len_closed_form,
    recip_len_series,
    recip_len_quadrature,
    first_passage_dp,
    tau_recip_batch,
    tau_recip_len,
    moments,
)
from .analytic import (
    CostBreakdown,
    OptimumReport,
    f_list,
    f_pile,
    f_cleanup,
    f_total,
    f_small_closed_form,
    f_total_by_enumeration,
    m_opt,
    verify_first_step,
    verify_f1_comparison,
    verify_upper_bound,
    probe_conjectures,
)
from .approx import (
    ApproxCurve,
    BracketReport,
    f_tilde,
    m_opt_approx,
    delta_sign_criterion,
    verify_bracket,
)
from .montecarlo import (
    Distribution,
    PathRecord,
    EstimateReport,
    OccupancyEstimates,
    EmpiricalOptimum,
    simulate_path,
    estimate_f,
    estimate_occupancy,
    empirical_m_opt,
)
from .verify import run_battery, battery_passed, occupancy_grid

__version__ = "0.1.0"

__all__ = [
    "Model",
    "binary_success_cost",
    "binary_fail_cost",
    "sequential_cost",
    "list_search_cost",
    "pile_search_cost",
    "cleanup_cost",
    "star_cost",
    "PrecisionConfig",
    "ConvergenceError",
    "PrecisionLossError",
    "OccupancyMoments",
    "stirling2",
    "path_count",
    "expected_len",
    "var_len",
    "tau_mean",
    "recip_len_closed_form",
    "recip_len_series",
    "recip_len_quadrature",
    "first_passage_dp",
    "tau_recip_batch",
    "tau_recip_len",
    "moments",
    "CostBreakdown",
    "OptimumReport",
    "f_list",
    "f_pile",
    "f_cleanup",
    "f_total",
    "f_small_closed_form",
    "f_total_by_enumeration",
    "m_opt",
    "verify_first_step",
    "verify_f1_comparison",
    "verify_upper_bound",
    "probe_conjectures",
    "ApproxCurve",
    "BracketReport",
    "f_tilde",
    "m_opt_approx",
    "delta_sign_criterion",
    "verify_bracket",
    "Distribution",
    "PathRecord",
    "EstimateReport",
    "OccupancyEstimates",
    "EmpiricalOptimum",
    "simulate_path",
    "estimate_f",
    "estimate_occupancy",
    "empirical_m_opt",
    "run_battery",
    "battery_passed",
    "occupancy_grid",
]
