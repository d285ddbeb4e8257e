"""Online convex optimization with linear switching cost from one gradient per step.

A-OBD, its delta rules for fresh, stale and noisy gradient information, a
grid dynamic program for the offline optimum, bound checkers and lower-bound
games in one dimension.
"""

from .adversary import (GameInstance, GameOutcome, adversary_respond, exact_min_max_ratio,
                        interval_table, make_game, play_game, stale_lb_game, sweep_first_action)
from .algorithm import (DeltaPolicy, NoiseModel, Observation, StepRecord, Trajectory, aobd_step,
                        delta_fresh, delta_noisy, delta_stale, observe, run)
from .analysis import (CheckReport, CostLedger, NoisyConstants, check_fresh_sandwich,
                       check_noisy_sandwich, check_potential_certificate, check_stale_relation,
                       competitive_ratio, cr_upper_bound, fresh_bound_general, noisy_constants,
                       stale_bound_general, total_cost)
from .errors import (AssumptionViolation, DomainError, FormulaInvalidError, NoInformation,
                     NumericError, ParameterError)
from .experiments import (Scenario, SweepRow, emit_csv, emit_svg_linechart, linear_fit_r2,
                          mean_series, quadratic_suite, read_csv, scenario_paper, suite_params, sweep)
from .functions import (FunctionParams, PiecewiseConvexSpec, Segment, evaluate, grad,
                        dumps, loads, make_lower_bound_g, make_quadratic, params,
                        random_convex_spec, validate_assumptions)
from .offline import (OptResult, exact_balanced_point, minplus_linear, opt_dp,
                      opt_single_step)

__version__ = "0.1.0"

__all__ = [
    "GameInstance", "GameOutcome", "adversary_respond", "exact_min_max_ratio", "interval_table",
    "make_game", "play_game", "stale_lb_game", "sweep_first_action", "DeltaPolicy",
    "NoiseModel", "Observation", "StepRecord", "Trajectory", "aobd_step", "delta_fresh",
    "delta_noisy", "delta_stale", "observe", "run", "CheckReport", "CostLedger",
    "NoisyConstants", "check_fresh_sandwich", "check_noisy_sandwich",
    "check_potential_certificate", "check_stale_relation", "competitive_ratio",
    "cr_upper_bound", "fresh_bound_general", "noisy_constants", "stale_bound_general",
    "total_cost", "AssumptionViolation", "DomainError", "FormulaInvalidError", "NoInformation",
    "NumericError", "ParameterError", "Scenario", "SweepRow", "emit_csv", "emit_svg_linechart",
    "linear_fit_r2", "mean_series", "quadratic_suite", "read_csv", "scenario_paper", "suite_params",
    "sweep", "FunctionParams", "PiecewiseConvexSpec", "Segment", "evaluate", "grad", "dumps",
    "loads", "make_lower_bound_g", "make_quadratic", "params", "random_convex_spec",
    "validate_assumptions", "OptResult", "exact_balanced_point", "minplus_linear", "opt_dp",
    "opt_single_step",
]
