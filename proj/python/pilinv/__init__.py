"""Projected inventory level policies for periodic-review lost-sales inventory."""

from ._core import (
    CostParams,
    DemandModel,
    PipelineState,
    Policy,
    SimConfig,
    alpha_D,
    bias_eval,
    bias_rhs,
    build_grid,
    estimate_cost,
    estimate_difference,
    fit_mixed_erlang,
    optimal_constant_rate,
    optimize_policy,
    parse_demand,
    parse_policy,
    project,
    project_expected_level,
    run_testbed,
    solve_average_cost,
    solve_backorder,
    step,
    verify_bias_fixed_point,
)

__all__ = [name for name in dir() if not name.startswith("_")]
