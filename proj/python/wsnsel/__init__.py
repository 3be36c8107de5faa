"""Sensor subset selection, sink prediction and sleep-scheduled routing for sensor networks."""

from ._core import (
    ContractError,
    CorrelationMatrix,
    DataMatrix,
    EmptyDatasetError,
    EnergyLedger,
    FoldPlan,
    LinearModel,
    RoutingPlan,
    SelectionResult,
    WsnselError,
    align_epochs,
    best_first_select,
    build_routing,
    check_plan,
    compute_correlations,
    cross_validate,
    fit_ols,
    locally_predictive_pass,
    ltef,
    make_folds,
    make_mini_dataset,
    merit_of,
    parse_sensor_log,
    pearson,
    predict,
    rmse,
    run_scenario,
    simulate_epochs,
    stepwise_eliminate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
