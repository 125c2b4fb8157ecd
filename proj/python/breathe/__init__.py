"""Busy-degree balancing simulator (C++ core)."""

from ._breathe import (
    AlgorithmConfig,
    BreatheError,
    GridOptions,
    InvalidArgument,
    Scenario,
    bdba_solve,
    bfdba_solve,
    compare,
    dbm_to_watts,
    drift_scenario,
    jacobian,
    load_scenario,
    property_suite,
    proportional_scenario,
    run_experiment,
    save_scenario,
    scenario_from_json,
    tidal_scenario,
    watts_to_dbm,
)

__version__ = "0.1.0"
