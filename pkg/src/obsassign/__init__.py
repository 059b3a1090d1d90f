"""Observability-driven sensor selection and sensor-to-target assignment.

Submodules: ``observability`` (bounds on the inverse condition number),
``measures`` (set functions over sensor groups), ``matching`` (Hungarian
method), ``assignment`` (pair and bundle solvers), ``tracking`` (EKF
simulation), ``benchmark`` (seeded sweeps) and ``cli``.
"""

from .assignment import (
    GeneralAssignment,
    PairAssignment,
    PairEntry,
    brute_force_general,
    brute_force_unique_pairs,
    greedy_general,
    greedy_unique_pairs,
    pair_bound_weight,
    relaxed_pair_assignment,
)
from .config import ScenarioConfig, Strategy, SweepConfig, load_scenario, load_sweep, parse_scenario, parse_sweep
from .errors import (
    CollisionError,
    ConfigError,
    DuplicateSensorError,
    EmptySetError,
    InfeasibleError,
    InstanceTooLargeError,
    ObsAssignError,
    SingularCovarianceError,
    TooFewPairsError,
    TooFewSensorsError,
)
from .matching import Matching, brute_force_matching, max_weight_matching
from .measures import (
    DistanceMode,
    MeasureContext,
    MeasureKind,
    check_submodular_monotone,
    evaluate,
    marginal_gain,
)
from .observability import (
    ControlInput,
    Point2,
    SensorPose,
    Sym2,
    TargetBelief,
    build_relative_block,
    eig_sym2,
    inverse_condition_exact,
    lower_bound,
    pair_lower_bound_polar,
    sensors_from_xy,
    symmetric_observability,
    to_polar,
)
from .tracking import EkfState, SimulationTrace, ekf_predict, ekf_update, run_scenario, summarize

__version__ = "0.1.0"

__all__ = [
    "CollisionError",
    "ConfigError",
    "ControlInput",
    "DistanceMode",
    "DuplicateSensorError",
    "EkfState",
    "EmptySetError",
    "GeneralAssignment",
    "InfeasibleError",
    "InstanceTooLargeError",
    "Matching",
    "MeasureContext",
    "MeasureKind",
    "ObsAssignError",
    "PairAssignment",
    "PairEntry",
    "Point2",
    "ScenarioConfig",
    "SensorPose",
    "SimulationTrace",
    "SingularCovarianceError",
    "Strategy",
    "SweepConfig",
    "Sym2",
    "TargetBelief",
    "TooFewPairsError",
    "TooFewSensorsError",
    "brute_force_general",
    "brute_force_matching",
    "brute_force_unique_pairs",
    "build_relative_block",
    "check_submodular_monotone",
    "eig_sym2",
    "ekf_predict",
    "ekf_update",
    "evaluate",
    "greedy_general",
    "greedy_unique_pairs",
    "inverse_condition_exact",
    "load_scenario",
    "load_sweep",
    "lower_bound",
    "marginal_gain",
    "max_weight_matching",
    "pair_bound_weight",
    "pair_lower_bound_polar",
    "parse_scenario",
    "parse_sweep",
    "relaxed_pair_assignment",
    "run_scenario",
    "sensors_from_xy",
    "summarize",
    "symmetric_observability",
    "to_polar",
]
