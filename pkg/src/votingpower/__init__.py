"""Exact Banzhaf power, decision efficiency and square-root fairness for weighted voting rules."""

from .data_io import export_report, load_dataset
from .dp import banzhaf_dp
from .fairness import FairnessAssessment, assess, error_rate, ideal_distribution, max_relative_deviation, sz_quota
from .game import (
    CapacityError,
    ConfigurationError,
    Council,
    Criterion,
    CriterionKind,
    MemberState,
    VotingPowerError,
    VotingRule,
    make_jc_rule,
    make_lisbon_rule,
    make_nice_rule,
    wins,
)
from .montecarlo import banzhaf_monte_carlo
from .oracle import brute_force_oracle
from .power import PowerReport, banzhaf_exact, compute_power
from .sweep import (
    SweepGrid,
    SweepResult,
    optimize_error,
    optimize_with_efficiency_floor,
    run_sweep,
    slice_optima,
)

__version__ = "0.1.0"

__all__ = [
    "assess",
    "banzhaf_dp",
    "banzhaf_exact",
    "banzhaf_monte_carlo",
    "brute_force_oracle",
    "CapacityError",
    "compute_power",
    "ConfigurationError",
    "Council",
    "Criterion",
    "CriterionKind",
    "error_rate",
    "export_report",
    "FairnessAssessment",
    "ideal_distribution",
    "load_dataset",
    "make_jc_rule",
    "make_lisbon_rule",
    "make_nice_rule",
    "max_relative_deviation",
    "MemberState",
    "optimize_error",
    "optimize_with_efficiency_floor",
    "PowerReport",
    "run_sweep",
    "slice_optima",
    "SweepGrid",
    "SweepResult",
    "sz_quota",
    "VotingPowerError",
    "VotingRule",
    "wins",
]
