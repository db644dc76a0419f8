from .graph import Graph, GraphSpec, ExpansionReport, sample_gnp, named_graph, check_expansion
from .forcing import (
    ForcingRule,
    ProcessState,
    Status,
    TrialRecord,
    force_probability,
    probabilistic_step,
    classical_step,
    run_process,
    run_with_shadow,
)
from .markov import (
    TransitionDistribution,
    ExpectationTable,
    transition_distribution,
    expected_propagation_time,
    min_expected_propagation_time,
    expected_minimum_propagation_time,
    expectation_table,
    is_monotone,
)
from .oracle import OracleReport, verify_lemma_edge_probability, verify_edge_count_domination
from .coupling import (
    CoupledRun,
    coupled_run_subset,
    coupled_run_alternative,
    estimate_force_event_probability,
)
from .bounds import (
    BoundPrediction,
    PhaseThresholds,
    EtaSequence,
    RoundAudit,
    predict_bounds,
    chernoff_tail,
    phase_thresholds,
    eta_sequence,
    audit_rounds,
)
from .montecarlo import (
    ExperimentConfig,
    StartPolicy,
    SummaryStats,
    SweepTable,
    run_trials,
    summarize,
    sweep,
    fit_growth,
)
from .acceptance import verify
from .exceptions import (
    IllegalValueException,
    DeserializeException,
    InvariantViolationException,
)
from .utils import engine_version

__version__ = engine_version

__all__ = [
    "Graph",
    "GraphSpec",
    "ExpansionReport",
    "sample_gnp",
    "named_graph",
    "check_expansion",
    "ForcingRule",
    "ProcessState",
    "Status",
    "TrialRecord",
    "force_probability",
    "probabilistic_step",
    "classical_step",
    "run_process",
    "run_with_shadow",
    "TransitionDistribution",
    "ExpectationTable",
    "transition_distribution",
    "expected_propagation_time",
    "min_expected_propagation_time",
    "expected_minimum_propagation_time",
    "expectation_table",
    "is_monotone",
    "OracleReport",
    "verify_lemma_edge_probability",
    "verify_edge_count_domination",
    "CoupledRun",
    "coupled_run_subset",
    "coupled_run_alternative",
    "estimate_force_event_probability",
    "BoundPrediction",
    "PhaseThresholds",
    "EtaSequence",
    "RoundAudit",
    "predict_bounds",
    "chernoff_tail",
    "phase_thresholds",
    "eta_sequence",
    "audit_rounds",
    "ExperimentConfig",
    "StartPolicy",
    "SummaryStats",
    "SweepTable",
    "run_trials",
    "summarize",
    "sweep",
    "fit_growth",
    "verify",
    "IllegalValueException",
    "DeserializeException",
    "InvariantViolationException",
]
