"""POMDP tree-search planners with polynomial exploration bonuses, Voronoi
observation partitioning, and finite-time confidence certificates."""

from .certificate import (
    Certificate,
    CertificateInputs,
    InvalidCountsError,
    InvalidLadderError,
    ParameterLadder,
    build_ladder,
    certificate,
    estimation_term,
    ladder_eta_preservation,
    partition_term,
    tail_bound,
    validate_ladder,
)
from .core import (
    EmptyBeliefError,
    GenerativeModel,
    ParticleBelief,
    PlanningConfig,
    StateOutOfBoxError,
    discounted_return,
    particle_filter_step,
    sample_particle,
)
from .corrected import BonusBelowLeafError, BonusParams, TreeNode, bonus, search, select_action, simulate
from .envs import ModifiedLightDark, OriginalLightDark, TabularPOMDP, two_state_pomdp
from .harness import (
    ConfigError,
    ExperimentConfig,
    MissingTelemetryError,
    load_config,
    parse_config,
    run_benchmark,
    run_certificate_report,
    run_concentration,
    run_episode,
    run_ladder_report,
)
from .oracle import (
    ImpossibleObservationError,
    OracleCapacityError,
    bayes_update,
    optimal_action,
    optimal_q_values,
    optimal_value,
)
from .pomcpow import (
    PomcpowParams,
    PwParams,
    SearchTelemetry,
    pomcpow_search,
    pomcpow_simulate,
    voro_search,
    voro_simulate,
)
from .voronoi import NoCellsError, VoronoiPartition, pw_allows

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "CertificateInputs",
    "InvalidCountsError",
    "InvalidLadderError",
    "ParameterLadder",
    "build_ladder",
    "certificate",
    "estimation_term",
    "ladder_eta_preservation",
    "partition_term",
    "tail_bound",
    "validate_ladder",
    "EmptyBeliefError",
    "GenerativeModel",
    "ParticleBelief",
    "PlanningConfig",
    "StateOutOfBoxError",
    "discounted_return",
    "particle_filter_step",
    "sample_particle",
    "BonusBelowLeafError",
    "BonusParams",
    "TreeNode",
    "bonus",
    "search",
    "select_action",
    "simulate",
    "ModifiedLightDark",
    "OriginalLightDark",
    "TabularPOMDP",
    "two_state_pomdp",
    "ConfigError",
    "ExperimentConfig",
    "MissingTelemetryError",
    "load_config",
    "parse_config",
    "run_benchmark",
    "run_certificate_report",
    "run_concentration",
    "run_episode",
    "run_ladder_report",
    "ImpossibleObservationError",
    "OracleCapacityError",
    "bayes_update",
    "optimal_action",
    "optimal_q_values",
    "optimal_value",
    "PomcpowParams",
    "PwParams",
    "SearchTelemetry",
    "pomcpow_search",
    "pomcpow_simulate",
    "voro_search",
    "voro_simulate",
    "NoCellsError",
    "VoronoiPartition",
    "pw_allows",
]
