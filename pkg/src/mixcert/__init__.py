"""mixcert: spectral-gap and mixing-time confidence intervals for reversible
Markov chains, estimated from a single sample path, with a Monte Carlo
validation harness and exact-spectrum oracles for testing."""

from .chains import (
    ChainSpec,
    SamplePath,
    SpectralSummary,
    StationaryDistribution,
    chain_family,
    check_ergodic_reversible,
    exact_spectral_summary,
    mixing_time_bounds,
    simulate_path,
    stationary_distribution,
    validate_chain,
)
from .estimators import (
    BootstrapEstimate,
    PluginEstimate,
    TheoryBounds,
    bootstrap_estimate,
    plugin_estimate,
    theory_bounds,
)
from .intervals import (
    CombinedIntervals,
    EmpiricalCertificate,
    IntervalReport,
    MaterializedSource,
    SimulatedSource,
    StoppingTrace,
    combined_intervals,
    empirical_intervals,
    stopping_rule,
    transition_error_bound,
)
from .numerics import GroupInverse, group_inverse, solve_linear, sym_eigenvalues, tail_threshold
from .pathstats import (
    PathStatistics,
    SmoothedTransitionEstimate,
    collect_statistics,
    skip_path,
    smoothed_transitions,
)

__version__ = "0.1.0"

__all__ = [
    "ChainSpec",
    "SamplePath",
    "SpectralSummary",
    "StationaryDistribution",
    "chain_family",
    "check_ergodic_reversible",
    "exact_spectral_summary",
    "mixing_time_bounds",
    "simulate_path",
    "stationary_distribution",
    "validate_chain",
    "BootstrapEstimate",
    "PluginEstimate",
    "TheoryBounds",
    "bootstrap_estimate",
    "plugin_estimate",
    "theory_bounds",
    "CombinedIntervals",
    "EmpiricalCertificate",
    "IntervalReport",
    "MaterializedSource",
    "SimulatedSource",
    "StoppingTrace",
    "combined_intervals",
    "empirical_intervals",
    "stopping_rule",
    "transition_error_bound",
    "GroupInverse",
    "group_inverse",
    "solve_linear",
    "sym_eigenvalues",
    "tail_threshold",
    "PathStatistics",
    "SmoothedTransitionEstimate",
    "collect_statistics",
    "skip_path",
    "smoothed_transitions",
]
