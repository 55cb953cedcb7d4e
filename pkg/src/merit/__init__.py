"""Design engine for multiple-dose randomized phase II dose-optimization trials."""

from .copula import (
    ArmLaw,
    CellProbs,
    bivariate_normal_cdf,
    cell_probabilities,
    joint_tail,
    joint_tail_grid,
    marginal_tails,
    sample_arm,
    sample_arm_counts,
)
from .hypotheses import (
    DesignRates,
    HypothesisConfig,
    enumerate_alternative,
    enumerate_null,
    least_favorable_set,
    scenario_number,
)
from .oc import (
    Boundary,
    OCResult,
    arm_acceptance,
    full_boundary_grid,
    global_oc,
    power,
    power_over_all_alternatives,
    type1_error,
    verify_lfs_reduction,
)
from .search import (
    DesignResult,
    DesignSpec,
    EvaluatedBoundary,
    feasible_boundaries,
    find_optimal_design,
    reproduce_reference_designs,
    sample_size_curve,
)
from .trial import (
    ArmData,
    InterimPolicy,
    TrialData,
    TrialOutcome,
    admissible_set,
    interim_decision,
    pava_adjust,
    posterior_exceedance,
    simulate_oc_with_interim,
    simulate_trial,
)

__version__ = "0.1.0"

__all__ = [
    "ArmData",
    "ArmLaw",
    "Boundary",
    "CellProbs",
    "DesignRates",
    "DesignResult",
    "DesignSpec",
    "EvaluatedBoundary",
    "HypothesisConfig",
    "InterimPolicy",
    "OCResult",
    "TrialData",
    "TrialOutcome",
    "admissible_set",
    "arm_acceptance",
    "bivariate_normal_cdf",
    "cell_probabilities",
    "enumerate_alternative",
    "enumerate_null",
    "feasible_boundaries",
    "find_optimal_design",
    "full_boundary_grid",
    "global_oc",
    "interim_decision",
    "joint_tail",
    "joint_tail_grid",
    "least_favorable_set",
    "marginal_tails",
    "pava_adjust",
    "posterior_exceedance",
    "power",
    "power_over_all_alternatives",
    "reproduce_reference_designs",
    "sample_arm",
    "sample_arm_counts",
    "sample_size_curve",
    "scenario_number",
    "simulate_oc_with_interim",
    "simulate_trial",
    "type1_error",
    "verify_lfs_reduction",
]
