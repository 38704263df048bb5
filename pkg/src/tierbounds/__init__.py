"""Sharp bounds and stable inference for probabilities of tiered benefit.

For a binary exposure and a threshold-partitioned continuous outcome,
this package estimates stratum-specific sharp bounds on the probability
that a unit would land in a strictly higher outcome tier under treatment
than without it, with plug-in, one-step-corrected, smooth-surrogate and
stabilized sequential estimators, plus uncertainty regions that stay
valid when subpopulations are immune to treatment.
"""
from ._backend import BACKEND
from .bounds import (BoundsEstimate, ambiguity_set_mass, harm_bounds,
                     mono_bounds, plugin_bounds, rules, unit_contributions)
from .data import DataError, ObservationTable, PotentialOutcomes
from .inference import (BenchmarkConfig, NumericalError, S1SConfig,
                        UncertaintyRegion, coverage_benchmark, eif_components,
                        matrix_inv_sqrt, one_step, one_step_gelu, s1s,
                        uncertainty_region)
from .nuisance import (Basis, FitError, NuisancePair, OutcomeModel,
                       PropensityModel, TierPartition, fit_outcome,
                       fit_propensity, survival, tier_probs)
from .simulation import (CounterfactualCellMatrix, InfeasibleMarginsError,
                         OracleResult, ScmParams, immune_subgroup_check,
                         nonidentifiability_witness, oracle_truth, simulate,
                         true_nuisance)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "__version__",
    "ObservationTable", "PotentialOutcomes", "DataError",
    "TierPartition", "Basis", "NuisancePair", "PropensityModel",
    "OutcomeModel", "FitError", "fit_propensity", "fit_outcome",
    "survival", "tier_probs",
    "BoundsEstimate", "unit_contributions", "plugin_bounds", "mono_bounds",
    "harm_bounds", "rules", "ambiguity_set_mass",
    "NumericalError", "eif_components", "one_step", "one_step_gelu",
    "matrix_inv_sqrt", "s1s", "S1SConfig", "uncertainty_region",
    "UncertaintyRegion", "BenchmarkConfig", "coverage_benchmark",
    "ScmParams", "simulate", "oracle_truth", "OracleResult",
    "immune_subgroup_check", "nonidentifiability_witness",
    "CounterfactualCellMatrix", "InfeasibleMarginsError", "true_nuisance",
]
