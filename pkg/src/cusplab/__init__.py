"""cusplab: occupation-time experiments for interval maps with two neutral
cusps, and the surrounding limit-theorem machinery.

The package simulates and checks, at desk scale, the distributional
behavior of occupation times S_n(A) for conservative ergodic systems whose
invariant measure is infinite at both ends of the interval:

- ``maps``: the two-branch interval maps with neutral cusps at 0 and 1,
  their inverse branches, inverse-iterate ladders and partial sums.
- ``distributions``: one-sided stable and normalized Mittag-Leffler
  sampling, CDFs, moments, and empirical-distribution utilities.
- ``regvar``: regularly-varying truncated expectations, self-normalizing
  sequences, the alternating-dominance pair, heavy-tail catalogues, and
  the iterated-logarithm normalizer transform.
- ``orbits``: batched orbit simulation -- occupation traces, return-time
  records, duality checks, the normalized-occupation (Darling-Kac-type)
  experiment, ratio experiments, and the mass-escape diagnostic.
- ``chains``: the renewal chain and its doubled tower (where occupation
  normalization works), and the sums-versus-maxima dichotomy for
  heavy-tailed iid sequences.
- ``cli``: the ``cusplab`` command-line entry point.
"""

from ._version import __version__
from .errors import (CusplabError, HypothesisError, InsufficientDataError,
                     NumericError, ValidationError)
from .maps import (TOL_ROOT, FixedPointFunction, IterateTable, MapParams,
                   compare_partial_sums, evaluate_map, inverse_branch,
                   iterate_table)
from .distributions import (EmpiricalDistribution, MLSpec, StableSpec,
                            ks_statistic, ks_two_sample, ml_cdf, ml_moment,
                            sample_ml, sample_stable, stable_cdf, stream)
from .regvar import (DiscreteHeavyTail, NormalizingSequence,
                     OscillatingPair, TabulatedMonotone,
                     TruncatedExpectation, asymptotic_inverse,
                     construct_oscillating_pair, distribution_from_L,
                     gamma_norm_constant, lil_normalizer,
                     normalizing_sequence_abstract,
                     normalizing_sequence_cusps, oscillation_check)
from .orbits import (DkResult, OccupationTrace, OrbitConfig, OrbitRun,
                     RatioResult, ReturnRecord, default_checkpoints,
                     dk_experiment, duality_experiment,
                     empirical_truncated_expectation, mass_escape,
                     ratio_experiment, run_orbits, verify_duality)
from .chains import (IidProcessSpec, RenewalChainSpec, SvmRun, TannyRun,
                     TowerChainState, TowerRun, classify_integral_criterion,
                     default_chain_checkpoints, sums_vs_maxima_run,
                     tanny_check, tower_ratio_run)

__all__ = [
    "__version__",
    # errors
    "CusplabError", "ValidationError", "HypothesisError", "NumericError",
    "InsufficientDataError",
    # maps
    "TOL_ROOT", "MapParams", "IterateTable", "FixedPointFunction",
    "evaluate_map", "inverse_branch", "iterate_table",
    "compare_partial_sums",
    # distributions
    "StableSpec", "MLSpec", "EmpiricalDistribution", "stream",
    "sample_stable", "sample_ml", "ml_moment", "stable_cdf", "ml_cdf",
    "ks_statistic", "ks_two_sample",
    # regvar
    "TabulatedMonotone", "TruncatedExpectation", "NormalizingSequence",
    "OscillatingPair", "DiscreteHeavyTail", "gamma_norm_constant",
    "asymptotic_inverse", "normalizing_sequence_cusps",
    "normalizing_sequence_abstract", "construct_oscillating_pair",
    "distribution_from_L", "oscillation_check", "lil_normalizer",
    # orbits
    "OrbitConfig", "OccupationTrace", "ReturnRecord", "OrbitRun",
    "default_checkpoints", "run_orbits", "verify_duality",
    "duality_experiment", "empirical_truncated_expectation", "DkResult",
    "dk_experiment", "RatioResult", "ratio_experiment", "mass_escape",
    # chains
    "RenewalChainSpec", "TowerChainState", "IidProcessSpec", "TowerRun",
    "TannyRun", "SvmRun", "default_chain_checkpoints", "tower_ratio_run",
    "tanny_check", "sums_vs_maxima_run", "classify_integral_criterion",
]
