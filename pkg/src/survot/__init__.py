"""Independence and two-sample testing for right-censored survival data.

The core idea: optimal transport turns a censored dataset into a synthetic
fully observed one while preserving the covariate-lifetime dependence, so
standard kernel permutation tests apply.  Weighted-kernel alternatives and
classical baselines (logrank, proportional-hazards Wald test) are included,
along with the simulation scenarios used to benchmark them.
"""

__version__ = "0.1.0"

from ._accel import BACKEND as ACCEL_BACKEND
from .data import (
    CensoredDataset,
    CsvFormatError,
    DataError,
    RiskSet,
    SyntheticDataset,
    TwoSampleDataset,
    load_csv,
    merge_two_sample,
    split_binary,
)
from .kaplan_meier import (
    SurvivalCurve,
    km_distribution,
    km_survival,
    km_weight_vector,
    km_weights,
    km_weights_within_groups,
)
from .kernels import distance_kernel, gram, min_kernel
from .permutation import TestReport, permutation_test, rank_with_random_ties, substream
from .procedures import (
    METHODS,
    cph_test,
    ipx_hsic_test,
    ipx_impute,
    logrank_test,
    opt_hsic_test,
    run_method,
    whsic_test,
    whsic_two_sample_test,
    zhsic_test,
)
from .scenarios import FAMILIES, NOMINAL_OBSERVED, PRESETS, ScenarioSpec, empirical_observed_fraction, sample_scenario
from .statistics import (
    ConvergenceError,
    CoxFit,
    DegenerateDataError,
    cox_fit_score,
    hsic_biased,
    logrank,
    whsic,
    wmmd_two_sample,
    zhsic,
)
from .transport import Coupling, TransformTrace, monotone_coupling, opt_transform, sample_conditional

__all__ = [
    "ACCEL_BACKEND",
    "CensoredDataset",
    "ConvergenceError",
    "Coupling",
    "CoxFit",
    "CsvFormatError",
    "DataError",
    "DegenerateDataError",
    "FAMILIES",
    "METHODS",
    "NOMINAL_OBSERVED",
    "PRESETS",
    "RiskSet",
    "ScenarioSpec",
    "SurvivalCurve",
    "SyntheticDataset",
    "TestReport",
    "TransformTrace",
    "TwoSampleDataset",
    "cox_fit_score",
    "cph_test",
    "distance_kernel",
    "empirical_observed_fraction",
    "gram",
    "hsic_biased",
    "ipx_hsic_test",
    "ipx_impute",
    "km_distribution",
    "km_survival",
    "km_weight_vector",
    "km_weights",
    "km_weights_within_groups",
    "load_csv",
    "logrank",
    "logrank_test",
    "merge_two_sample",
    "min_kernel",
    "monotone_coupling",
    "opt_hsic_test",
    "opt_transform",
    "permutation_test",
    "rank_with_random_ties",
    "run_method",
    "sample_conditional",
    "sample_scenario",
    "split_binary",
    "substream",
    "whsic",
    "whsic_test",
    "whsic_two_sample_test",
    "wmmd_two_sample",
    "zhsic",
    "zhsic_test",
]
