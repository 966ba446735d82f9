"""Transductive Boltzmann machines.

Exact maximum-likelihood learning of Gibbs distributions over a reduced,
data-derived sample space, with frequent-itemset parameter selection,
fully visible BM and PCD-1 RBM baselines, shared evaluation metrics, and an
information-geometry experiment harness.
"""

from .baselines import (
    FullBMModel,
    RBMConfig,
    RBMModel,
    fit_full_bm,
    fit_rbm_pcd1,
    matched_hidden_units,
    rbm_free_energy,
)
from .experiments import (
    BiasVarianceConfig,
    BiasVarianceReport,
    SyntheticTruth,
    bias_variance_experiment,
    synth_dataset,
    tune_sigma,
)
from .fitting import FitConfig, FitReport, fit, fit_tbm, fit_to_moments
from .geometry import (
    FisherMatrix,
    fisher_information,
    m_projection,
    pythagorean_residual,
    variance_lower_bound,
)
from .metrics import (
    Evaluation,
    entropy,
    evaluate_gibbs,
    kl_divergence,
    reconstruction_error_proxy,
)
from .mining import (
    DomainSizeError,
    ParameterDomain,
    brute_force_domain,
    mine_parameter_domain,
    support_threshold,
)
from .model import (
    GibbsModel,
    SampleSpace,
    build_sample_space,
    incidence_matrix,
    uniform_model,
)
from .patterns import (
    BOTTOM,
    EmpiricalDistribution,
    FimiFormatError,
    Pattern,
    TransactionDataset,
    canonicalize,
    empirical_eta,
    format_fimi,
    is_subpattern,
    parse_fimi,
)
from .serialize import dumps_model, load_model, model_from_dict, model_to_dict, save_model

__version__ = "0.1.0"

__all__ = [
    "BOTTOM",
    "BiasVarianceConfig",
    "BiasVarianceReport",
    "DomainSizeError",
    "EmpiricalDistribution",
    "Evaluation",
    "FimiFormatError",
    "FisherMatrix",
    "FitConfig",
    "FitReport",
    "FullBMModel",
    "GibbsModel",
    "ParameterDomain",
    "Pattern",
    "RBMConfig",
    "RBMModel",
    "SampleSpace",
    "SyntheticTruth",
    "TransactionDataset",
    "bias_variance_experiment",
    "brute_force_domain",
    "build_sample_space",
    "canonicalize",
    "dumps_model",
    "empirical_eta",
    "entropy",
    "evaluate_gibbs",
    "fisher_information",
    "fit",
    "fit_full_bm",
    "fit_rbm_pcd1",
    "fit_tbm",
    "fit_to_moments",
    "format_fimi",
    "incidence_matrix",
    "is_subpattern",
    "kl_divergence",
    "load_model",
    "m_projection",
    "matched_hidden_units",
    "mine_parameter_domain",
    "model_from_dict",
    "model_to_dict",
    "parse_fimi",
    "pythagorean_residual",
    "rbm_free_energy",
    "reconstruction_error_proxy",
    "save_model",
    "support_threshold",
    "synth_dataset",
    "tune_sigma",
    "uniform_model",
    "variance_lower_bound",
]
