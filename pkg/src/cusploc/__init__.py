"""Cusp-location estimation toolkit.

Locates a cusp-shaped structural point in noisy observations under five
observation schemes (continuous Gaussian signal, i.i.d. samples, periodic
Poisson streams, ergodic diffusions, small-noise dynamical systems),
samples the common fractional-Brownian limit experiment, and measures
convergence rates of the maximum-likelihood and Bayes estimators.
"""

from .constants import (
    ModelConstants,
    gamma_for_model,
    gamma_star,
    gamma_star_sq,
    hurst,
    model_constants,
    normalizing_rate,
)
from .errors import NumericalError, SpecError
from .estimators import (
    PRIOR_REGISTRY,
    EstimationResult,
    LikelihoodCurve,
    bayes_estimate,
    estimate,
    likelihood_curve,
    log_likelihood,
    mle,
    normalized_errors,
    truncated_gaussian_prior,
    uniform_prior,
)
from .fbm import (
    FbmGrid,
    FbmPath,
    fbm_covariance,
    fbm_sample_exact,
    fbm_sample_exact_many,
    fbm_sample_ma,
    fbm_sample_ma_many,
    symmetric_grid,
)
from .harness import (
    ComparisonReport,
    ComparisonSettings,
    ExperimentConfig,
    LoglogFit,
    RateFitResult,
    RatePoint,
    ReportBundle,
    SimulationSettings,
    build_default_report,
    config_from_mapping,
    default_grid,
    emit_report,
    fit_loglog_slope,
    load_config,
    observation_step,
    replication_seed,
    run_limit_comparison,
    run_rate_experiment,
)
from .limit import (
    LimitDensity,
    LimitDraw,
    LimitMoments,
    LimitSample,
    argmax_xi,
    bayes_xi,
    limit_density,
    limit_functionals,
    limit_moments,
    limit_z_path,
    mle_density_analytic_h_half,
)
from .models import (
    CuspModelSpec,
    EventRecord,
    HFunction,
    Sample,
    Trajectory,
    constant,
    drift_value,
    estimate_noise_level,
    fold_periods,
    gaussian_bump,
    iid_density,
    iid_normalizer,
    invariant_density,
    invariant_density_normalizer,
    linear,
    ode_limit_path,
    poisson_intensity,
    poisson_period_integral,
    signal_value,
    simulate_dynamical,
    simulate_ergodic_diffusion,
    simulate_gaussian_signal,
    simulate_iid,
    simulate_poisson,
)

__version__ = "0.1.0"

__all__ = [
    "ComparisonReport",
    "ComparisonSettings",
    "CuspModelSpec",
    "EstimationResult",
    "EventRecord",
    "ExperimentConfig",
    "FbmGrid",
    "FbmPath",
    "HFunction",
    "LikelihoodCurve",
    "LimitDensity",
    "LimitDraw",
    "LimitMoments",
    "LimitSample",
    "LoglogFit",
    "ModelConstants",
    "NumericalError",
    "PRIOR_REGISTRY",
    "RateFitResult",
    "RatePoint",
    "ReportBundle",
    "Sample",
    "SimulationSettings",
    "SpecError",
    "Trajectory",
    "__version__",
    "argmax_xi",
    "bayes_estimate",
    "bayes_xi",
    "build_default_report",
    "config_from_mapping",
    "constant",
    "default_grid",
    "drift_value",
    "emit_report",
    "estimate",
    "estimate_noise_level",
    "fbm_covariance",
    "fbm_sample_exact",
    "fbm_sample_exact_many",
    "fbm_sample_ma",
    "fbm_sample_ma_many",
    "fit_loglog_slope",
    "fold_periods",
    "likelihood_curve",
    "load_config",
    "log_likelihood",
    "gamma_for_model",
    "gamma_star",
    "gamma_star_sq",
    "gaussian_bump",
    "hurst",
    "iid_density",
    "iid_normalizer",
    "invariant_density",
    "invariant_density_normalizer",
    "limit_density",
    "limit_functionals",
    "limit_moments",
    "limit_z_path",
    "linear",
    "mle",
    "mle_density_analytic_h_half",
    "model_constants",
    "normalized_errors",
    "normalizing_rate",
    "observation_step",
    "ode_limit_path",
    "poisson_intensity",
    "poisson_period_integral",
    "replication_seed",
    "run_limit_comparison",
    "run_rate_experiment",
    "signal_value",
    "simulate_dynamical",
    "simulate_ergodic_diffusion",
    "simulate_gaussian_signal",
    "simulate_iid",
    "simulate_poisson",
    "symmetric_grid",
    "truncated_gaussian_prior",
    "uniform_prior",
]
