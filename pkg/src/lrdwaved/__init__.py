"""Hard-thresholding Meyer wavelet deconvolution under long-range dependence."""

__version__ = "0.1.0"

from .bench import (
    BenchResult,
    RateResult,
    rate_exponent,
    run_benchmark,
    run_rate_experiment,
)
from .covariance import (
    KernelSpec,
    VarianceTable,
    fbm_spectral_constant,
    sigma_scale,
    tau_level,
    waved_tau_level,
    z_cov,
    z_var,
)
from .estimator import (
    DeconvolutionProblem,
    EstimateReport,
    deconvolve_coefficients,
    estimate_sigma,
    hard_threshold,
    run_estimator,
)
from .finescale import StoppingResult, estimate_fine_level, lemma_bracket, stopping_time
from .meyer import (
    BandSet,
    MeyerWindow,
    WaveletCoefficients,
    aux_polynomial,
    band_set,
    forward_transform,
    inverse_transform,
    periodized_psi_hat,
    phi_hat,
    psi_hat,
)
from .noise import (
    NoiseModel,
    derive_rng,
    farima_autocovariance,
    fgn_autocovariance,
    sample_farima,
    sample_fgn,
)
from .signals import (
    ExperimentConfig,
    TestSignal,
    blur,
    calibrate_sigma,
    gamma_kernel,
    generate_dataset,
    grid_norm,
    make_signal,
)
from .thresholds import (
    ThresholdPolicy,
    build_policy,
    c_n,
    fine_level_theoretical,
    xi_lower_bound,
)

__all__ = [
    "__version__",
    "BandSet",
    "BenchResult",
    "DeconvolutionProblem",
    "EstimateReport",
    "ExperimentConfig",
    "KernelSpec",
    "MeyerWindow",
    "NoiseModel",
    "RateResult",
    "StoppingResult",
    "TestSignal",
    "ThresholdPolicy",
    "VarianceTable",
    "WaveletCoefficients",
    "aux_polynomial",
    "band_set",
    "blur",
    "build_policy",
    "c_n",
    "calibrate_sigma",
    "deconvolve_coefficients",
    "derive_rng",
    "estimate_fine_level",
    "estimate_sigma",
    "farima_autocovariance",
    "fbm_spectral_constant",
    "fgn_autocovariance",
    "fine_level_theoretical",
    "forward_transform",
    "gamma_kernel",
    "generate_dataset",
    "grid_norm",
    "hard_threshold",
    "inverse_transform",
    "lemma_bracket",
    "make_signal",
    "periodized_psi_hat",
    "phi_hat",
    "psi_hat",
    "rate_exponent",
    "run_benchmark",
    "run_estimator",
    "run_rate_experiment",
    "sample_farima",
    "sample_fgn",
    "sigma_scale",
    "stopping_time",
    "tau_level",
    "waved_tau_level",
    "xi_lower_bound",
    "z_cov",
    "z_var",
]
