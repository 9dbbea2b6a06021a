"""Benchmark signals, the Gamma blur kernel and synthetic dataset generation.

Signal definitions follow the standard test-suite formulas; the embedded
constants are frozen by golden regression tests.  All norms are grid
normalized, ||v||^2 = mean(v^2), so they approximate L2[0,1] integrals and
SNR/MSE values are comparable across grid sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .covariance import KernelSpec
from .noise import NoiseModel

__all__ = [
    "SIGNAL_NAMES",
    "TestSignal",
    "ExperimentConfig",
    "make_signal",
    "gamma_kernel",
    "calibrate_sigma",
    "blur",
    "generate_dataset",
    "grid_norm",
]

SIGNAL_NAMES = ("lidar", "doppler", "bumps", "cusp")

# Bump atom positions, heights and widths (standard triples).
_BUMP_POS = np.array([0.1, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81])
_BUMP_HGT = np.array([4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2])
_BUMP_WTH = np.array([0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005])

# Two-plateau piecewise-constant lidar profile: (start, stop, height).
_LIDAR_STEPS = ((0.15, 0.45, 1.0), (0.6, 0.85, 0.65))

_CUSP_LOCATION = 0.37
_DOPPLER_EPS = 0.05

# Frozen amplitude normalizations (golden constants; regression locked).
_SIGNAL_SCALE = {"cusp": 2.4, "doppler": 2.8, "bumps": 1.75, "lidar": 1.35}


def grid_norm(v: np.ndarray) -> float:
    """Grid-normalized 2-norm, ||v||^2 = mean(v_i^2)."""
    v = np.asarray(v, dtype=float)
    return math.sqrt(float(np.mean(v * v)))


def _grid(n: int) -> np.ndarray:
    return np.arange(n) / n


def make_signal(name: str, n: int) -> np.ndarray:
    """Sample one of the four benchmark signals on t_i = i/n."""
    key = name.lower()
    t = _grid(n)
    if key == "cusp":
        out = np.sqrt(np.abs(t - _CUSP_LOCATION))
    elif key == "doppler":
        out = np.sqrt(t * (1.0 - t)) * np.sin(
            2.0 * np.pi * (1.0 + _DOPPLER_EPS) / (t + _DOPPLER_EPS)
        )
    elif key == "bumps":
        out = np.zeros(n)
        for p, h, w in zip(_BUMP_POS, _BUMP_HGT, _BUMP_WTH):
            out += h * (1.0 + np.abs((t - p) / w)) ** -4.0
    elif key == "lidar":
        out = np.zeros(n)
        for start, stop, height in _LIDAR_STEPS:
            out[(t >= start) & (t < stop)] = height
    else:
        raise ValueError(f"unknown signal {name!r}; choose from {SIGNAL_NAMES}")
    return _SIGNAL_SCALE[key] * out


@dataclass(frozen=True)
class TestSignal:
    """Named benchmark signal with its frozen normalization."""

    name: str

    def samples(self, n: int) -> np.ndarray:
        return make_signal(self.name, n)

    def peak_to_peak(self, n: int = 4096) -> float:
        s = self.samples(n)
        return float(s.max() - s.min())


def _gamma_pdf(t: np.ndarray, shape: float, scale: float) -> np.ndarray:
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = (
        t[pos] ** (shape - 1.0)
        * np.exp(-t[pos] / scale)
        / (math.gamma(shape) * scale**shape)
    )
    return out


def gamma_kernel(n: int, shape: float = 0.7, scale: float = 0.25) -> KernelSpec:
    """Gamma-density blur kernel; degree of ill-posedness equals the shape.

    The density is sampled at cell midpoints (the density is singular at zero
    for shape < 1) and normalized to unit sum, so K_hat[0] = 1 exactly.
    """
    if not 0.0 < shape <= 1.0:
        raise ValueError(f"shape must lie in (0, 1], got {shape}")
    if scale <= 0.0:
        raise ValueError(f"scale must be positive, got {scale}")
    mid = (np.arange(n) + 0.5) / n
    weights = _gamma_pdf(mid, shape, scale)
    weights /= weights.sum()
    return KernelSpec(fourier=np.fft.fft(weights), dip=shape)


def blur(signal: np.ndarray, kernel: KernelSpec) -> np.ndarray:
    """Exact circular convolution via spectral multiplication."""
    signal = np.asarray(signal, dtype=float)
    if signal.shape[0] != kernel.n:
        raise ValueError("signal and kernel grids disagree")
    out = np.fft.ifft(np.fft.fft(signal) * kernel.fourier)
    return out.real


def calibrate_sigma(blurred: np.ndarray, snr_db: float) -> float:
    """Noise scale sigma with SNR = 10 log10(||K*f||^2 / sigma^2)."""
    if not math.isfinite(snr_db):
        raise ValueError("snr_db must be finite")
    level = grid_norm(blurred)
    if level == 0.0:
        raise ValueError("blurred signal is identically zero")
    return level * 10.0 ** (-snr_db / 20.0)


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one simulation experiment."""

    signal: str
    n: int = 4096
    alpha: float = 1.0
    nu: float = 0.7
    snr_db: float = 20.0
    methods: tuple[str, ...] = ("iid", "lrd", "lrd")
    smoothing: tuple[str, ...] = ("sqrt6", "sqrtalpha", "sqrt2alpha")
    replications: int = 64
    seed: int = 0
    noise_kind: str = "farima"
    kernel_scale: float = 0.25

    def __post_init__(self) -> None:
        if self.signal.lower() not in SIGNAL_NAMES:
            raise ValueError(f"unknown signal {self.signal!r}")
        if self.n < 32 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"n must be a power of two >= 32, got {self.n}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if len(self.methods) != len(self.smoothing):
            raise ValueError("methods and smoothing lists must have equal length")
        if self.replications < 1:
            raise ValueError("need at least one replication")

    def as_dict(self) -> dict:
        return {
            "signal": self.signal,
            "n": self.n,
            "alpha": self.alpha,
            "nu": self.nu,
            "snr_db": self.snr_db,
            "methods": list(self.methods),
            "smoothing": list(self.smoothing),
            "replications": self.replications,
            "seed": self.seed,
            "noise_kind": self.noise_kind,
            "kernel_scale": self.kernel_scale,
        }


def resolve_smoothing(spec: str | float, alpha: float) -> float:
    """Map a smoothing spec ("sqrt6", "sqrtalpha", "sqrt2alpha" or a number)."""
    if isinstance(spec, (int, float)):
        value = float(spec)
    else:
        key = spec.lower()
        if key == "sqrt6":
            value = math.sqrt(6.0)
        elif key == "sqrtalpha":
            value = math.sqrt(alpha)
        elif key == "sqrt2alpha":
            value = math.sqrt(2.0 * alpha)
        else:
            try:
                value = float(spec)
            except ValueError:
                raise ValueError(f"unknown smoothing spec {spec!r}") from None
    if value <= 0:
        raise ValueError(f"smoothing must be positive, got {value}")
    return value


def generate_dataset(config: ExperimentConfig, replication: int = 0):
    """One synthetic dataset: observations y_i = (k*f)(t_i) + sigma 2^(-alpha/2) e_i.

    Returns (problem, f_true).  Deterministic given (config, replication): the
    noise stream derives from (config.seed, replication).
    """
    from .estimator import DeconvolutionProblem

    f_true = make_signal(config.signal, config.n)
    kernel = gamma_kernel(config.n, shape=config.nu, scale=config.kernel_scale)
    blurred = blur(f_true, kernel)
    sigma = calibrate_sigma(blurred, config.snr_db)
    model = NoiseModel(alpha=config.alpha, kind=config.noise_kind, seed=config.seed)
    e = model.sample(config.n, replication)
    y = blurred + sigma * 2.0 ** (-config.alpha / 2.0) * e
    problem = DeconvolutionProblem(observations=y, kernel=kernel, alpha=config.alpha)
    return problem, f_true
