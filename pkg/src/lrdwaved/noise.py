"""Long-range dependent Gaussian noise generators.

Two stationary unit-variance generators parameterized by the dependence level
alpha in (0, 1] (Hurst index H = 1 - alpha/2, memory d = (1 - alpha)/2):

* fractional Gaussian noise, sampled exactly by circulant embedding of its
  autocovariance (Davies-Harte);
* FARIMA(0, d, 0), sampled exactly by the Durbin-Levinson recursion on its
  autocovariance and standardized to unit marginal variance.

alpha = 1 reduces both to i.i.d. standard Gaussians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NoiseModel",
    "fgn_autocovariance",
    "farima_autocovariance",
    "sample_fgn",
    "sample_farima",
    "derive_rng",
]

_MAX_EMBED_DOUBLINGS = 4


def derive_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Independent counter-based stream for (master seed, replication key)."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class NoiseModel:
    """Dependence level, generator kind and seed for one noise process."""

    alpha: float
    kind: str = "farima"  # "fgn" | "farima"
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.kind not in ("fgn", "farima"):
            raise ValueError(f"unknown noise kind {self.kind!r}")

    @property
    def hurst(self) -> float:
        return 1.0 - self.alpha / 2.0

    @property
    def d(self) -> float:
        return (1.0 - self.alpha) / 2.0

    def rng(self, *key: int) -> np.random.Generator:
        return derive_rng(self.seed, *key)

    def sample(self, n: int, *key: int) -> np.ndarray:
        if self.kind == "fgn":
            return sample_fgn(self, n, *key)
        return sample_farima(self, n, *key)


def fgn_autocovariance(h, hurst: float):
    """Autocovariance of unit-variance fractional Gaussian noise at lag h."""
    if not 0.5 <= hurst < 1.0:
        raise ValueError(f"Hurst index must lie in [1/2, 1), got {hurst}")
    h = np.abs(np.asarray(h, dtype=float))
    out = 0.5 * ((h + 1.0) ** (2 * hurst) - 2.0 * h ** (2 * hurst) + np.abs(h - 1.0) ** (2 * hurst))
    if out.ndim == 0:
        return float(out)
    return out


def farima_autocovariance(h, d: float):
    """Autocovariance of FARIMA(0, d, 0) with unit innovation variance.

    gamma(0) = Gamma(1-2d)/Gamma(1-d)^2 and
    gamma(h) = gamma(h-1) (h-1+d)/(h-d).
    """
    if not 0.0 <= d < 0.5:
        raise ValueError(f"memory parameter d must lie in [0, 1/2), got {d}")
    hmax = int(np.max(np.abs(h)))
    gam = np.empty(hmax + 1)
    gam[0] = math.gamma(1.0 - 2.0 * d) / math.gamma(1.0 - d) ** 2
    for lag in range(1, hmax + 1):
        gam[lag] = gam[lag - 1] * (lag - 1.0 + d) / (lag - d)
    out = gam[np.abs(np.asarray(h, dtype=int))]
    if out.ndim == 0:
        return float(out)
    return out


def _circulant_eigenvalues(hurst: float, m: int) -> np.ndarray:
    gam = fgn_autocovariance(np.arange(m + 1), hurst)
    c = np.concatenate([gam, gam[-2:0:-1]])  # length 2m
    return np.fft.fft(c).real


def sample_fgn(model: NoiseModel, n: int, *key: int) -> np.ndarray:
    """Exact unit-variance fGn sample by circulant embedding."""
    if model.kind != "fgn":
        raise ValueError("model kind must be 'fgn'")
    if n < 1:
        raise ValueError("need n >= 1")
    rng = model.rng(*key)

    m = max(n, 2)
    for _ in range(_MAX_EMBED_DOUBLINGS + 1):
        eig = _circulant_eigenvalues(model.hurst, m)
        if eig.min() >= -1e-12 * eig.max():
            break
        m *= 2
    else:
        raise RuntimeError(f"circulant embedding stayed non-positive up to size {2 * m}")
    eig = np.maximum(eig, 0.0)

    size = 2 * m
    zeta = np.empty(size, dtype=complex)
    zeta[0] = rng.standard_normal()
    zeta[m] = rng.standard_normal()
    re = rng.standard_normal(m - 1)
    im = rng.standard_normal(m - 1)
    zeta[1:m] = (re + 1j * im) / np.sqrt(2.0)
    zeta[m + 1 :] = np.conj(zeta[1:m][::-1])

    x = np.sqrt(size) * np.fft.ifft(np.sqrt(eig) * zeta)
    return x.real[:n]


def sample_farima(model: NoiseModel, n: int, *key: int) -> np.ndarray:
    """Exact FARIMA(0, d, 0) sample via Durbin-Levinson, unit variance."""
    if model.kind != "farima":
        raise ValueError("model kind must be 'farima'")
    if n < 1:
        raise ValueError("need n >= 1")
    d = model.d
    rng = model.rng(*key)
    innovations = rng.standard_normal(n)
    if d == 0.0:
        return innovations

    gam = farima_autocovariance(np.arange(n), d)
    x = np.empty(n)
    phi = np.empty(n - 1) if n > 1 else np.empty(0)
    v = gam[0]
    x[0] = innovations[0] * math.sqrt(v)
    for t in range(1, n):
        if t == 1:
            kappa = gam[1] / gam[0]
        else:
            kappa = (gam[t] - phi[: t - 1] @ gam[t - 1 : 0 : -1]) / v
            # reversed slice overlaps the assignment target; force a temporary
            phi[: t - 1] = phi[: t - 1] - kappa * phi[t - 2 :: -1]
        phi[t - 1] = kappa
        v *= 1.0 - kappa * kappa
        x[t] = phi[:t] @ x[t - 1 :: -1] + innovations[t] * math.sqrt(v)
    return x / math.sqrt(gam[0])
