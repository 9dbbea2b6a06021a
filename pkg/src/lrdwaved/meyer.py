"""Periodized Meyer wavelets evaluated in the Fourier domain.

The scaling window ``phi_hat`` and detail window ``psi_hat`` are band-limited,
so every periodized basis function has finitely many nonzero Fourier
coefficients.  Analysis and synthesis of length-n sampled signals therefore
reduce to an FFT plus per-level sums over small frequency bands.

Fourier convention throughout: for samples y_0..y_{n-1} on t_i = i/n,

    y_tilde[l] = (1/n) * sum_i y_i exp(-2 pi i l i / n),

which approximates the Fourier coefficient of a 1-periodic function, so
Parseval sums against basis coefficients need no extra scaling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MeyerWindow",
    "BandSet",
    "WaveletCoefficients",
    "aux_polynomial",
    "phi_hat",
    "psi_hat",
    "band_set",
    "scale_band_set",
    "periodized_psi_hat",
    "periodized_phi_hat",
    "forward_transform",
    "detail_coefficients",
    "scale_coefficients",
    "inverse_transform",
]


def aux_polynomial(x):
    """Auxiliary window polynomial v with three vanishing moments.

    v(x) = x^4 (35 - 84 x + 70 x^2 - 20 x^3), clamped to [0, 1] outside the
    unit interval.  Satisfies v(0) = 0, v(1) = 1 and v(x) + v(1 - x) = 1.
    """
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    # the polynomial maps [0,1] onto [0,1] but rounding can overshoot by 1 ulp
    out = np.clip(x**4 * (35.0 - 84.0 * x + 70.0 * x**2 - 20.0 * x**3), 0.0, 1.0)
    if out.ndim == 0:
        return float(out)
    return out


def phi_hat(omega):
    """Fourier transform of the Meyer scaling function.

    Equals 1 for |omega| <= 1/3, cos(pi/2 v(3|omega| - 1)) on the transition
    band (1/3, 2/3], and 0 beyond.
    """
    w = np.abs(np.asarray(omega, dtype=float))
    out = np.zeros_like(w)
    out[w <= 1.0 / 3.0] = 1.0
    mid = (w > 1.0 / 3.0) & (w <= 2.0 / 3.0)
    out[mid] = np.cos(np.pi / 2.0 * aux_polynomial(3.0 * w[mid] - 1.0))
    if out.ndim == 0:
        return float(out)
    return out


def psi_hat(omega):
    """Fourier transform of the Meyer mother wavelet (complex valued).

    Carries the phase factor exp(-i pi omega); vanishes outside
    1/3 < |omega| <= 4/3.
    """
    w = np.asarray(omega, dtype=float)
    aw = np.abs(w)
    out = np.zeros(w.shape, dtype=complex)
    lo = (aw > 1.0 / 3.0) & (aw <= 2.0 / 3.0)
    hi = (aw > 2.0 / 3.0) & (aw <= 4.0 / 3.0)
    if np.any(lo):
        out[lo] = np.exp(-1j * np.pi * w[lo]) * np.sin(
            np.pi / 2.0 * aux_polynomial(3.0 * aw[lo] - 1.0)
        )
    if np.any(hi):
        out[hi] = np.exp(-1j * np.pi * w[hi]) * np.cos(
            np.pi / 2.0 * aux_polynomial(1.5 * aw[hi] - 1.0)
        )
    if out.ndim == 0:
        return complex(out)
    return out


@dataclass(frozen=True)
class MeyerWindow:
    """Meyer window pair with the degree-3 auxiliary polynomial."""

    degree: int = 3

    def v(self, x):
        return aux_polynomial(x)

    def scaling(self, omega):
        return phi_hat(omega)

    def detail(self, omega):
        return psi_hat(omega)


def _band_bounds(j: int) -> tuple[int, int]:
    # 2^j is never divisible by 3, so ceil(2^j/3) = 2^j//3 + 1.
    return 2**j // 3 + 1, 2 ** (j + 2) // 3


@dataclass(frozen=True)
class BandSet:
    """Signed integer frequencies carrying level-j detail coefficients."""

    j: int
    frequencies: np.ndarray = field(repr=False)

    @property
    def cardinality(self) -> int:
        return self.frequencies.size

    def __contains__(self, ell: int) -> bool:
        lo, hi = _band_bounds(self.j)
        return lo <= abs(int(ell)) <= hi


def band_set(j: int) -> BandSet:
    """Frequencies {±a : ceil(2^j/3) <= a <= floor(2^(j+2)/3)}; size 2^(j+1)."""
    if j < 0:
        raise ValueError(f"detail level must be nonnegative, got {j}")
    lo, hi = _band_bounds(j)
    pos = np.arange(lo, hi + 1, dtype=int)
    freqs = np.concatenate([-pos[::-1], pos])
    return BandSet(j=j, frequencies=freqs)


def scale_band_set(j: int) -> np.ndarray:
    """Frequencies where the level-j periodized scaling function is nonzero."""
    if j < 0:
        raise ValueError(f"scale level must be nonnegative, got {j}")
    hi = 2 ** (j + 1) // 3
    return np.arange(-hi, hi + 1, dtype=int)


def periodized_psi_hat(j: int, k: int, ell):
    """Fourier coefficient of the periodized detail function at frequency ell.

    Equals 2^(-j/2) exp(-2 pi i ell k / 2^j) psi_hat(ell 2^-j); nonzero only
    on band_set(j).
    """
    if not 0 <= k < 2**j:
        raise ValueError(f"shift k={k} out of range for level j={j}")
    ell = np.asarray(ell, dtype=float)
    return 2.0 ** (-j / 2.0) * np.exp(-2j * np.pi * ell * k / 2**j) * psi_hat(ell / 2**j)


def periodized_phi_hat(j: int, k: int, ell):
    """Fourier coefficient of the periodized scaling function at frequency ell."""
    if not 0 <= k < 2**j:
        raise ValueError(f"shift k={k} out of range for level j={j}")
    ell = np.asarray(ell, dtype=float)
    return 2.0 ** (-j / 2.0) * np.exp(-2j * np.pi * ell * k / 2**j) * phi_hat(ell / 2**j)


@dataclass
class WaveletCoefficients:
    """Scale coefficients at j0 plus detail coefficients for levels j0..j1."""

    j0: int
    j1: int
    n: int
    scale: np.ndarray
    detail: dict[int, np.ndarray]

    def __post_init__(self) -> None:
        if self.scale.shape != (2**self.j0,):
            raise ValueError(f"scale must hold 2^{self.j0} entries")
        for j in range(self.j0, self.j1 + 1):
            if j not in self.detail or self.detail[j].shape != (2**j,):
                raise ValueError(f"detail level {j} must hold 2^{j} entries")
        if not self.j0 <= self.j1 < np.log2(self.n):
            raise ValueError(f"need j0 <= j1 < log2(n), got ({self.j0}, {self.j1}, {self.n})")

    def copy(self) -> "WaveletCoefficients":
        return WaveletCoefficients(
            j0=self.j0,
            j1=self.j1,
            n=self.n,
            scale=self.scale.copy(),
            detail={j: d.copy() for j, d in self.detail.items()},
        )

    @classmethod
    def zeros(cls, j0: int, j1: int, n: int) -> "WaveletCoefficients":
        return cls(
            j0=j0,
            j1=j1,
            n=n,
            scale=np.zeros(2**j0),
            detail={j: np.zeros(2**j) for j in range(j0, j1 + 1)},
        )

    def levels(self) -> range:
        return range(self.j0, self.j1 + 1)


def _check_grid(n: int, j1: int) -> None:
    if n < 2 or (n & (n - 1)) != 0:
        raise ValueError(f"grid length must be a power of two, got {n}")
    if j1 > int(np.log2(n)) - 2:
        raise ValueError(
            f"fine level j1={j1} too large for n={n}: need j1 <= log2(n)-2 "
            "so all band frequencies stay below the Nyquist range"
        )


def _real_part(values: np.ndarray, what: str) -> np.ndarray:
    scale = max(np.abs(values).max(), 1.0)
    imag = np.abs(values.imag).max()
    if imag > 1e-9 * scale:
        raise AssertionError(f"{what} should be real; residual imaginary part {imag:.3e}")
    return values.real


def _band_fold(spectrum: np.ndarray, weights, ells: np.ndarray, width: int) -> np.ndarray:
    """Fold band frequencies modulo ``width`` with conjugated basis weights."""
    n = spectrum.shape[0]
    z = np.zeros(width, dtype=complex)
    np.add.at(z, ells % width, spectrum[ells % n] * weights)
    return z


def detail_coefficients(signal: np.ndarray, j: int) -> np.ndarray:
    """Detail coefficients of one level without a full transform."""
    signal = np.asarray(signal, dtype=float)
    n = signal.shape[0]
    _check_grid(n, j)
    spectrum = np.fft.fft(signal) / n
    return _detail_from_spectrum(spectrum, j, n)


def _detail_from_spectrum(spectrum: np.ndarray, j: int, n: int) -> np.ndarray:
    ells = band_set(j).frequencies
    weights = np.conj(psi_hat(ells / 2**j))
    z = _band_fold(spectrum, weights, ells, 2**j)
    coeffs = 2.0 ** (j / 2.0) * np.fft.ifft(z)
    return _real_part(coeffs, f"detail coefficients at level {j}")


def _scale_from_spectrum(spectrum: np.ndarray, j0: int, n: int) -> np.ndarray:
    ells = scale_band_set(j0)
    weights = np.conj(phi_hat(ells / 2**j0))
    z = _band_fold(spectrum, weights, ells, 2**j0)
    coeffs = 2.0 ** (j0 / 2.0) * np.fft.ifft(z)
    return _real_part(coeffs, f"scale coefficients at level {j0}")


def scale_coefficients(signal: np.ndarray, j0: int) -> np.ndarray:
    """Scale (approximation) coefficients at level j0."""
    signal = np.asarray(signal, dtype=float)
    n = signal.shape[0]
    _check_grid(n, j0)
    spectrum = np.fft.fft(signal) / n
    return _scale_from_spectrum(spectrum, j0, n)


def forward_transform(signal: np.ndarray, j0: int, j1: int) -> WaveletCoefficients:
    """Analyze a sampled periodic signal into periodized Meyer coefficients.

    The signal length must be a power of two and j1 <= log2(n) - 2 so that
    every band frequency is representable without aliasing.
    """
    signal = np.asarray(signal, dtype=float)
    n = signal.shape[0]
    if j0 > j1:
        raise ValueError(f"need j0 <= j1, got ({j0}, {j1})")
    _check_grid(n, j1)
    spectrum = np.fft.fft(signal) / n
    scale = _scale_from_spectrum(spectrum, j0, n)
    detail = {j: _detail_from_spectrum(spectrum, j, n) for j in range(j0, j1 + 1)}
    return WaveletCoefficients(j0=j0, j1=j1, n=n, scale=scale, detail=detail)


def coefficients_to_spectrum(coeffs: WaveletCoefficients, n: int) -> np.ndarray:
    """Accumulate the Fourier coefficients of the synthesized expansion."""
    _check_grid(n, coeffs.j1)
    spectrum = np.zeros(n, dtype=complex)

    j0 = coeffs.j0
    ells = scale_band_set(j0)
    fa = np.fft.fft(np.asarray(coeffs.scale, dtype=complex))
    spectrum[ells % n] += 2.0 ** (-j0 / 2.0) * phi_hat(ells / 2**j0) * fa[ells % 2**j0]

    for j in coeffs.levels():
        ells = band_set(j).frequencies
        fb = np.fft.fft(np.asarray(coeffs.detail[j], dtype=complex))
        spectrum[ells % n] += 2.0 ** (-j / 2.0) * psi_hat(ells / 2**j) * fb[ells % 2**j]
    return spectrum


def inverse_transform(coeffs: WaveletCoefficients, n: int) -> np.ndarray:
    """Synthesize samples on t_i = i/n from periodized Meyer coefficients."""
    spectrum = coefficients_to_spectrum(coeffs, n)
    samples = n * np.fft.ifft(spectrum)
    return _real_part(samples, "synthesized samples")
