"""Per-level hard thresholds and the theoretical fine resolution level.

Both methods share the shape lambda_j = smoothing * tau_j * c_n with natural
logarithms throughout:

* LRD:  lambda_j = xi  * tau_{alpha,j} * sigma_hat * sqrt(log n / n^alpha)
* IID:  lambda_j = eta * tau_j         * sigma_hat * sqrt(log n / n)

The estimated noise scale sigma_hat enters multiplicatively; the theoretical
sample factor c_n = sqrt(n^-alpha log n) is recovered with sigma_hat = 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .covariance import KernelSpec, VarianceTable, waved_tau_level

__all__ = [
    "ThresholdPolicy",
    "c_n",
    "fine_level_theoretical",
    "xi_lower_bound",
    "build_policy",
]

DEFAULT_COARSE_LEVEL = 3
DEFAULT_ETA = math.sqrt(6.0)


def c_n(n: int, alpha: float) -> float:
    """Sample-size factor sqrt(n^-alpha log n), natural log."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    return math.sqrt(n ** (-alpha) * math.log(n))


def fine_level_theoretical(n: int, alpha: float, nu: float) -> int:
    """j1 with 2^j1 = (n^alpha / log n)^(1/(alpha + 2 nu)), floored."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if nu < 0.0:
        raise ValueError(f"nu must be nonnegative, got {nu}")
    value = (n**alpha / math.log(n)) ** (1.0 / (alpha + 2.0 * nu))
    return int(math.floor(math.log2(value)))


def xi_lower_bound(alpha: float, p: float = 2.0) -> float:
    """Theoretical tail bound 2 sqrt(alpha (p v 2)); advisory only.

    Exposed as a query because the bound is far too conservative in practice;
    the working defaults are sqrt(alpha) and sqrt(2 alpha).
    """
    return 2.0 * math.sqrt(alpha * max(p, 2.0))


@dataclass(frozen=True)
class ThresholdPolicy:
    """Per-level hard thresholds for one method."""

    method: str  # "lrd" | "iid"
    smoothing: float
    sigma_hat: float
    alpha: float
    n: int
    lambdas: dict[int, float]
    threshold_scale: bool = False

    def lam(self, j: int) -> float:
        if j not in self.lambdas:
            raise KeyError(f"policy has no threshold for level {j}")
        return self.lambdas[j]

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "smoothing": self.smoothing,
            "sigma_hat": self.sigma_hat,
            "alpha": self.alpha,
            "n": self.n,
            "lambdas": {str(j): lam for j, lam in sorted(self.lambdas.items())},
            "threshold_scale": self.threshold_scale,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def build_policy(
    method: str,
    kernel: KernelSpec,
    n: int,
    alpha: float,
    sigma_hat: float,
    smoothing: float,
    j0: int,
    j1: int,
    *,
    variance_table: VarianceTable | None = None,
    threshold_scale: bool = False,
) -> ThresholdPolicy:
    """Assemble lambda_j for levels j0..j1 using the per-level tau factors."""
    if smoothing <= 0:
        raise ValueError(f"smoothing constant must be positive, got {smoothing}")
    if j0 > j1:
        raise ValueError(f"need j0 <= j1, got ({j0}, {j1})")
    if method not in ("lrd", "iid"):
        raise ValueError(f"unknown method {method!r}")

    if method == "lrd":
        table = variance_table
        if table is None or table.kernel is not kernel or table.alpha != alpha:
            table = VarianceTable(kernel=kernel, alpha=alpha)
        factor = sigma_hat * c_n(n, alpha)
        lambdas = {j: smoothing * table.tau(j) * factor for j in range(j0, j1 + 1)}
    else:
        factor = sigma_hat * c_n(n, 1.0)
        lambdas = {
            j: smoothing * waved_tau_level(j, kernel) * factor for j in range(j0, j1 + 1)
        }
    return ThresholdPolicy(
        method=method,
        smoothing=smoothing,
        sigma_hat=sigma_hat,
        alpha=alpha,
        n=n,
        lambdas=lambdas,
        threshold_scale=threshold_scale,
    )
