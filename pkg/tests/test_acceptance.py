"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Reference values are the published benchmark results at full replication
count (M = 1024); the desk-scale runs here use M = 64 with a fixed master
seed and compare against them at the stated tolerances.

Criterion 4 carries known-red sub-checks: with exact stationary unit-variance
noise, the naive white-noise-calibrated method degrades less at strong
dependence than the reference implementation did (whose noise came from a
burn-in-based simulator), so three of its Cusp-row cells sit below the
factor-2 band and the alpha=0.6 column winner flips by a ~2% margin.  The
assertions are kept faithful rather than loosened.
"""

import math
import time
from collections import Counter

import numpy as np
import pytest

import lrdwaved as lw
from lrdwaved.estimator import DeconvolutionProblem, deconvolve_coefficients, estimate_sigma
from lrdwaved.finescale import OPERATIONAL_LOG_POWER, fine_level_details, lemma_bracket
from lrdwaved.meyer import WaveletCoefficients, forward_transform, inverse_transform
from lrdwaved.noise import NoiseModel, derive_rng

MASTER_SEED = 11

# Cusp 20dB row, methods (iid eta=sqrt6, lrd xi=sqrtalpha, lrd xi=sqrt2alpha):
# (mean MSE, typical fine level) per alpha at M=1024.
REFERENCE_CUSP_20DB = {
    1.0: ((0.0035, 5), (0.0030, 5), (0.0039, 5)),
    0.8: ((0.0039, 5), (0.0037, 4), (0.0042, 4)),
    0.6: ((0.0148, 5), (0.0070, 4), (0.0054, 4)),
    0.4: ((0.0650, 5), (0.0099, 3), (0.0084, 3)),
    0.2: ((0.1683, 5), (0.0243, 3), (0.0206, 3)),
}
# Winner per alpha column (0 = iid, 1 = xi sqrtalpha, 2 = xi sqrt2alpha).
REFERENCE_CUSP_20DB_WINNER = {1.0: 1, 0.8: 1, 0.6: 2, 0.4: 2, 0.2: 2}

# Bold-row winner index for every (signal, snr_db, alpha) cell of both tables.
REFERENCE_WINNERS = {
    ("cusp", 10): {1.0: 1, 0.8: 0, 0.6: 2, 0.4: 2, 0.2: 2},
    ("cusp", 20): {1.0: 1, 0.8: 1, 0.6: 2, 0.4: 2, 0.2: 2},
    ("cusp", 30): {1.0: 1, 0.8: 1, 0.6: 2, 0.4: 2, 0.2: 2},
    ("lidar", 10): {1.0: 1, 0.8: 1, 0.6: 1, 0.4: 2, 0.2: 2},
    ("lidar", 20): {1.0: 1, 0.8: 1, 0.6: 0, 0.4: 1, 0.2: 2},
    ("lidar", 30): {1.0: 1, 0.8: 1, 0.6: 1, 0.4: 2, 0.2: 2},
    ("bumps", 10): {1.0: 1, 0.8: 1, 0.6: 0, 0.4: 0, 0.2: 0},
    ("bumps", 20): {1.0: 1, 0.8: 0, 0.6: 0, 0.4: 0, 0.2: 0},
    ("bumps", 30): {1.0: 1, 0.8: 0, 0.6: 0, 0.4: 0, 0.2: 0},
    ("doppler", 10): {1.0: 1, 0.8: 0, 0.6: 0, 0.4: 0, 0.2: 2},
    ("doppler", 20): {1.0: 1, 0.8: 1, 0.6: 0, 0.4: 0, 0.2: 2},
    ("doppler", 30): {1.0: 1, 0.8: 1, 0.6: 0, 0.4: 2, 0.2: 2},
}


def report(name: str, ok: bool, detail: str = "") -> bool:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f"  ({detail})"
    print(line, flush=True)
    return ok


def run_cusp_row():
    results = {}
    for alpha in REFERENCE_CUSP_20DB:
        config = lw.ExperimentConfig(
            signal="cusp", n=4096, alpha=alpha, nu=0.7, snr_db=20.0,
            replications=64, seed=MASTER_SEED,
        )
        results[alpha] = lw.run_benchmark(config, threads=1)
    return results


class TestCriterion1Transforms:
    def test_transform_correctness(self):
        start = time.monotonic()
        n, j0, j1 = 1024, 3, 7
        rng = np.random.default_rng(0)
        coeffs = WaveletCoefficients.zeros(j0, j1, n)
        coeffs.scale[:] = rng.standard_normal(2**j0)
        for j in range(j0, j1 + 1):
            coeffs.detail[j][:] = rng.standard_normal(2**j)
        signal = inverse_transform(coeffs, n)
        back = forward_transform(signal, j0, j1)
        num = np.sum((back.scale - coeffs.scale) ** 2) + sum(
            np.sum((back.detail[j] - coeffs.detail[j]) ** 2) for j in range(j0, j1 + 1)
        )
        den = np.sum(coeffs.scale**2) + sum(
            np.sum(coeffs.detail[j] ** 2) for j in range(j0, j1 + 1)
        )
        roundtrip = math.sqrt(num / den)

        grid = np.linspace(-2.0, 2.0, 10_000)
        partition = np.abs(
            lw.phi_hat(grid) ** 2
            + sum(np.abs(lw.psi_hat(grid / 2**j)) ** 2 for j in range(13))
            - 1.0
        ).max()
        elapsed = time.monotonic() - start

        ok = report(
            "criterion 1: transform round trip + partition of unity",
            roundtrip < 1e-8 and partition < 1e-12 and elapsed < 5.0,
            f"roundtrip={roundtrip:.2e} partition={partition:.2e} time={elapsed:.1f}s",
        )
        assert ok

    def test_runtime_bound(self):
        start = time.monotonic()
        n = 1024
        rng = np.random.default_rng(1)
        for _ in range(10):
            signal = rng.standard_normal(n)
            inverse_transform(forward_transform(signal, 3, 7), n)
        assert time.monotonic() - start < 5.0


class TestCriterion2NoiseGenerators:
    def test_noise_generators(self):
        start = time.monotonic()
        n, reps = 4096, 200
        failures = []

        for alpha in (1.0, 0.6, 0.2):
            model = NoiseModel(alpha=alpha, kind="fgn", seed=MASTER_SEED)
            lags = np.arange(51)
            est = np.empty((reps, lags.size))
            for r in range(reps):
                x = model.sample(n, r)
                for h in lags:
                    est[r, h] = np.mean(x[: n - h] * x[h:])
            mean = est.mean(axis=0)
            se = est.std(axis=0, ddof=1) / math.sqrt(reps)
            theory = lw.fgn_autocovariance(lags, model.hurst)
            bad = np.abs(mean - theory) > 3.0 * se
            if np.any(bad):
                failures.append(f"fgn alpha={alpha} lags {np.nonzero(bad)[0].tolist()}")

        for alpha in (1.0, 0.6, 0.2):
            model = NoiseModel(alpha=alpha, kind="farima", seed=MASTER_SEED + 1)
            d = model.d
            g1 = np.empty(reps)
            g0 = np.empty(reps)
            for r in range(reps):
                x = model.sample(n, r)
                g1[r] = np.mean(x[:-1] * x[1:])
                g0[r] = np.mean(x * x)
            ratio = g1.mean() / g0.mean()
            grad = np.array([1.0 / g0.mean(), -g1.mean() / g0.mean() ** 2])
            cov = np.cov(np.stack([g1, g0])) / reps
            se = math.sqrt(grad @ cov @ grad)
            theory = d / (1.0 - d)
            if abs(ratio - theory) > 3.0 * max(se, 1e-12):
                failures.append(f"farima alpha={alpha}: {ratio:.4f} vs {theory:.4f}")

        elapsed = time.monotonic() - start
        ok = report(
            "criterion 2: noise generators match second-order theory",
            not failures and elapsed < 30.0,
            f"time={elapsed:.1f}s" + (f" failures={failures}" if failures else ""),
        )
        assert ok


class TestCriterion3VarianceOracle:
    def test_variance_oracle(self):
        start = time.monotonic()
        n, reps = 4096, 2000
        kernel = lw.gamma_kernel(n)
        ratios = {}
        for alpha in (1.0, 0.6):
            model = NoiseModel(alpha=alpha, kind="fgn", seed=99)
            pairs = [(j, k) for j in (3, 4, 5) for k in (0, 2 ** (j - 1))]
            samples = {pair: np.empty(reps) for pair in pairs}
            for r in range(reps):
                noise = model.sample(n, r)
                problem = DeconvolutionProblem(observations=noise, kernel=kernel, alpha=alpha)
                coeffs = deconvolve_coefficients(problem, 3, 5)
                for j, k in pairs:
                    samples[(j, k)][r] = coeffs.detail[j][k]
            for j, k in pairs:
                theory = n ** (-alpha) * lw.tau_level(j, kernel, alpha) ** 2
                ratios[(alpha, j, k)] = samples[(j, k)].var(ddof=1) / theory
        elapsed = time.monotonic() - start
        bad = {key: round(v, 4) for key, v in ratios.items() if not 0.9 <= v <= 1.1}
        ok = report(
            "criterion 3: variance oracle within 10% of Monte Carlo",
            not bad and elapsed < 60.0,
            f"ratio range [{min(ratios.values()):.3f}, {max(ratios.values()):.3f}] "
            f"time={elapsed:.1f}s" + (f" bad={bad}" if bad else ""),
        )
        assert ok


class TestCriterion4TableReproduction:
    @pytest.fixture(scope="class")
    def cusp_row(self):
        start = time.monotonic()
        results = run_cusp_row()
        elapsed = time.monotonic() - start
        return results, elapsed

    def test_4a_cell_values_within_factor_two(self, cusp_row):
        results, _ = cusp_row
        violations = []
        for alpha, refs in REFERENCE_CUSP_20DB.items():
            for method, (ref_mse, _) in zip(results[alpha].methods, refs):
                ratio = method.mean_mse / ref_mse
                if not 0.5 <= ratio <= 2.0:
                    violations.append(
                        f"alpha={alpha} {method.method}:{method.smoothing_spec} "
                        f"mse={method.mean_mse:.4f} ref={ref_mse} ratio={ratio:.2f}"
                    )
        ok = report(
            "criterion 4a: Cusp 20dB cells within factor 2",
            not violations,
            f"{15 - len(violations)}/15 cells" + (f"; {violations}" if violations else ""),
        )
        assert ok, (
            "Known deviation: with exact stationary unit-variance noise the "
            "white-noise-calibrated method degrades less under strong dependence "
            f"than the reference run did. Violations: {violations}"
        )

    def test_4b_winner_per_column(self, cusp_row):
        results, _ = cusp_row
        misses = []
        for alpha, want in REFERENCE_CUSP_20DB_WINNER.items():
            mses = [m.mean_mse for m in results[alpha].methods]
            got = int(np.argmin(mses))
            if got != want:
                misses.append(f"alpha={alpha}: got {got} want {want} (mses {mses})")
        ok = report(
            "criterion 4b: Cusp 20dB winner pattern",
            not misses,
            f"{5 - len(misses)}/5 columns" + (f"; {misses}" if misses else ""),
        )
        assert ok, (
            f"Known deviation at alpha=0.6 (~2% margin), same root cause as 4a. "
            f"Misses: {misses}"
        )

    def test_4c_typical_levels_within_one(self, cusp_row):
        results, elapsed = cusp_row
        misses = []
        for alpha, refs in REFERENCE_CUSP_20DB.items():
            for method, (_, ref_level) in zip(results[alpha].methods, refs):
                if abs(method.typical_fine_level - ref_level) > 1:
                    misses.append(
                        f"alpha={alpha} {method.method}:{method.smoothing_spec} "
                        f"level={method.typical_fine_level} ref={ref_level}"
                    )
        ok = report(
            "criterion 4c: typical fine levels within +-1",
            not misses and elapsed < 180.0,
            f"{15 - len(misses)}/15 cells, row time={elapsed:.0f}s",
        )
        assert ok

    def test_monotone_degradation_across_alpha(self, cusp_row):
        # each method's mean MSE is non-decreasing as dependence strengthens,
        # allowing one inversion within Monte Carlo error
        results, _ = cusp_row
        alphas = sorted(REFERENCE_CUSP_20DB, reverse=True)
        worst = 0
        for i in range(3):
            series = [results[a].methods[i].mean_mse for a in alphas]
            inversions = sum(b < a for a, b in zip(series, series[1:]))
            worst = max(worst, inversions)
        ok = report(
            "estimator invariant: monotone MSE degradation in dependence",
            worst <= 1,
            f"max inversions {worst}",
        )
        assert ok

    def test_4d_full_table_winner_agreement(self):
        # LRD-vs-IID side of the bold pattern across both tables at M=64
        agree = total = 0
        for (sig, snr), column in REFERENCE_WINNERS.items():
            for alpha, want in column.items():
                config = lw.ExperimentConfig(
                    signal=sig, n=4096, alpha=alpha, nu=0.7, snr_db=float(snr),
                    replications=64, seed=MASTER_SEED,
                )
                res = lw.run_benchmark(config, threads=1)
                mses = [m.mean_mse for m in res.methods]
                got_lrd_wins = min(mses[1], mses[2]) < mses[0]
                want_lrd_wins = want != 0
                total += 1
                agree += got_lrd_wins == want_lrd_wins
        fraction = agree / total
        ok = report(
            "criterion 4d: full-table LRD-vs-IID winner agreement >= 80%",
            fraction >= 0.80,
            f"{agree}/{total} = {fraction:.1%}",
        )
        assert ok


class TestCriterion5FineScaleRule:
    def test_fine_scale_rule(self):
        start = time.monotonic()
        reps = 200
        config = lw.ExperimentConfig(
            signal="cusp", n=4096, alpha=1.0, nu=0.7, snr_db=20.0,
            replications=1, seed=21,
        )
        levels = []
        inside = 0
        for rep in range(reps):
            problem, _ = lw.generate_dataset(config, rep)
            sigma_hat = estimate_sigma(problem)
            level, stopping = fine_level_details(
                problem, 1.0, sigma_hat=sigma_hat, rng=derive_rng(21, rep, 0)
            )
            m_c, m_d = lemma_bracket(
                problem.kernel, 1.0, sigma_hat, 4096**-0.5, log_power=OPERATIONAL_LOG_POWER
            )
            levels.append(level)
            inside += m_c <= stopping.M <= m_d
        mode = Counter(levels).most_common(1)[0][0]
        coverage = inside / reps
        elapsed = time.monotonic() - start
        ok = report(
            "criterion 5: fine-scale rule, modal level 5 +- 1 and bracket coverage",
            abs(mode - 5) <= 1 and coverage >= 0.90,
            f"mode={mode} coverage={coverage:.1%} time={elapsed:.0f}s",
        )
        assert ok


class TestCriterion6RateProperty:
    def test_rate_slopes(self):
        start = time.monotonic()
        grid = (1024, 2048, 4096, 8192, 16384)
        slopes = {}
        for alpha in (1.0, 0.4):
            result = lw.run_rate_experiment(
                "cusp", "lrd", alpha, 0.7, grid, replications=32,
                smoothing="sqrt2alpha", snr_db=30.0, seed=5,
            )
            slopes[alpha] = result.slope
        elapsed = time.monotonic() - start
        ok = report(
            "criterion 6: MSE decay slopes ordered by dependence",
            slopes[1.0] < 0.0
            and slopes[0.4] < 0.0
            and slopes[0.4] - slopes[1.0] >= 0.1
            and elapsed < 300.0,
            f"slope(1.0)={slopes[1.0]:.3f} slope(0.4)={slopes[0.4]:.3f} time={elapsed:.0f}s",
        )
        assert ok


class TestCriterion7Determinism:
    def test_benchmark_outputs_byte_identical(self, tmp_path):
        from lrdwaved.cli import main

        args = [
            "benchmark", "--signal", "cusp", "--n", "1024", "--alpha-grid", "0.6",
            "--replications", "8", "--seed", "1", "--out",
        ]
        main(args + [str(tmp_path / "a"), "--threads", "1"])
        main(args + [str(tmp_path / "b"), "--threads", "4"])
        main(args + [str(tmp_path / "c"), "--threads", "1"])
        identical = all(
            (tmp_path / "a" / name).read_bytes() == (tmp_path / other / name).read_bytes()
            for name in ("results.csv", "results.json", "table.txt")
            for other in ("b", "c")
        )
        ok = report("criterion 7: byte-identical outputs across runs and threads", identical)
        assert ok
