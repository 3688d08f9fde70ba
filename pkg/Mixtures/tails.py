"""Monte Carlo survival curves of prior statistics and log-log tail-exponent fits.

Four statistics are supported, one per tail condition on the base measure:

============================  ====================  ==============================
statistic                     quantity              required decay
============================  ====================  ==============================
``norm_theta``                ‖θ‖                   x^{−2(r+1)}
``lambda_max_inv``            λ₁(Σ⁻¹)               exp(−c₁ x^{c₂})
``lambda_min_inv_reciprocal`` 1/λ_d(Σ⁻¹) = λ₁(Σ)    x^{−c₃}
``condition_number``          λ₁(Σ)/λ_d(Σ)          x^{−κ}, κ > d(d−1)
============================  ====================  ==============================

Sampling is split in fixed-size chunks, chunk ``i`` drawing from ``stream(seed, i)``,
so survival counts do not depend on the number of worker threads.
"""

from __future__ import annotations

import csv
import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from pathlib import Path

import numpy as np
from pydantic import BaseModel, Field, model_validator
from scipy import stats

from .errors import EstimationError, InputError
from .priors import (
    BaseMeasureSpec,
    CovariancePrior,
    IWParams,
    LocationPriorSpec,
    SpectralParams,
    condition_number_threshold,
    covariance_eigvals_batch,
    sample_location_batch,
)
from .random_streams import as_generator, seed_from, stream

logger = logging.getLogger("DPMixtures.Tails")

MIN_SAMPLES = 10_000
CHUNK_SIZE = 100_000
WINDOW_SURVIVAL_MAX = 0.1
WINDOW_MIN_HITS = 10
STEEPENING_RATIO = 1.25


class TailStatistic(str, Enum):
    NORM_THETA = "norm_theta"
    LAMBDA_MAX_INV = "lambda_max_inv"
    LAMBDA_MIN_INV_RECIPROCAL = "lambda_min_inv_reciprocal"
    CONDITION_NUMBER = "condition_number"


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


class TailRequirements(BaseModel):
    d: int = Field(ge=1)
    r: float = Field(description="Location tail exponent: P(‖θ‖ > x) ≲ x^{−2(r+1)}")
    kappa: float = Field(description="Condition-number exponent: P(z > x) ≲ x^{−κ}")
    c1: float = Field(default=1.0, gt=0)
    c2: float = Field(default=1.0, gt=0)
    c3: float = Field(default=1.0, gt=0)

    @property
    def r_threshold(self) -> float:
        return (self.d - 1) / 2.0

    @property
    def kappa_threshold(self) -> float:
        return condition_number_threshold(self.d)

    @property
    def location_ok(self) -> bool:
        return self.r > self.r_threshold

    @property
    def condition_ok(self) -> bool:
        return self.kappa > self.kappa_threshold


class TailEstimate(BaseModel):
    statistic: TailStatistic
    grid: list[float]
    survival: list[float]
    stderr: list[float]
    n_samples: int
    fitted_slope: float | None = None
    slope_stderr: float | None = None

    @model_validator(mode="after")
    def _check_shape(self) -> TailEstimate:
        if not self.grid:
            raise ValueError("grid is empty")
        if not (len(self.grid) == len(self.survival) == len(self.stderr)):
            raise ValueError("grid, survival and stderr differ in length")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:], strict=False)):
            raise ValueError("grid must be strictly ascending")
        return self

    def default_window(self) -> tuple[int, int]:
        """Index range where WINDOW_MIN_HITS/n ≤ survival ≤ WINDOW_SURVIVAL_MAX."""
        low = WINDOW_MIN_HITS / self.n_samples
        inside = [i for i, s in enumerate(self.survival) if low <= s <= WINDOW_SURVIVAL_MAX]
        if not inside:
            return (0, 0)
        return (inside[0], inside[-1] + 1)


class PowerLawDiagnostic(BaseModel):
    low_slope: float
    low_stderr: float
    high_slope: float
    high_stderr: float
    non_power_law: bool = Field(description="Slope steepens across windows beyond noise: faster than any power")


# --------------------------------------------------------------------------- #
#  Statistic samplers
# --------------------------------------------------------------------------- #
StatisticSampler = Callable[[int, np.random.Generator], np.ndarray]


def statistic_sampler(source: CovariancePrior | LocationPriorSpec, statistic: TailStatistic) -> StatisticSampler:
    """Batch sampler of ``statistic`` under the prior ``source``."""
    statistic = TailStatistic(statistic)
    if statistic is TailStatistic.NORM_THETA:
        if not isinstance(source, LocationPriorSpec):
            raise InputError("norm_theta needs a location prior")
        return lambda size, rng: np.linalg.norm(sample_location_batch(source, size, rng), axis=1)
    if isinstance(source, LocationPriorSpec):
        raise InputError(f"{statistic.value} needs a covariance prior")

    def eig_stat(size: int, rng: np.random.Generator) -> np.ndarray:
        eigs = covariance_eigvals_batch(source, size, rng)
        if statistic is TailStatistic.CONDITION_NUMBER:
            return eigs[:, -1] / eigs[:, 0]
        if statistic is TailStatistic.LAMBDA_MAX_INV:
            return 1.0 / eigs[:, 0]
        return eigs[:, -1]

    return eig_stat


def _resolve_sampler(source, statistic: TailStatistic) -> StatisticSampler:
    if callable(source) and not isinstance(source, BaseModel):
        return source
    return statistic_sampler(source, statistic)


def _chunks(n_samples: int) -> list[int]:
    full, rest = divmod(n_samples, CHUNK_SIZE)
    return [CHUNK_SIZE] * full + ([rest] if rest else [])


def _run_chunks(fn: Callable[[int, int], np.ndarray], sizes: list[int], workers: int) -> list[np.ndarray]:
    jobs = list(enumerate(sizes))
    if workers <= 1:
        return [fn(i, size) for i, size in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def draw_statistic(source, statistic: TailStatistic, n_samples: int, seed: int, workers: int = 1) -> np.ndarray:
    """All ``n_samples`` statistic values, concatenated in chunk order."""
    sampler = _resolve_sampler(source, TailStatistic(statistic))
    parts = _run_chunks(lambda i, size: sampler(size, stream(seed, i)), _chunks(n_samples), workers)
    return np.concatenate(parts)


# --------------------------------------------------------------------------- #
#  Survival estimation and fitting
# --------------------------------------------------------------------------- #
def _check_grid(grid: Sequence[float]) -> np.ndarray:
    x = np.asarray(grid, dtype=float).reshape(-1)
    if x.size == 0:
        raise InputError("survival grid is empty")
    if np.any(np.diff(x) <= 0):
        raise InputError("survival grid must be strictly ascending")
    return x


def survival_from_counts(statistic: TailStatistic, grid: np.ndarray, hits: np.ndarray, n: int) -> TailEstimate:
    survival = hits / n
    stderr = np.sqrt(survival * (1.0 - survival) / n)
    estimate = TailEstimate(
        statistic=statistic,
        grid=grid.tolist(),
        survival=survival.tolist(),
        stderr=stderr.tolist(),
        n_samples=n,
    )
    try:
        slope, se = fit_tail_exponent(estimate)
    except EstimationError as exc:
        logger.debug(f"no default-window fit for {statistic.value}: {exc}")
    else:
        estimate.fitted_slope, estimate.slope_stderr = slope, se
    return estimate


def estimate_survival(
    source: CovariancePrior | LocationPriorSpec | StatisticSampler,
    statistic: TailStatistic | str,
    grid: Sequence[float],
    n_samples: int,
    rng: np.random.Generator | int | None,
    workers: int = 1,
) -> TailEstimate:
    """Empirical P̂(stat > x) on ``grid`` with binomial standard errors.

    ``source`` is a prior parameter model or a callable ``(size, rng) -> values``.
    Per-chunk hit counts are summed.
    """
    statistic = TailStatistic(statistic)
    x = _check_grid(grid)
    if n_samples < MIN_SAMPLES:
        raise InputError(f"n_samples must be at least {MIN_SAMPLES}, got {n_samples}")
    sampler = _resolve_sampler(source, statistic)
    seed = seed_from(as_generator(rng))

    def count(i: int, size: int) -> np.ndarray:
        values = np.sort(sampler(size, stream(seed, i)))
        return size - np.searchsorted(values, x, side="right")

    hits = np.sum(_run_chunks(count, _chunks(n_samples), workers), axis=0)
    estimate = survival_from_counts(statistic, x, hits.astype(float), n_samples)
    logger.info(f"survival of {statistic.value}: n={n_samples}, slope={estimate.fitted_slope}")
    return estimate


def _fit(log_x: np.ndarray, log_s: np.ndarray) -> tuple[float, float]:
    result = stats.linregress(log_x, log_s)
    return float(result.slope), float(result.stderr)


def _window_points(t: TailEstimate, window: tuple[int, int] | None) -> tuple[np.ndarray, np.ndarray]:
    start, stop = window if window is not None else t.default_window()
    x = np.asarray(t.grid[start:stop], dtype=float)
    s = np.asarray(t.survival[start:stop], dtype=float)
    keep = s > 0
    return x[keep], s[keep]


def fit_tail_exponent(t: TailEstimate, window: tuple[int, int] | None = None) -> tuple[float, float]:
    """Least-squares slope of log survival against log x over ``window`` (a slice of grid indices)."""
    x, s = _window_points(t, window)
    if x.size < 3:
        raise EstimationError(f"need at least 3 grid points with positive survival in the window, got {x.size}")
    return _fit(np.log(x), np.log(s))


def power_law_diagnostic(t: TailEstimate, window: tuple[int, int] | None = None) -> PowerLawDiagnostic:
    """Compare slopes over the lower and upper halves of the window.

    A power law settles to a fixed slope, even when its body bends; an exponential-type
    tail keeps steepening in proportion to x. The flag is raised when the upper slope is
    at least STEEPENING_RATIO times the lower one and the gap exceeds three combined
    standard errors.
    """
    x, s = _window_points(t, window)
    half = x.size // 2
    if half < 3 or x.size - half < 3:
        raise EstimationError(f"need at least 6 fit points for the two-window diagnostic, got {x.size}")
    low = _fit(np.log(x[:half]), np.log(s[:half]))
    high = _fit(np.log(x[half:]), np.log(s[half:]))
    noise = 3.0 * math.hypot(low[1], high[1])
    steepening = low[0] < 0 and high[0] <= STEEPENING_RATIO * low[0] and high[0] < low[0] - noise
    return PowerLawDiagnostic(
        low_slope=low[0],
        low_stderr=low[1],
        high_slope=high[0],
        high_stderr=high[1],
        non_power_law=bool(steepening),
    )


def analytic_condition_number_exponent(params: CovariancePrior) -> float | None:
    """Survival exponent of the condition number where a sharp rate is known."""
    if isinstance(params, IWParams):
        return (params.nu - params.d + 1.0) / 2.0
    if isinstance(params, SpectralParams):
        return float(params.a)
    return None


def auto_grid(values: np.ndarray, n_points: int = 40) -> np.ndarray | None:
    """Log-spaced grid from the median to the (1 − WINDOW_MIN_HITS/n) quantile."""
    n = values.size
    lo = float(np.quantile(values, 0.5))
    hi = float(np.quantile(values, 1.0 - WINDOW_MIN_HITS / n))
    if not (lo > 0 and hi > lo * (1.0 + 1e-9)):
        return None
    return np.geomspace(lo, hi, n_points)


def log_grid(lo: float, hi: float, points: int) -> np.ndarray:
    if not (0 < lo < hi) or points < 2:
        raise InputError(f"log grid needs 0 < lo < hi and at least 2 points, got {lo}:{hi}:{points}")
    return np.geomspace(lo, hi, points)


# --------------------------------------------------------------------------- #
#  Verification of the four tail conditions
# --------------------------------------------------------------------------- #
class TailVerdict(BaseModel):
    condition: str
    statistic: TailStatistic
    verdict: Verdict
    fitted_slope: float | None = None
    slope_stderr: float | None = None
    non_power_law: bool | None = None
    analytic_exponent: float | None = None
    required: str
    note: str = ""


class TailVerificationReport(BaseModel):
    d: int
    budget: int
    r_threshold_ok: bool
    kappa_threshold_ok: bool
    verdicts: list[TailVerdict] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.r_threshold_ok and self.kappa_threshold_ok and all(v.verdict is Verdict.PASS for v in self.verdicts)

    def verdict_for(self, condition: str) -> TailVerdict:
        return next(v for v in self.verdicts if v.condition == condition)


_CONDITIONS = (
    ("location_tail", TailStatistic.NORM_THETA),
    ("precision_max_tail", TailStatistic.LAMBDA_MAX_INV),
    ("covariance_max_tail", TailStatistic.LAMBDA_MIN_INV_RECIPROCAL),
    ("condition_number_tail", TailStatistic.CONDITION_NUMBER),
)


def _judge(
    condition: str,
    statistic: TailStatistic,
    estimate: TailEstimate | None,
    diagnostic: PowerLawDiagnostic | None,
    req: TailRequirements,
    analytic: float | None,
) -> TailVerdict:
    slope = estimate.fitted_slope if estimate is not None else None
    se = estimate.slope_stderr if estimate is not None else None
    lighter = diagnostic.non_power_law if diagnostic is not None else None
    base = {"condition": condition, "statistic": statistic, "fitted_slope": slope, "slope_stderr": se}
    base["non_power_law"] = lighter
    base["analytic_exponent"] = analytic

    if statistic is TailStatistic.CONDITION_NUMBER:
        threshold = req.kappa_threshold
        required = f"slope < −d(d−1) = {-threshold:g}"
        if analytic is not None and analytic <= threshold:
            return TailVerdict(
                **base, verdict=Verdict.FAIL, required=required, note=f"exact exponent {analytic:g} ≤ {threshold:g}"
            )
    elif statistic is TailStatistic.NORM_THETA:
        threshold = 2.0 * (req.r + 1.0)
        required = f"slope ≤ −2(r+1) = {-threshold:g}"
    elif statistic is TailStatistic.LAMBDA_MAX_INV:
        threshold = math.inf
        required = "faster than any power"
    else:
        threshold = 0.0
        required = "slope < 0"

    if statistic is TailStatistic.LAMBDA_MAX_INV:
        # only this condition asks for decay faster than any power
        if lighter:
            return TailVerdict(**base, verdict=Verdict.PASS, required=required, note="lighter than any power")
        note = "no fit window" if slope is None else "no slope steepening"
        return TailVerdict(**base, verdict=Verdict.INCONCLUSIVE, required=required, note=note)
    if slope is None or se is None:
        return TailVerdict(**base, verdict=Verdict.INCONCLUSIVE, required=required, note="no fit window")
    if statistic is TailStatistic.NORM_THETA:
        ok = slope <= -threshold + 3.0 * se
    else:
        ok = -slope + 3.0 * se > threshold
    return TailVerdict(**base, verdict=Verdict.PASS if ok else Verdict.FAIL, required=required)


def verify_tail_conditions(
    spec: BaseMeasureSpec,
    req: TailRequirements,
    budget: int,
    rng: np.random.Generator | int | None,
    workers: int = 1,
) -> TailVerificationReport:
    """Fit each of the four tail conditions by Monte Carlo and judge it at the 3σ level."""
    spec.ensure_valid()
    if req.d != spec.d:
        raise InputError(f"requirements are for d={req.d}, prior has d={spec.d}")
    if budget < MIN_SAMPLES:
        raise InputError(f"budget must be at least {MIN_SAMPLES}, got {budget}")
    master = seed_from(as_generator(rng))
    report = TailVerificationReport(
        d=spec.d, budget=budget, r_threshold_ok=req.location_ok, kappa_threshold_ok=req.condition_ok
    )
    analytic = analytic_condition_number_exponent(spec.covariance)
    for k, (condition, statistic) in enumerate(_CONDITIONS):
        source = spec.location if statistic is TailStatistic.NORM_THETA else spec.covariance
        values = draw_statistic(source, statistic, budget, int(stream(master, k).integers(2**63 - 1)), workers)
        grid = auto_grid(values)
        estimate = diagnostic = None
        if grid is not None:
            sorted_values = np.sort(values)
            hits = (values.size - np.searchsorted(sorted_values, grid, side="right")).astype(float)
            estimate = survival_from_counts(statistic, grid, hits, values.size)
            try:
                diagnostic = power_law_diagnostic(estimate)
            except EstimationError as exc:
                logger.debug(f"{condition}: {exc}")
        verdict = _judge(
            condition,
            statistic,
            estimate,
            diagnostic,
            req,
            analytic if statistic is TailStatistic.CONDITION_NUMBER else None,
        )
        if verdict.verdict is Verdict.INCONCLUSIVE:
            logger.warning(f"{condition}: inconclusive ({verdict.note})")
        report.verdicts.append(verdict)
    return report


# --------------------------------------------------------------------------- #
#  CSV persistence
# --------------------------------------------------------------------------- #
FOOTER_HEADER = ["slope", "slope_stderr", "analytic_exponent"]


def _cell(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def write_tail_csv(path: str | Path, t: TailEstimate, analytic_exponent: float | None = None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "survival", "stderr"])
        for row in zip(t.grid, t.survival, t.stderr, strict=True):
            writer.writerow([repr(float(v)) for v in row])
        writer.writerow(FOOTER_HEADER)
        writer.writerow([_cell(t.fitted_slope), _cell(t.slope_stderr), _cell(analytic_exponent)])


def read_tail_csv(path: str | Path) -> tuple[list[tuple[float, float, float]], dict[str, float | None]]:
    """Rows ``(x, survival, stderr)`` and the footer values."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    split = rows.index(FOOTER_HEADER)
    body = [(float(a), float(b), float(c)) for a, b, c in rows[1:split]]
    footer = {k: (float(v) if v else None) for k, v in zip(FOOTER_HEADER, rows[split + 1], strict=True)}
    return body, footer


__all__ = [
    "TailStatistic",
    "Verdict",
    "TailRequirements",
    "TailEstimate",
    "PowerLawDiagnostic",
    "TailVerdict",
    "TailVerificationReport",
    "statistic_sampler",
    "draw_statistic",
    "estimate_survival",
    "survival_from_counts",
    "fit_tail_exponent",
    "power_law_diagnostic",
    "analytic_condition_number_exponent",
    "auto_grid",
    "log_grid",
    "verify_tail_conditions",
    "write_tail_csv",
    "read_tail_csv",
]
