"""Regularity checks on a candidate true density f₀ before it is used in an experiment.

f₀ is restricted to Gaussian mixtures. Four conditions are checked:

* bounded:          0 < f₀ < M
* entropy:          |∫ f₀ log f₀| < ∞
* local log ratio:  ∫ f₀ log(f₀/φ_δ) < ∞ with φ_δ(x) = inf_{‖t−x‖<δ} f₀(t)
* moment:           ∫ ‖x‖^{2(1+η)} f₀ < ∞

The conditions are sufficient for consistency, not necessary; a report only states
which conditions hold.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer
from scipy.optimize import minimize

from .core_math import MixtureDensity, eval_mixture, mixture_log_grad, mixture_logpdf
from .distances import KL_CLIP, KL_MAX_CLIP_FRACTION
from .errors import EstimationError, InputError
from .random_streams import seed_from, stream

logger = logging.getLogger("DPMixtures.F0")

MIN_CHECK_BUDGET = 1_000
STABILITY_SIGMAS = 4.0
BALL_SHRINK = 1.0 - 1e-9
BALL_DESCENT_STEPS = 20


class F0Spec(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    density: MixtureDensity = Field(description="Candidate true density f₀")
    eta: float = Field(default=1.0, gt=0, description="Moment exponent η")
    delta: float = Field(default=0.5, gt=0, description="Localisation radius δ")
    M: float | None = Field(default=None, description="Claimed bound on sup f₀; only finiteness is checked if omitted")

    @field_serializer("density")
    def _density_to_dict(self, density: MixtureDensity) -> dict:
        return density.to_dict()


class CheckResult(BaseModel):
    name: str
    estimate: float
    stderr: float = 0.0
    passed: bool
    detail: str = ""


class F0Report(BaseModel):
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failing(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def get(self, name: str) -> CheckResult:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)


def _check_budget(budget: int) -> None:
    if budget < MIN_CHECK_BUDGET:
        raise InputError(f"budget must be at least {MIN_CHECK_BUDGET}, got {budget}")


def _stable_mean(name: str, values: np.ndarray) -> CheckResult:
    """Mean with stderr; passes when finite and the two halves of the sample agree."""
    if not np.all(np.isfinite(values)):
        return CheckResult(name=name, estimate=math.inf, stderr=math.inf, passed=False, detail="non-finite values")
    estimate = float(np.mean(values))
    stderr = float(np.std(values, ddof=1) / math.sqrt(values.size))
    first, second = np.array_split(values, 2)
    gap = abs(float(np.mean(first)) - float(np.mean(second)))
    spread = math.sqrt(float(np.var(first, ddof=1)) / first.size + float(np.var(second, ddof=1)) / second.size)
    stable = gap <= STABILITY_SIGMAS * spread or gap == 0.0
    detail = f"half-sample gap {gap:.3g} vs {STABILITY_SIGMAS:g}·{spread:.3g}"
    return CheckResult(name=name, estimate=estimate, stderr=stderr, passed=bool(stable), detail=detail)


def _clip_logs(values: np.ndarray, what: str) -> np.ndarray:
    values = np.where(np.isnan(values), -np.inf, values)
    clipped = int(np.sum(np.abs(values) > KL_CLIP))
    if clipped > KL_MAX_CLIP_FRACTION * values.size:
        raise EstimationError(f"{clipped} of {values.size} {what} values exceed ±{KL_CLIP}")
    return np.clip(values, -KL_CLIP, KL_CLIP)


# --------------------------------------------------------------------------- #
#  Checks
# --------------------------------------------------------------------------- #
def check_bounded(spec: F0Spec) -> CheckResult:
    """sup f₀ from the component means refined by local maximisation."""
    f = spec.density.normalized()

    def neg_log(x: np.ndarray) -> tuple[float, np.ndarray]:
        return -float(mixture_logpdf(x, f)), -mixture_log_grad(x, f)[0]

    best = 0.0
    for start in f.means:
        best = max(best, float(eval_mixture(start, f)))
        result = minimize(neg_log, start, jac=True, method="L-BFGS-B")
        if np.all(np.isfinite(result.x)):
            best = max(best, float(eval_mixture(result.x, f)))
    passed = math.isfinite(best) and best > 0.0 and (spec.M is None or best <= spec.M)
    detail = "no bound claimed" if spec.M is None else f"claimed M = {spec.M:g}"
    return CheckResult(name="bounded", estimate=best, passed=passed, detail=detail)


def check_entropy(spec: F0Spec, budget: int, rng: np.random.Generator) -> CheckResult:
    """∫ f₀ log f₀ as the mean of log f₀ over draws from f₀."""
    _check_budget(budget)
    f = spec.density.normalized()
    logs = _clip_logs(np.asarray(mixture_logpdf(f.sample(budget, rng), f)), "log-density")
    return _stable_mean("entropy", logs)


def _log_ball_minimum(points: np.ndarray, f: MixtureDensity, delta: float) -> np.ndarray:
    """log φ_δ on each row: a 2d + 1 stencil followed by projected normalised-gradient descent."""
    d = points.shape[1]
    radius = delta * BALL_SHRINK
    best = np.asarray(mixture_logpdf(points, f), dtype=float)
    best_pts = points.copy()
    for i in range(d):
        for sign in (1.0, -1.0):
            cand = points.copy()
            cand[:, i] += sign * radius
            values = np.asarray(mixture_logpdf(cand, f), dtype=float)
            better = values < best
            best = np.where(better, values, best)
            best_pts[better] = cand[better]
    current = best_pts.copy()
    for k in range(BALL_DESCENT_STEPS):
        grad = mixture_log_grad(current, f)
        norm = np.linalg.norm(grad, axis=1, keepdims=True)
        direction = np.divide(grad, norm, out=np.zeros_like(grad), where=norm > 0)
        current = current - radius / (k + 1) * direction
        offset = current - points
        length = np.linalg.norm(offset, axis=1, keepdims=True)
        current = points + offset * np.minimum(1.0, radius / np.maximum(length, 1e-300))
        values = np.asarray(mixture_logpdf(current, f), dtype=float)
        best = np.minimum(best, values)
    return best


def check_local_log_ratio(spec: F0Spec, budget: int, rng: np.random.Generator) -> CheckResult:
    """∫ f₀ log(f₀/φ_δ) over draws from f₀."""
    _check_budget(budget)
    f = spec.density.normalized()
    points = f.sample(budget, rng)
    log_f = np.asarray(mixture_logpdf(points, f), dtype=float)
    ratio = _clip_logs(log_f - _log_ball_minimum(points, f, spec.delta), "local log-ratio")
    result = _stable_mean("local_log_ratio", np.maximum(ratio, 0.0))
    return result.model_copy(update={"passed": math.isfinite(result.estimate)})


def check_moment(spec: F0Spec, budget: int, rng: np.random.Generator) -> CheckResult:
    """E‖X‖^{2(1+η)} under f₀."""
    _check_budget(budget)
    points = spec.density.normalized().sample(budget, rng)
    values = np.linalg.norm(points, axis=1) ** (2.0 * (1.0 + spec.eta))
    return _stable_mean("moment", values)


def check_f0(spec: F0Spec, budget: int, rng: np.random.Generator, workers: int = 1) -> F0Report:
    """All four conditions; the Monte Carlo checks use independent streams and may run concurrently."""
    seed = seed_from(rng)
    jobs = [
        lambda: check_entropy(spec, budget, stream(seed, 0)),
        lambda: check_local_log_ratio(spec, budget, stream(seed, 1)),
        lambda: check_moment(spec, budget, stream(seed, 2)),
    ]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        mc = list(pool.map(lambda job: job(), jobs))
    report = F0Report(checks=[check_bounded(spec), *mc])
    for check in report.checks:
        level = logging.INFO if check.passed else logging.WARNING
        logger.log(level, f"f0 check {check.name}: estimate {check.estimate:.6g} ({'pass' if check.passed else 'FAIL'})")
    return report


__all__ = [
    "F0Spec",
    "CheckResult",
    "F0Report",
    "check_bounded",
    "check_entropy",
    "check_local_log_ratio",
    "check_moment",
    "check_f0",
]
