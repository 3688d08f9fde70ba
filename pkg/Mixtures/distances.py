"""Hellinger, L1 and KL distances between Gaussian mixtures, and checks of the inequalities relating them.

Monte Carlo estimators draw a stratified sample from the defensive mixture
q = ½f + ½g (half the budget from each density). With a = f/q and b = g/q we have
a + b = 2, so the Hellinger integrand (√a − √b)² and the L1 integrand |a − b| both
lie in [0, 2] and the estimators have bounded variance.

Hellinger distance is d(f, g) = {∫(√f − √g)²}^{1/2} with range [0, √2].

Mixtures with a positive remainder mass are normalised before integration.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from enum import Enum

import numpy as np
from pydantic import BaseModel, Field
from scipy import integrate

from .core_math import GaussianComponent, MixtureDensity, SPDMatrix, mixture_logpdf
from .errors import EstimationError, InputError

logger = logging.getLogger("DPMixtures.Distances")

MIN_BUDGET = 10_000
KL_CLIP = 700.0
KL_MAX_CLIP_FRACTION = 1e-4
QUADRATURE_POINTS = 2001
QUADRATURE_HALF_WIDTH = 10.0
_SQRT2 = math.sqrt(2.0)


class Metric(str, Enum):
    HELLINGER = "hellinger"
    L1 = "l1"
    KL = "kl"


class DistanceMethod(str, Enum):
    MC_IMPORTANCE = "mc_importance"
    GRID_QUADRATURE = "grid_quadrature"
    CLOSED_FORM = "closed_form"


class DistanceEstimate(BaseModel):
    metric: Metric
    value: float = Field(ge=0.0)
    stderr: float = Field(ge=0.0)
    method: DistanceMethod
    n_evals: int


class CsiszarCheck(BaseModel):
    lhs: float = Field(description="‖f − g‖₁²")
    rhs: float = Field(description="2·KL(f‖g)")
    lhs_stderr: float
    rhs_stderr: float
    holds: bool


class SandwichCheck(BaseModel):
    hellinger: DistanceEstimate
    l1: DistanceEstimate
    lower_holds: bool = Field(description="d² ≤ ‖f − g‖₁")
    upper_holds: bool = Field(description="‖f − g‖₁ ≤ 2d")


def _prepare(f: MixtureDensity, g: MixtureDensity) -> tuple[MixtureDensity, MixtureDensity]:
    if f.dim != g.dim:
        raise InputError(f"dimension mismatch: {f.dim} vs {g.dim}")
    if f.remainder > 1e-12 or g.remainder > 1e-12:
        logger.debug(f"normalising truncated mixtures (remainders {f.remainder:.3e}, {g.remainder:.3e})")
    return f.normalized(), g.normalized()


def _check_budget(budget: int) -> None:
    if budget < MIN_BUDGET:
        raise InputError(f"budget must be at least {MIN_BUDGET}, got {budget}")


def _fingerprint(f: MixtureDensity) -> bytes:
    return b"".join([f.weights.tobytes()] + [c.mean.tobytes() + c.cov.entries.tobytes() for c in f.components])


class _DefensiveSample:
    """Density ratios a = f/q and b = g/q on the two strata of a q = ½f + ½g sample.

    The strata are drawn in a content-defined order, so swapping f and g reproduces the
    same points with a and b exchanged.
    """

    def __init__(self, f: MixtureDensity, g: MixtureDensity, budget: int, rng: np.random.Generator):
        first, second = (f, g) if _fingerprint(f) <= _fingerprint(g) else (g, f)
        n_first = budget // 2
        self.strata = []
        for points in (first.sample(n_first, rng), second.sample(budget - n_first, rng)):
            log_f = mixture_logpdf(points, f)
            log_g = mixture_logpdf(points, g)
            log_q = np.logaddexp(log_f, log_g) - math.log(2.0)
            self.strata.append((np.exp(log_f - log_q), np.exp(log_g - log_q)))
        self.n_evals = budget

    def mean_and_stderr(self, integrand) -> tuple[float, float]:
        values = [integrand(a, b) for a, b in self.strata]
        mean = 0.5 * sum(float(np.mean(v)) for v in values)
        var = 0.25 * sum(float(np.var(v, ddof=1)) / v.size for v in values)
        return mean, math.sqrt(var)


def _hellinger_integrand(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return 2.0 - 2.0 * np.sqrt(a * b)


def _l1_integrand(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.abs(a - b)


def _hellinger_from_squared(sq: float, sq_se: float, n_evals: int) -> DistanceEstimate:
    value = math.sqrt(max(sq, 0.0))
    stderr = sq_se / (2.0 * value) if value > 0 else math.sqrt(sq_se)
    return DistanceEstimate(
        metric=Metric.HELLINGER,
        value=min(value, _SQRT2),
        stderr=stderr,
        method=DistanceMethod.MC_IMPORTANCE,
        n_evals=n_evals,
    )


def hellinger(f: MixtureDensity, g: MixtureDensity, budget: int, rng: np.random.Generator) -> DistanceEstimate:
    """d(f, g) via d² = 2 − 2∫√(fg) estimated under the defensive mixture."""
    f, g = _prepare(f, g)
    _check_budget(budget)
    sample = _DefensiveSample(f, g, budget, rng)
    sq, sq_se = sample.mean_and_stderr(_hellinger_integrand)
    return _hellinger_from_squared(sq, sq_se, budget)


def l1_distance(f: MixtureDensity, g: MixtureDensity, budget: int, rng: np.random.Generator) -> DistanceEstimate:
    """‖f − g‖₁ = E_q|a − b| under the defensive mixture."""
    f, g = _prepare(f, g)
    _check_budget(budget)
    sample = _DefensiveSample(f, g, budget, rng)
    value, stderr = sample.mean_and_stderr(_l1_integrand)
    return DistanceEstimate(
        metric=Metric.L1, value=min(value, 2.0), stderr=stderr, method=DistanceMethod.MC_IMPORTANCE, n_evals=budget
    )


def kl_mc(f: MixtureDensity, g: MixtureDensity, budget: int, rng: np.random.Generator) -> DistanceEstimate:
    """KL(f‖g) as the average of log(f/g) over draws from f.

    Log ratios are clipped to ±KL_CLIP; more than KL_MAX_CLIP_FRACTION clipped samples
    is an ``EstimationError``.
    """
    f, g = _prepare(f, g)
    _check_budget(budget)
    points = f.sample(budget, rng)
    with np.errstate(invalid="ignore"):
        ratio = mixture_logpdf(points, f) - mixture_logpdf(points, g)
    ratio = np.where(np.isnan(ratio), np.inf, ratio)
    clipped = int(np.sum(np.abs(ratio) > KL_CLIP))
    if clipped > KL_MAX_CLIP_FRACTION * budget:
        raise EstimationError(f"{clipped} of {budget} log ratios exceed ±{KL_CLIP}; g does not cover f")
    if clipped:
        logger.debug(f"kl_mc clipped {clipped} log ratios")
    ratio = np.clip(ratio, -KL_CLIP, KL_CLIP)
    return DistanceEstimate(
        metric=Metric.KL,
        value=max(float(np.mean(ratio)), 0.0),
        stderr=float(np.std(ratio, ddof=1) / math.sqrt(budget)),
        method=DistanceMethod.MC_IMPORTANCE,
        n_evals=budget,
    )


def estimate_distance(
    metric: Metric | str, f: MixtureDensity, g: MixtureDensity, budget: int, rng: np.random.Generator
) -> DistanceEstimate:
    return _ESTIMATORS[Metric(metric)](f, g, budget, rng)


_ESTIMATORS = {Metric.HELLINGER: hellinger, Metric.L1: l1_distance, Metric.KL: kl_mc}


# --------------------------------------------------------------------------- #
#  Closed forms and quadrature references
# --------------------------------------------------------------------------- #
def gaussian_hellinger(c1: GaussianComponent, c2: GaussianComponent) -> float:
    """√(2 − 2·BC) with the Gaussian Bhattacharyya coefficient BC."""
    avg = SPDMatrix(0.5 * (c1.cov.entries + c2.cov.entries))
    delta = c1.mean - c2.mean
    distance = 0.125 * float(delta @ avg.solve(delta))
    distance += 0.5 * (avg.log_det - 0.5 * (c1.cov.log_det + c2.cov.log_det))
    return math.sqrt(max(0.0, 2.0 - 2.0 * math.exp(-distance)))


def gaussian_kl(c1: GaussianComponent, c2: GaussianComponent) -> float:
    """KL(N(θ₁, Σ₁) ‖ N(θ₂, Σ₂))."""
    delta = c2.mean - c1.mean
    trace_term = float(np.trace(c2.cov.solve(c1.cov.entries)))
    quad = float(delta @ c2.cov.solve(delta))
    return max(0.0, 0.5 * (trace_term + quad - c1.dim + c2.cov.log_det - c1.cov.log_det))


def _axis_range(f: MixtureDensity, g: MixtureDensity, axis: int) -> tuple[float, float]:
    comps = f.components + g.components
    lo = min(c.mean[axis] - QUADRATURE_HALF_WIDTH * math.sqrt(c.cov.entries[axis, axis]) for c in comps)
    hi = max(c.mean[axis] + QUADRATURE_HALF_WIDTH * math.sqrt(c.cov.entries[axis, axis]) for c in comps)
    return lo, hi


def _pointwise(metric: Metric, log_f: np.ndarray, log_g: np.ndarray) -> np.ndarray:
    if metric is Metric.HELLINGER:
        return (np.exp(0.5 * log_f) - np.exp(0.5 * log_g)) ** 2
    if metric is Metric.L1:
        return np.abs(np.exp(log_f) - np.exp(log_g))
    return np.exp(log_f) * (log_f - log_g)


def grid_quadrature(
    f: MixtureDensity, g: MixtureDensity, metric: Metric | str, points: int = QUADRATURE_POINTS
) -> DistanceEstimate:
    """Tensor-grid trapezoid reference value for d ≤ 2."""
    metric = Metric(metric)
    f, g = _prepare(f, g)
    if f.dim > 2:
        raise InputError(f"grid quadrature supports d ≤ 2, got d = {f.dim}")
    axes = [np.linspace(*_axis_range(f, g, k), points) for k in range(f.dim)]
    if f.dim == 1:
        pts = axes[0][:, None]
        total = float(integrate.trapezoid(_pointwise(metric, mixture_logpdf(pts, f), mixture_logpdf(pts, g)), axes[0]))
    else:
        x_axis, y_axis = axes
        inner = np.empty(points)
        for i, x in enumerate(x_axis):
            pts = np.column_stack([np.full(points, x), y_axis])
            values = _pointwise(metric, mixture_logpdf(pts, f), mixture_logpdf(pts, g))
            inner[i] = integrate.trapezoid(values, y_axis)
        total = float(integrate.trapezoid(inner, x_axis))
    value = math.sqrt(max(total, 0.0)) if metric is Metric.HELLINGER else max(total, 0.0)
    return DistanceEstimate(
        metric=metric, value=value, stderr=0.0, method=DistanceMethod.GRID_QUADRATURE, n_evals=points**f.dim
    )


# --------------------------------------------------------------------------- #
#  Inequality checks
# --------------------------------------------------------------------------- #
def _component_l1_bound(c1: GaussianComponent, c2: GaussianComponent) -> float:
    d = c1.dim
    location = math.sqrt(2.0 / math.pi) * float(np.linalg.norm(c1.mean - c2.mean)) / math.sqrt(c2.cov.min_eig)
    x = c1.cov.eigvals / c2.cov.eigvals
    spectrum = math.sqrt(max(0.0, float(np.sum(x - np.log(x) - 1.0))))
    rotation_gap = float(np.linalg.norm(c1.cov.eigvecs - c2.cov.eigvecs, ord=2))
    rotation = math.sqrt(2.0 * d * rotation_gap * c1.cov.max_eig / c1.cov.min_eig)
    return location + spectrum + rotation


def l1_mixture_upper_bound(f: MixtureDensity, g: MixtureDensity, pairing: Sequence[int], H: int) -> float:
    """Upper bound on ‖f − g‖₁ from pairing component h of f with component ``pairing[h]`` of g, h < H.

    Sum of π_h^f times the per-component location/spectrum/rotation terms, the weight
    differences of paired components, and all unpaired mass (remainders included).
    """
    if f.dim != g.dim:
        raise InputError(f"dimension mismatch: {f.dim} vs {g.dim}")
    if not 0 <= H <= f.size:
        raise InputError(f"H must lie in [0, {f.size}], got {H}")
    if len(pairing) < H:
        raise InputError(f"pairing covers {len(pairing)} components, H = {H}")
    paired = [int(j) for j in pairing[:H]]
    if any(not 0 <= j < g.size for j in paired):
        raise InputError(f"pairing index out of range for a mixture of {g.size} components")
    if len(set(paired)) != len(paired):
        raise InputError("pairing maps two components of f to the same component of g")

    total = 0.0
    for h, j in enumerate(paired):
        total += f.weights[h] * _component_l1_bound(f.components[h], g.components[j])
        total += abs(f.weights[h] - g.weights[j])
    unpaired_g = [j for j in range(g.size) if j not in set(paired)]
    total += float(np.sum(f.weights[H:])) + f.remainder
    total += float(np.sum(g.weights[unpaired_g])) + g.remainder
    return float(total)


def sandwich_check(f: MixtureDensity, g: MixtureDensity, budget: int, rng: np.random.Generator) -> SandwichCheck:
    """d² ≤ ‖f − g‖₁ ≤ 2d evaluated on one shared defensive sample."""
    f, g = _prepare(f, g)
    _check_budget(budget)
    sample = _DefensiveSample(f, g, budget, rng)
    sq, sq_se = sample.mean_and_stderr(_hellinger_integrand)
    hell = _hellinger_from_squared(sq, sq_se, budget)
    l1_value, l1_se = sample.mean_and_stderr(_l1_integrand)
    l1 = DistanceEstimate(
        metric=Metric.L1, value=min(l1_value, 2.0), stderr=l1_se, method=DistanceMethod.MC_IMPORTANCE, n_evals=budget
    )
    # |a − b| ≥ (√a − √b)² pointwise, so the lower inequality is exact on any sample
    gap, gap_se = sample.mean_and_stderr(lambda a, b: _l1_integrand(a, b) - _hellinger_integrand(a, b))
    lower = gap >= -3.0 * gap_se
    upper = l1.value - 2.0 * hell.value <= 3.0 * math.hypot(l1.stderr, 2.0 * hell.stderr)
    return SandwichCheck(hellinger=hell, l1=l1, lower_holds=bool(lower), upper_holds=bool(upper))


def csiszar_check(f: MixtureDensity, g: MixtureDensity, budget: int, rng: np.random.Generator) -> CsiszarCheck:
    """‖f − g‖₁² ≤ 2·KL(f‖g) within three combined standard errors."""
    l1 = l1_distance(f, g, budget, rng)
    kl = kl_mc(f, g, budget, rng)
    lhs, rhs = l1.value**2, 2.0 * kl.value
    lhs_se, rhs_se = 2.0 * l1.value * l1.stderr, 2.0 * kl.stderr
    holds = lhs <= rhs + 3.0 * math.hypot(lhs_se, rhs_se)
    return CsiszarCheck(lhs=lhs, rhs=rhs, lhs_stderr=lhs_se, rhs_stderr=rhs_se, holds=bool(holds))


__all__ = [
    "Metric",
    "DistanceMethod",
    "DistanceEstimate",
    "CsiszarCheck",
    "SandwichCheck",
    "hellinger",
    "l1_distance",
    "kl_mc",
    "estimate_distance",
    "gaussian_hellinger",
    "gaussian_kl",
    "grid_quadrature",
    "l1_mixture_upper_bound",
    "sandwich_check",
    "csiszar_check",
]
