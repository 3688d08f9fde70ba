"""Gaussian and mixture densities, SPD matrix algebra and eigen-structure.

Every other module builds on the value types defined here:

* ``SPDMatrix`` - a validated covariance with a lower Cholesky factor and a lazily
  cached, descending eigendecomposition.
* ``GaussianComponent`` - a (mean, covariance) pair.
* ``MixtureDensity`` - a truncated mixture whose weights may leave a remainder mass.
* ``StickBreaking`` - the stick proportions behind a truncated Dirichlet process draw.

Densities are evaluated through triangular solves against the Cholesky factor; the
inverse of a covariance is never formed for evaluation.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Any

import numpy as np
from scipy import linalg
from scipy.special import logsumexp

from .errors import DomainError, InputError, ParameterError

logger = logging.getLogger("DPMixtures.CoreMath")

SYMMETRY_RTOL = 1e-12
WEIGHT_SUM_TOL = 1e-12
_LOG_2PI = float(np.log(2.0 * np.pi))


# --------------------------------------------------------------------------- #
#  SPD matrices
# --------------------------------------------------------------------------- #
def _square_array(entries: Any) -> np.ndarray:
    arr = np.array(entries, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise InputError(f"expected a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("matrix has non-finite entries")
    return arr


@dataclass(frozen=True, eq=False)
class SPDMatrix:
    """Symmetric positive-definite matrix.

    Construction symmetrises ``entries`` when the asymmetry is within
    ``SYMMETRY_RTOL`` (relative to the largest entry) and rejects anything larger.
    Eigenvalues are sorted descending; eigenvectors carry the sign convention
    "first nonzero entry positive" so the orthogonal factor is deterministic.
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = _square_array(self.entries)
        scale = float(np.max(np.abs(arr)))
        asymmetry = float(np.max(np.abs(arr - arr.T)))
        if asymmetry > SYMMETRY_RTOL * scale:
            raise DomainError(f"matrix is not symmetric (max asymmetry {asymmetry:.3e})")
        arr = 0.5 * (arr + arr.T)
        try:
            chol = linalg.cholesky(arr, lower=True)
        except linalg.LinAlgError as exc:
            raise DomainError("matrix is not positive definite") from exc
        arr.setflags(write=False)
        chol.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "_chol", chol)

    @classmethod
    def identity(cls, d: int) -> SPDMatrix:
        return cls(np.eye(d))

    @classmethod
    def diagonal(cls, values: Sequence[float]) -> SPDMatrix:
        return cls(np.diag(np.asarray(values, dtype=float)))

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @property
    def cholesky(self) -> np.ndarray:
        """Lower-triangular factor L with L Lᵀ = entries."""
        return self._chol  # type: ignore[attr-defined]

    @cached_property
    def log_det(self) -> float:
        return float(2.0 * np.sum(np.log(np.diag(self.cholesky))))

    @cached_property
    def _spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        vals, vecs = linalg.eigh(self.entries)
        order = np.argsort(-vals, kind="stable")
        vals = vals[order]
        vecs = vecs[:, order]
        if vals[-1] <= 0.0:
            raise DomainError(f"smallest eigenvalue {vals[-1]:.3e} is not positive")
        nonzero = np.abs(vecs) > 1e-12
        first = np.argmax(nonzero, axis=0)
        signs = np.sign(vecs[first, np.arange(vecs.shape[1])])
        signs[signs == 0] = 1.0
        vecs = vecs * signs
        vals.setflags(write=False)
        vecs.setflags(write=False)
        return vals, vecs

    @property
    def eigvals(self) -> np.ndarray:
        """Eigenvalues λ_1 ≥ … ≥ λ_d."""
        return self._spectrum[0]

    @property
    def eigvecs(self) -> np.ndarray:
        """Orthogonal factor O with entries = O diag(eigvals) Oᵀ."""
        return self._spectrum[1]

    @property
    def max_eig(self) -> float:
        return float(self.eigvals[0])

    @property
    def min_eig(self) -> float:
        return float(self.eigvals[-1])

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return linalg.cho_solve((self.cholesky, True), rhs)

    def inverse(self) -> SPDMatrix:
        inv = self.solve(np.eye(self.dim))
        return SPDMatrix(0.5 * (inv + inv.T))

    def trace(self) -> float:
        return float(np.trace(self.entries))

    def to_list(self) -> list[list[float]]:
        return self.entries.tolist()

    def __repr__(self) -> str:
        return f"SPDMatrix(dim={self.dim}, entries={self.entries.tolist()!r})"


def as_spd(m: SPDMatrix | Any) -> SPDMatrix:
    return m if isinstance(m, SPDMatrix) else SPDMatrix(np.asarray(m, dtype=float))


def ordered_eigvals(m: SPDMatrix | Any) -> np.ndarray:
    """Eigenvalues of ``m`` in descending order."""
    return as_spd(m).eigvals


def condition_number(m: SPDMatrix | Any) -> float:
    """λ_1/λ_d; identical for the matrix and its inverse."""
    vals = ordered_eigvals(m)
    return float(vals[0] / vals[-1])


def spectral_reconstruction_error(m: SPDMatrix) -> float:
    """Relative Frobenius error of O diag(λ) Oᵀ against the stored entries."""
    rebuilt = (m.eigvecs * m.eigvals) @ m.eigvecs.T
    return float(np.linalg.norm(rebuilt - m.entries) / np.linalg.norm(m.entries))


def kl_zero_mean(s1: SPDMatrix | Any, s2: SPDMatrix | Any) -> float:
    """½(tr(Σ₁⁻¹Σ₂) − log det(Σ₁⁻¹Σ₂) − d), the KL divergence of N(0, Σ₂) from N(0, Σ₁)."""
    s1, s2 = as_spd(s1), as_spd(s2)
    if s1.dim != s2.dim:
        raise InputError(f"dimension mismatch: {s1.dim} vs {s2.dim}")
    trace_term = float(np.trace(s1.solve(s2.entries)))
    value = 0.5 * (trace_term - (s2.log_det - s1.log_det) - s1.dim)
    return max(0.0, value)


# --------------------------------------------------------------------------- #
#  Gaussian components
# --------------------------------------------------------------------------- #
@dataclass(frozen=True, eq=False)
class GaussianComponent:
    mean: np.ndarray
    cov: SPDMatrix

    def __post_init__(self) -> None:
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = as_spd(self.cov)
        if mean.shape[0] != cov.dim:
            raise InputError(f"mean has dimension {mean.shape[0]} but covariance has {cov.dim}")
        if not np.all(np.isfinite(mean)):
            raise InputError("mean has non-finite entries")
        mean.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.cov.dim

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        z = rng.standard_normal((n, self.dim))
        return self.mean + z @ self.cov.cholesky.T


def _points(x: Any, d: int) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
        single = True
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1)
        single = True
    elif arr.ndim == 2:
        single = False
    else:
        raise InputError(f"points must be a vector or an (n, d) array, got shape {arr.shape}")
    if arr.shape[1] != d:
        raise InputError(f"dimension mismatch: points have {arr.shape[1]} coordinates, density has {d}")
    return arr, single


def log_gaussian(x: Any, c: GaussianComponent) -> np.ndarray | float:
    """log φ_Σ(x − θ) for a single point or each row of an (n, d) array."""
    pts, single = _points(x, c.dim)
    z = linalg.solve_triangular(c.cov.cholesky, (pts - c.mean).T, lower=True)
    out = -0.5 * c.dim * _LOG_2PI - 0.5 * c.cov.log_det - 0.5 * np.sum(z * z, axis=0)
    return float(out[0]) if single else out


def eval_gaussian(x: Any, c: GaussianComponent) -> np.ndarray | float:
    return np.exp(log_gaussian(x, c))


# --------------------------------------------------------------------------- #
#  Mixtures
# --------------------------------------------------------------------------- #
@dataclass(frozen=True, eq=False)
class MixtureDensity:
    """Truncated Gaussian mixture; ``remainder`` = 1 − Σ weights is carried, not renormalised."""

    weights: np.ndarray
    components: tuple[GaussianComponent, ...]

    def __post_init__(self) -> None:
        weights = np.array(self.weights, dtype=float).reshape(-1)
        components = tuple(self.components)
        if not components:
            raise InputError("a mixture needs at least one component")
        if weights.shape[0] != len(components):
            raise InputError(f"{weights.shape[0]} weights for {len(components)} components")
        if np.any(~np.isfinite(weights)) or np.any(weights < 0.0):
            raise InputError("mixture weights must be finite and nonnegative")
        if weights.sum() > 1.0 + WEIGHT_SUM_TOL:
            raise InputError(f"mixture weights sum to {weights.sum():.15g} > 1")
        dims = {c.dim for c in components}
        if len(dims) != 1:
            raise InputError(f"components have differing dimensions {sorted(dims)}")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "components", components)

    @classmethod
    def single(cls, mean: Any, cov: Any) -> MixtureDensity:
        return cls(np.ones(1), (GaussianComponent(np.asarray(mean, dtype=float), as_spd(cov)),))

    @property
    def dim(self) -> int:
        return self.components[0].dim

    @property
    def size(self) -> int:
        return len(self.components)

    @property
    def remainder(self) -> float:
        return max(0.0, 1.0 - float(self.weights.sum()))

    @property
    def means(self) -> np.ndarray:
        return np.stack([c.mean for c in self.components])

    def normalized(self) -> MixtureDensity:
        """The same mixture with weights rescaled to sum to one."""
        total = float(self.weights.sum())
        if total <= 0.0:
            raise InputError("cannot normalise a mixture with zero total weight")
        if abs(total - 1.0) <= WEIGHT_SUM_TOL:
            return self
        return MixtureDensity(self.weights / total, self.components)

    def merge(self, other: MixtureDensity, beta: float) -> MixtureDensity:
        """β·self + (1−β)·other as a single mixture."""
        if not 0.0 <= beta <= 1.0:
            raise ParameterError(f"merge weight must lie in [0, 1], got {beta}")
        if other.dim != self.dim:
            raise InputError(f"dimension mismatch: {self.dim} vs {other.dim}")
        weights = np.concatenate([beta * self.weights, (1.0 - beta) * other.weights])
        return MixtureDensity(np.minimum(weights, 1.0), self.components + other.components)

    def with_component(self, weight: float, component: GaussianComponent) -> MixtureDensity:
        return MixtureDensity(np.append(self.weights, weight), self.components + (component,))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """n draws from the normalised mixture, in random order."""
        probs = self.normalized().weights
        counts = rng.multinomial(n, probs / probs.sum())
        parts = [c.sample(int(k), rng) for c, k in zip(self.components, counts, strict=True) if k > 0]
        draws = np.concatenate(parts, axis=0) if parts else np.empty((0, self.dim))
        return draws[rng.permutation(draws.shape[0])]

    def to_dict(self) -> dict[str, Any]:
        return {
            "weights": self.weights.tolist(),
            "means": [c.mean.tolist() for c in self.components],
            "covs": [c.cov.to_list() for c in self.components],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> MixtureDensity:
        try:
            weights, means, covs = data["weights"], data["means"], data["covs"]
        except KeyError as exc:
            raise InputError(f"mixture JSON is missing key {exc.args[0]!r}") from exc
        if not len(weights) == len(means) == len(covs):
            raise InputError("mixture JSON lists 'weights', 'means' and 'covs' differ in length")
        comps = tuple(GaussianComponent(np.asarray(m, dtype=float), as_spd(c)) for m, c in zip(means, covs, strict=True))
        return cls(np.asarray(weights, dtype=float), comps)


def _component_logs(x: Any, f: MixtureDensity) -> tuple[np.ndarray, bool]:
    pts, single = _points(x, f.dim)
    with np.errstate(divide="ignore"):
        log_w = np.log(f.weights)
    logs = np.stack([log_gaussian(pts, c) for c in f.components]) + log_w[:, None]
    return logs, single


def mixture_logpdf(x: Any, f: MixtureDensity) -> np.ndarray | float:
    """log Σ_h π_h φ_{Σ_h}(x − θ_h); the remainder mass contributes nothing."""
    logs, single = _component_logs(x, f)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = logsumexp(logs, axis=0)
    return float(out[0]) if single else out


def eval_mixture(x: Any, f: MixtureDensity) -> np.ndarray | float:
    return np.exp(mixture_logpdf(x, f))


def mixture_log_grad(x: Any, f: MixtureDensity) -> np.ndarray:
    """Gradient of log f at each row of ``x`` (shape (n, d))."""
    pts, _ = _points(x, f.dim)
    logs, _ = _component_logs(pts, f)
    with np.errstate(divide="ignore", invalid="ignore"):
        resp = np.exp(logs - logsumexp(logs, axis=0))
    grad = np.zeros_like(pts)
    for h, c in enumerate(f.components):
        grad -= resp[h][:, None] * c.cov.solve((pts - c.mean).T).T
    return grad


# --------------------------------------------------------------------------- #
#  Stick-breaking
# --------------------------------------------------------------------------- #
_STICK_LOW = float(np.finfo(float).tiny)
_STICK_HIGH = float(np.nextafter(1.0, 0.0))


def stick_weights(sticks: np.ndarray) -> np.ndarray:
    """π_h = V_h ∏_{k<h}(1 − V_k)."""
    v = np.asarray(sticks, dtype=float)
    left = np.concatenate([[1.0], np.cumprod(1.0 - v)[:-1]])
    return v * left


@dataclass(frozen=True, eq=False)
class StickBreaking:
    sticks: np.ndarray
    alpha: float

    def __post_init__(self) -> None:
        sticks = np.array(self.sticks, dtype=float).reshape(-1)
        if sticks.size < 1:
            raise ParameterError("stick-breaking needs at least one stick")
        if np.any(sticks <= 0.0) or np.any(sticks >= 1.0):
            raise ParameterError("sticks must lie strictly inside (0, 1)")
        if not self.alpha > 0:
            raise ParameterError(f"DP mass must be positive, got {self.alpha}")
        sticks.setflags(write=False)
        object.__setattr__(self, "sticks", sticks)

    @classmethod
    def draw(cls, alpha: float, truncation: int, rng: np.random.Generator) -> StickBreaking:
        if truncation < 1:
            raise ParameterError(f"truncation must be at least 1, got {truncation}")
        if not alpha > 0:
            raise ParameterError(f"DP mass must be positive, got {alpha}")
        v = np.clip(rng.beta(1.0, alpha, size=truncation), _STICK_LOW, _STICK_HIGH)
        return cls(v, alpha)

    @property
    def truncation(self) -> int:
        return int(self.sticks.shape[0])

    def weights(self) -> np.ndarray:
        return stick_weights(self.sticks)

    @property
    def remainder(self) -> float:
        return float(np.prod(1.0 - self.sticks))


def clip_sticks(v: np.ndarray) -> np.ndarray:
    return np.clip(v, _STICK_LOW, _STICK_HIGH)


__all__ = [
    "SPDMatrix",
    "GaussianComponent",
    "MixtureDensity",
    "StickBreaking",
    "as_spd",
    "ordered_eigvals",
    "condition_number",
    "spectral_reconstruction_error",
    "kl_zero_mean",
    "log_gaussian",
    "eval_gaussian",
    "mixture_logpdf",
    "eval_mixture",
    "mixture_log_grad",
    "stick_weights",
    "clip_sticks",
]
