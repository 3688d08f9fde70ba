"""Base-measure priors: location priors, the four covariance families and stick-breaking draws.

The parameter models are pydantic models so they can be read from TOML configs and
embedded in run manifests. They only check types on construction; the domain
constraints a sampler needs are enforced by ``ensure_valid()``, which raises
``ParameterError``. That way a constraint-violating spec can still be built and passed
to ``check_consistency_constraints`` for a report.

Conventions:
    IW(Ψ, ν)  means  Σ⁻¹ ~ Wishart(Ψ⁻¹, ν), so E[Σ⁻¹] = νΨ⁻¹.
    Ga(a, b)  is shape/rate.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Annotated, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import linalg

from .core_math import GaussianComponent, MixtureDensity, SPDMatrix, StickBreaking
from .errors import ParameterError

logger = logging.getLogger("DPMixtures.Priors")

MGP_LOCAL_SHAPE = 1.5
MGP_LOCAL_RATE = 1.5
ROTATOR_UNIFORM_KAPPA_MAX = 20.0


class CovarianceFamily(str, Enum):
    IW = "iw"
    FACTOR = "factor"
    MGP = "mgp"
    SPECTRAL = "spectral"


class LocationKind(str, Enum):
    HIERARCHICAL = "hierarchical"
    FIXED = "fixed"


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def _matrix_or_identity(entries: list[list[float]] | None, d: int, what: str) -> SPDMatrix:
    if entries is None:
        return SPDMatrix.identity(d)
    m = SPDMatrix(np.asarray(entries, dtype=float))
    if m.dim != d:
        raise ParameterError(f"{what} has dimension {m.dim}, expected {d}")
    return m


class _PriorModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# --------------------------------------------------------------------------- #
#  Parameter models
# --------------------------------------------------------------------------- #
class IWParams(_PriorModel):
    family: Literal["iw"] = "iw"
    d: int = Field(ge=1, description="Dimension of Σ")
    nu: float = Field(description="Degrees of freedom ν; proper for ν > d − 1")
    scale: list[list[float]] | None = Field(default=None, description="Scale Σ₀; identity when omitted")

    def ensure_valid(self) -> None:
        if not self.nu > self.d - 1:
            raise ParameterError(f"inverse-Wishart needs ν > d − 1 = {self.d - 1}, got ν = {self.nu}")
        self.scale_matrix()

    def scale_matrix(self) -> SPDMatrix:
        return _matrix_or_identity(self.scale, self.d, "IW scale")


class FactorParams(_PriorModel):
    family: Literal["factor"] = "factor"
    d: int = Field(ge=1, description="Dimension of Σ")
    rank: int = Field(description="Number of factors r_f, 1 ≤ r_f < d")
    a: float = Field(description="Gamma shape of the residual precisions σ_j⁻²")
    b: float = Field(description="Gamma rate of the residual precisions σ_j⁻²")

    def ensure_valid(self) -> None:
        if not 1 <= self.rank < self.d:
            raise ParameterError(f"factor rank must satisfy 1 ≤ r_f < d = {self.d}, got {self.rank}")
        _check_gamma(self.a, self.b, "residual precision")


class MGPParams(_PriorModel):
    family: Literal["mgp"] = "mgp"
    d: int = Field(ge=1, description="Dimension of Σ")
    rank: int = Field(description="Number of factors r_f")
    a1: float = Field(description="Gamma shape of δ_1")
    a2: float = Field(description="Gamma shape of δ_l, l ≥ 2")
    a: float = Field(description="Gamma shape of the residual precisions")
    b: float = Field(description="Gamma rate of the residual precisions")

    def ensure_valid(self) -> None:
        if self.rank < 1:
            raise ParameterError(f"MGP rank must be at least 1, got {self.rank}")
        if not (self.a1 > 0 and self.a2 > 0):
            raise ParameterError(f"MGP shapes must be positive, got a1={self.a1}, a2={self.a2}")
        _check_gamma(self.a, self.b, "residual precision")


class SpectralParams(_PriorModel):
    family: Literal["spectral"] = "spectral"
    d: int = Field(ge=1, description="Dimension of Σ")
    a: float = Field(description="Gamma shape of the eigenvalue precisions λ_i⁻¹")
    b: float = Field(description="Gamma rate of the eigenvalue precisions λ_i⁻¹")
    beta_pi2: float = Field(default=0.0, description="Probability of a rotator angle at π/2")
    beta_0: float = Field(default=0.0, description="Probability of an angle at 0 given it is not at π/2")
    kappa_rot: float = Field(default=0.0, description="Concentration κ of the continuous angle part")

    def ensure_valid(self) -> None:
        _check_gamma(self.a, self.b, "eigenvalue precision")
        for name, value in (("beta_pi2", self.beta_pi2), ("beta_0", self.beta_0)):
            if not 0.0 <= value <= 1.0:
                raise ParameterError(f"{name} must lie in [0, 1], got {value}")
        if self.kappa_rot < 0:
            raise ParameterError(f"kappa_rot must be nonnegative, got {self.kappa_rot}")

    @property
    def n_angles(self) -> int:
        return self.d * (self.d - 1) // 2


CovariancePrior = Annotated[IWParams | FactorParams | MGPParams | SpectralParams, Field(discriminator="family")]


def _check_gamma(a: float, b: float, what: str) -> None:
    if not (a > 0 and b > 0):
        raise ParameterError(f"{what} gamma needs positive shape and rate, got a={a}, b={b}")


class LocationPriorSpec(_PriorModel):
    """θ | B ~ N(m, B) with B ~ IW(B₀, ν_B + d − 1) (hierarchical) or B fixed.

    The hyperprior dof is offset by d − 1 so that θ is marginally Student-t with ν_B
    degrees of freedom.
    """

    d: int = Field(ge=1, description="Dimension of θ")
    kind: LocationKind = Field(default=LocationKind.HIERARCHICAL)
    mean: list[float] | None = Field(default=None, description="Prior mean m; zero when omitted")
    nu_b: float | None = Field(
        default=None, description="Marginal Student-t degrees of freedom ν_B; 2d + 3 when omitted"
    )
    scale: list[list[float]] | None = Field(default=None, description="B₀ (hierarchical) or B (fixed); identity")

    def ensure_valid(self) -> None:
        if self.kind is LocationKind.HIERARCHICAL and not self.nu_b_value > self.d - 1:
            raise ParameterError(f"location IW needs ν_B > d − 1 = {self.d - 1}, got {self.nu_b_value}")
        self.mean_vector()
        self.scale_matrix()

    @property
    def nu_b_value(self) -> float:
        return float(self.nu_b) if self.nu_b is not None else 2.0 * self.d + 3.0

    def mean_vector(self) -> np.ndarray:
        if self.mean is None:
            return np.zeros(self.d)
        m = np.asarray(self.mean, dtype=float)
        if m.shape != (self.d,):
            raise ParameterError(f"location mean has shape {m.shape}, expected ({self.d},)")
        return m

    def scale_matrix(self) -> SPDMatrix:
        return _matrix_or_identity(self.scale, self.d, "location scale")

    @property
    def hyper_dof(self) -> float:
        """Degrees of freedom of the inverse-Wishart hyperprior on B."""
        return self.nu_b_value + self.d - 1.0

    @property
    def marginal_dof(self) -> float:
        """Degrees of freedom of the Student-t marginal of θ (infinite for fixed B)."""
        if self.kind is LocationKind.FIXED:
            return math.inf
        return self.nu_b_value

    @property
    def tail_r(self) -> float:
        """Largest r with P(‖θ‖ > x) ≲ x^{−2(r+1)}."""
        return self.marginal_dof / 2.0 - 1.0


class BaseMeasureSpec(_PriorModel):
    location: LocationPriorSpec
    covariance: CovariancePrior

    @model_validator(mode="after")
    def _dims_agree(self) -> BaseMeasureSpec:
        if self.location.d != self.covariance.d:
            raise ValueError(f"location dimension {self.location.d} != covariance dimension {self.covariance.d}")
        return self

    @property
    def d(self) -> int:
        return self.covariance.d

    def ensure_valid(self) -> None:
        self.location.ensure_valid()
        self.covariance.ensure_valid()


# --------------------------------------------------------------------------- #
#  Draw records with auxiliaries
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class FactorDraw:
    loadings: np.ndarray
    residual_precisions: np.ndarray
    cov: SPDMatrix

    @property
    def omega(self) -> np.ndarray:
        return np.diag(1.0 / self.residual_precisions)


@dataclass(frozen=True)
class MGPDraw(FactorDraw):
    """Factor draw plus the shrinkage state φ_jh (local) and δ_l (global)."""

    local_precisions: np.ndarray
    global_shrinkage: np.ndarray

    @property
    def tau(self) -> np.ndarray:
        return np.cumprod(self.global_shrinkage)


@dataclass(frozen=True)
class SpectralDraw:
    angles: np.ndarray
    rotation: np.ndarray
    eigenvalues: np.ndarray
    cov: SPDMatrix


# --------------------------------------------------------------------------- #
#  Batch samplers (used directly by the tail estimators)
# --------------------------------------------------------------------------- #
def _wishart_factor_batch(scale_inv_chol: np.ndarray, nu: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Bartlett factors T = L A with T Tᵀ ~ Wishart(L Lᵀ, ν)."""
    d = scale_inv_chol.shape[0]
    a = np.zeros((size, d, d))
    for i in range(d):
        a[:, i, i] = np.sqrt(rng.chisquare(nu - i, size=size))
    rows, cols = np.tril_indices(d, k=-1)
    if rows.size:
        a[:, rows, cols] = rng.standard_normal((size, rows.size))
    return scale_inv_chol @ a


def _inverse_scale_chol(scale: SPDMatrix) -> np.ndarray:
    return linalg.cholesky(scale.inverse().entries, lower=True)


def _lower_inverse_batch(t: np.ndarray) -> np.ndarray:
    """Inverses of a (size, d, d) stack of lower-triangular factors by forward substitution."""
    d = t.shape[-1]
    diag = np.diagonal(t, axis1=-2, axis2=-1)
    inv = np.zeros_like(t)
    for i in range(d):
        inv[:, i, i] = 1.0 / diag[:, i]
        if i:
            inv[:, i, :i] = -np.einsum("bk,bkj->bj", t[:, i, :i], inv[:, :i, :i]) / diag[:, i, None]
    return inv


def sample_iw_batch(p: IWParams, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` inverse-Wishart draws as a (size, d, d) array."""
    p.ensure_valid()
    t = _wishart_factor_batch(_inverse_scale_chol(p.scale_matrix()), p.nu, size, rng)
    t_inv = _lower_inverse_batch(t)
    return _sym(np.swapaxes(t_inv, -1, -2) @ t_inv)


def _factor_batch(p: FactorParams, size: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    loadings = rng.standard_normal((size, p.d, p.rank))
    precisions = rng.gamma(p.a, 1.0 / p.b, size=(size, p.d))
    return loadings, precisions


def _mgp_batch(p: MGPParams, size: int, rng: np.random.Generator):
    phi = rng.gamma(MGP_LOCAL_SHAPE, 1.0 / MGP_LOCAL_RATE, size=(size, p.d, p.rank))
    delta = np.empty((size, p.rank))
    delta[:, 0] = rng.gamma(p.a1, 1.0, size=size)
    if p.rank > 1:
        delta[:, 1:] = rng.gamma(p.a2, 1.0, size=(size, p.rank - 1))
    tau = np.cumprod(delta, axis=1)
    loadings = rng.standard_normal((size, p.d, p.rank)) / np.sqrt(phi * tau[:, None, :])
    precisions = rng.gamma(p.a, 1.0 / p.b, size=(size, p.d))
    return loadings, precisions, phi, delta


def _loadings_cov(loadings: np.ndarray, precisions: np.ndarray) -> np.ndarray:
    cov = loadings @ np.swapaxes(loadings, -1, -2)
    idx = np.arange(precisions.shape[-1])
    cov[..., idx, idx] += 1.0 / precisions
    return _sym(cov)


def covariance_eigvals_batch(p: CovariancePrior, size: int, rng: np.random.Generator) -> np.ndarray:
    """Eigenvalues of ``size`` covariance draws, shape (size, d), ascending per row."""
    p.ensure_valid()
    if isinstance(p, IWParams):
        t = _wishart_factor_batch(_inverse_scale_chol(p.scale_matrix()), p.nu, size, rng)
        precision_eigs = np.linalg.eigvalsh(t @ np.swapaxes(t, -1, -2))
        return np.sort(1.0 / precision_eigs, axis=1)
    if isinstance(p, FactorParams):
        return np.linalg.eigvalsh(_loadings_cov(*_factor_batch(p, size, rng)))
    if isinstance(p, MGPParams):
        loadings, precisions, _, _ = _mgp_batch(p, size, rng)
        return np.linalg.eigvalsh(_loadings_cov(loadings, precisions))
    # rotations preserve the spectrum
    return np.sort(1.0 / rng.gamma(p.a, 1.0 / p.b, size=(size, p.d)), axis=1)


def sample_location_batch(p: LocationPriorSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    p.ensure_valid()
    m = p.mean_vector()
    z = rng.standard_normal((size, p.d))
    if p.kind is LocationKind.FIXED:
        return m + z @ p.scale_matrix().cholesky.T
    # θ = m + T^{-T} z has covariance (T Tᵀ)^{-1} = B
    t = _wishart_factor_batch(_inverse_scale_chol(p.scale_matrix()), p.hyper_dof, size, rng)
    return m + np.einsum("bki,bk->bi", _lower_inverse_batch(t), z)


# --------------------------------------------------------------------------- #
#  Single-draw samplers
# --------------------------------------------------------------------------- #
def draw_inverse_wishart(scale: np.ndarray, nu: float, rng: np.random.Generator) -> np.ndarray:
    """IW(Ψ, ν) draw for a raw scale matrix Ψ; used by the conjugate posterior updates."""
    d = scale.shape[0]
    inv_chol = linalg.cholesky(linalg.inv(scale), lower=True)
    t = _wishart_factor_batch(inv_chol, nu, 1, rng)[0]
    t_inv = linalg.solve_triangular(t, np.eye(d), lower=True)
    return _sym(t_inv.T @ t_inv)


def sample_iw(p: IWParams, rng: np.random.Generator) -> SPDMatrix:
    """One inverse-Wishart draw via the Bartlett decomposition."""
    p.ensure_valid()
    return SPDMatrix(draw_inverse_wishart(p.scale_matrix().entries, p.nu, rng))


def sample_factor_parts(p: FactorParams, rng: np.random.Generator) -> FactorDraw:
    p.ensure_valid()
    loadings, precisions = _factor_batch(p, 1, rng)
    return FactorDraw(loadings[0], precisions[0], SPDMatrix(_loadings_cov(loadings, precisions)[0]))


def sample_factor(p: FactorParams, rng: np.random.Generator) -> SPDMatrix:
    """Σ = ΓΓᵀ + Ω with standard normal loadings and gamma residual precisions."""
    return sample_factor_parts(p, rng).cov


def sample_mgp_parts(p: MGPParams, rng: np.random.Generator) -> MGPDraw:
    p.ensure_valid()
    loadings, precisions, phi, delta = _mgp_batch(p, 1, rng)
    cov = SPDMatrix(_loadings_cov(loadings, precisions)[0])
    return MGPDraw(loadings[0], precisions[0], cov, local_precisions=phi[0], global_shrinkage=delta[0])


def sample_mgp(p: MGPParams, rng: np.random.Generator) -> SPDMatrix:
    """Factor draw with loadings γ_jh ~ N(0, (φ_jh τ_h)⁻¹) under the multiplicative gamma process."""
    return sample_mgp_parts(p, rng).cov


def _continuous_angle(kappa: float, rng: np.random.Generator) -> float:
    half = math.pi / 2.0
    if kappa == 0.0:
        return float(rng.uniform(-half, half))
    if kappa <= ROTATOR_UNIFORM_KAPPA_MAX:
        # uniform proposal, envelope e^κ
        while True:
            omega = rng.uniform(-half, half)
            if math.log(rng.random()) < kappa * (math.cos(omega) ** 2 - 1.0):
                return float(omega)
    # sin²ω ≥ 4ω²/π² on |ω| ≤ π/2, so exp{κ(cos²ω − 1)} ≤ exp{−4κω²/π²}
    sd = math.pi / math.sqrt(8.0 * kappa)
    while True:
        omega = rng.normal(0.0, sd)
        if abs(omega) >= half:
            continue
        log_ratio = kappa * (math.cos(omega) ** 2 - 1.0) + 4.0 * kappa * omega**2 / math.pi**2
        if math.log(rng.random()) < log_ratio:
            return float(omega)


def sample_rotator_angle(p: SpectralParams, rng: np.random.Generator) -> float:
    """Angle from β_{π/2}·δ_{π/2} + (1−β_{π/2})β₀·δ_0 + rest·p_c with p_c ∝ exp{κ cos²ω}."""
    p.ensure_valid()
    if p.beta_pi2 >= 1.0:
        return math.pi / 2.0
    if p.beta_pi2 > 0.0 and rng.random() < p.beta_pi2:
        return math.pi / 2.0
    if p.beta_0 >= 1.0:
        return 0.0
    if p.beta_0 > 0.0 and rng.random() < p.beta_0:
        return 0.0
    return _continuous_angle(p.kappa_rot, rng)


def angle_pairs(d: int) -> list[tuple[int, int]]:
    """Rotator index pairs (i, j), i < j, in lexicographic order."""
    return [(i, j) for i in range(d) for j in range(i + 1, d)]


def rotation_from_angles(d: int, angles: np.ndarray) -> np.ndarray:
    """O = ∏_{i<j} G_{ij}(ω_ij) composed in lexicographic order."""
    rotation = np.eye(d)
    for (i, j), omega in zip(angle_pairs(d), angles, strict=True):
        c, s = math.cos(omega), math.sin(omega)
        givens = np.eye(d)
        givens[i, i] = givens[j, j] = c
        givens[i, j] = -s
        givens[j, i] = s
        rotation = rotation @ givens
    return rotation


def spectral_cov(rotation: np.ndarray, eigenvalues: np.ndarray) -> SPDMatrix:
    return SPDMatrix(_sym((rotation * eigenvalues) @ rotation.T))


def sample_spectral_parts(p: SpectralParams, rng: np.random.Generator) -> SpectralDraw:
    p.ensure_valid()
    eigenvalues = 1.0 / rng.gamma(p.a, 1.0 / p.b, size=p.d)
    angles = np.array([sample_rotator_angle(p, rng) for _ in range(p.n_angles)], dtype=float)
    rotation = rotation_from_angles(p.d, angles)
    return SpectralDraw(angles, rotation, eigenvalues, spectral_cov(rotation, eigenvalues))


def sample_spectral(p: SpectralParams, rng: np.random.Generator) -> SPDMatrix:
    """Σ = OΛOᵀ with gamma eigenvalue precisions and Givens rotators."""
    return sample_spectral_parts(p, rng).cov


_COVARIANCE_SAMPLERS = {
    CovarianceFamily.IW.value: sample_iw,
    CovarianceFamily.FACTOR.value: sample_factor,
    CovarianceFamily.MGP.value: sample_mgp,
    CovarianceFamily.SPECTRAL.value: sample_spectral,
}


def sample_covariance(p: CovariancePrior, rng: np.random.Generator) -> SPDMatrix:
    return _COVARIANCE_SAMPLERS[p.family](p, rng)


def sample_location(p: LocationPriorSpec, rng: np.random.Generator) -> np.ndarray:
    """θ from the location prior; Student-t with ν_B dof in the hierarchical case."""
    return sample_location_batch(p, 1, rng)[0]


def sample_base(spec: BaseMeasureSpec, rng: np.random.Generator) -> tuple[np.ndarray, SPDMatrix]:
    """Independent (θ, Σ) draw from P*."""
    return sample_location(spec.location, rng), sample_covariance(spec.covariance, rng)


def sample_prior_mixture(alpha: float, spec: BaseMeasureSpec, H: int, rng: np.random.Generator) -> MixtureDensity:
    """Truncated stick-breaking draw of f_P with remainder ∏_{h≤H}(1 − V_h)."""
    if H < 1:
        raise ParameterError(f"truncation H must be at least 1, got {H}")
    sticks = StickBreaking.draw(alpha, H, rng)
    components = []
    for _ in range(H):
        theta, cov = sample_base(spec, rng)
        components.append(GaussianComponent(theta, cov))
    return MixtureDensity(sticks.weights(), tuple(components))


# --------------------------------------------------------------------------- #
#  Consistency constraints
# --------------------------------------------------------------------------- #
class ConditionCheck(BaseModel):
    name: str = Field(description="Short identifier of the condition")
    requirement: str = Field(description="Human-readable inequality")
    value: float = Field(description="Value of the constrained quantity")
    threshold: float = Field(description="Strict lower bound the value must exceed")
    passed: bool

    @property
    def margin(self) -> float:
        return self.value - self.threshold


class ConsistencyReport(BaseModel):
    family: CovarianceFamily
    d: int
    checks: list[ConditionCheck] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing(self) -> list[ConditionCheck]:
        return [c for c in self.checks if not c.passed]


def _greater(name: str, requirement: str, value: float, threshold: float) -> ConditionCheck:
    passed = value > threshold
    return ConditionCheck(name=name, requirement=requirement, value=value, threshold=threshold, passed=passed)


def condition_number_threshold(d: int) -> float:
    return float(d * (d - 1))


def check_consistency_constraints(spec: BaseMeasureSpec) -> ConsistencyReport:
    """Pass/fail with margins for every hyperparameter condition of the consistency results."""
    d = spec.d
    cov = spec.covariance
    report = ConsistencyReport(family=CovarianceFamily(cov.family), d=d)
    checks = report.checks
    if isinstance(cov, IWParams):
        checks.append(_greater("iw_proper", "ν > d − 1", cov.nu, d - 1.0))
        checks.append(_greater("iw_condition_tail", "ν > 2d(d−1) + d − 1", cov.nu, 2.0 * d * (d - 1) + d - 1.0))
    else:
        if isinstance(cov, FactorParams):
            checks.append(_greater("factor_rank", "r_f < d", float(d), float(cov.rank)))
        if isinstance(cov, MGPParams):
            checks.append(_greater("mgp_shapes", "min(a₁, a₂) > 0", min(cov.a1, cov.a2), 0.0))
        checks.append(_greater("gamma_rate", "b > 0", cov.b, 0.0))
        checks.append(_greater("gamma_shape_tail", "a > d(d−1)", cov.a, condition_number_threshold(d)))
        if isinstance(cov, SpectralParams):
            total = cov.beta_pi2 + (1.0 - cov.beta_pi2) * cov.beta_0
            checks.append(
                ConditionCheck(
                    name="angle_weights",
                    requirement="β_{π/2} + (1−β_{π/2})β₀ ≤ 1",
                    value=1.0 - total,
                    threshold=0.0,
                    passed=0.0 <= cov.beta_pi2 <= 1.0 and 0.0 <= cov.beta_0 <= 1.0 and total <= 1.0,
                )
            )
    loc = spec.location
    if loc.kind is LocationKind.HIERARCHICAL:
        checks.append(_greater("location_proper", "ν_B > d − 1", loc.nu_b_value, d - 1.0))
        checks.append(_greater("location_tail", "ν_B > d", loc.nu_b_value, float(d)))
    for check in checks:
        logger.debug(
            f"{check.name}: {check.requirement} value={check.value} threshold={check.threshold} ok={check.passed}"
        )
    return report


__all__ = [
    "CovarianceFamily",
    "LocationKind",
    "IWParams",
    "FactorParams",
    "MGPParams",
    "SpectralParams",
    "CovariancePrior",
    "LocationPriorSpec",
    "BaseMeasureSpec",
    "FactorDraw",
    "MGPDraw",
    "SpectralDraw",
    "sample_iw_batch",
    "covariance_eigvals_batch",
    "sample_location_batch",
    "draw_inverse_wishart",
    "sample_iw",
    "sample_factor_parts",
    "sample_factor",
    "sample_mgp_parts",
    "sample_mgp",
    "sample_rotator_angle",
    "angle_pairs",
    "rotation_from_angles",
    "spectral_cov",
    "sample_spectral_parts",
    "sample_spectral",
    "sample_covariance",
    "sample_location",
    "sample_base",
    "sample_prior_mixture",
    "ConditionCheck",
    "ConsistencyReport",
    "condition_number_threshold",
    "check_consistency_constraints",
]
