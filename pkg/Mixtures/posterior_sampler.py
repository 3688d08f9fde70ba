"""Blocked Gibbs sampling for the DP location-scale mixture.

The DP is truncated after H sticks. The mass left over, R = ∏_{h≤H}(1 − V_h), is
carried by one extra overflow atom drawn from the base measure, so every sweep
targets a proper finite mixture and the remainder has an explicit density.

One sweep updates, in order:

1. allocations z_i over the H + 1 atoms (multinomial on the normalised responsibilities);
2. sticks V_h ~ beta(1 + n_h, α + Σ_{k>h} n_k), counts including the overflow atom;
3. atoms. An empty atom is redrawn from the base measure. An occupied atom updates
   θ | Σ, B (normal), then B | θ (inverse-Wishart, hierarchical location only),
   then Σ: conjugate inverse-Wishart for the IW family and random-walk Metropolis
   on unconstrained blocks for the factor, MGP and spectral families. The MGP
   shrinkage parameters have gamma full conditionals and are drawn exactly.

Step sizes of the Metropolis blocks are shared by all atoms and tuned during
burn-in toward an acceptance rate of 0.3.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import linalg
from scipy.special import logsumexp

from .core_math import (
    GaussianComponent,
    MixtureDensity,
    SPDMatrix,
    clip_sticks,
    eval_gaussian,
    eval_mixture,
    log_gaussian,
    stick_weights,
)
from .distances import Metric, estimate_distance
from .errors import InputError
from .priors import (
    MGP_LOCAL_RATE,
    MGP_LOCAL_SHAPE,
    BaseMeasureSpec,
    CovariancePrior,
    FactorParams,
    IWParams,
    LocationKind,
    MGPParams,
    SpectralParams,
    draw_inverse_wishart,
    rotation_from_angles,
    sample_factor_parts,
    sample_iw,
    sample_mgp_parts,
    sample_rotator_angle,
    sample_spectral_parts,
)
from .random_streams import stream

logger = logging.getLogger("DPMixtures.Sampler")

MAX_DEFAULT_TRUNCATION = 200
TARGET_ACCEPTANCE = 0.3
TUNE_EVERY = 50
STEP_LIMITS = (1e-4, 10.0)


def default_truncation(alpha: float, n: int) -> int:
    """⌈5α log n⌉ capped at 200, and at least 1."""
    if n < 2:
        return 1
    return max(1, min(MAX_DEFAULT_TRUNCATION, math.ceil(5.0 * alpha * math.log(n))))


class DPMixtureModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    alpha: float = Field(gt=0, description="DP total mass α")
    base: BaseMeasureSpec = Field(description="Base measure P* = location prior × covariance prior")
    truncation: int | None = Field(default=None, ge=1, description="Sticks kept; ⌈5α log n⌉ ∧ 200 when omitted")

    @property
    def d(self) -> int:
        return self.base.d

    def truncation_for(self, n: int) -> int:
        return self.truncation if self.truncation is not None else default_truncation(self.alpha, n)


class MCMCConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    iterations: int = Field(default=2000, ge=1)
    burn_in: int = Field(default=500, ge=0)
    thin: int = Field(default=1, ge=1)
    seed: int = 0
    standardize: bool = Field(default=False, description="Fit on centred, unit-variance columns")

    @model_validator(mode="after")
    def _check_burn_in(self) -> MCMCConfig:
        if not self.iterations > self.burn_in:
            raise ValueError(f"iterations ({self.iterations}) must exceed burn_in ({self.burn_in})")
        return self

    @property
    def n_snapshots(self) -> int:
        return len(range(self.burn_in, self.iterations, self.thin))


@dataclass
class PosteriorDraws:
    """Posterior snapshots: H weighted components each, plus the overflow atom and its mass."""

    snapshots: list[MixtureDensity]
    remainders: list[float]
    remainder_atoms: list[GaussianComponent]
    acceptance: dict[str, float] = field(default_factory=dict)
    allocation_summary: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not len(self.snapshots) == len(self.remainders) == len(self.remainder_atoms):
            raise InputError("snapshots, remainders and remainder atoms differ in length")

    def __len__(self) -> int:
        return len(self.snapshots)

    @property
    def dim(self) -> int:
        if not self.snapshots:
            raise InputError("no posterior snapshots")
        return self.snapshots[0].dim

    def densities(self) -> list[MixtureDensity]:
        """Each snapshot with its overflow atom appended, total weight one."""
        out = []
        for snap, rem, atom in zip(self.snapshots, self.remainders, self.remainder_atoms, strict=True):
            out.append(snap.with_component(rem, atom) if rem > 0.0 else snap)
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "snapshots": [s.to_dict() for s in self.snapshots],
            "remainders": list(self.remainders),
            "remainder_atoms": [{"mean": a.mean.tolist(), "cov": a.cov.to_list()} for a in self.remainder_atoms],
            "acceptance": dict(self.acceptance),
            "allocation_summary": dict(self.allocation_summary),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> PosteriorDraws:
        try:
            snapshots = [MixtureDensity.from_dict(s) for s in data["snapshots"]]
            atoms = [
                GaussianComponent(np.asarray(a["mean"]), SPDMatrix(np.asarray(a["cov"])))
                for a in data["remainder_atoms"]
            ]
            remainders = [float(r) for r in data["remainders"]]
        except KeyError as exc:
            raise InputError(f"fit JSON is missing key {exc.args[0]!r}") from exc
        return cls(snapshots, remainders, atoms, data.get("acceptance", {}), data.get("allocation_summary", {}))

    @classmethod
    def concatenate(cls, parts: Sequence[PosteriorDraws]) -> PosteriorDraws:
        if not parts:
            raise InputError("nothing to merge")
        blocks = sorted({k for p in parts for k in p.acceptance})
        acceptance = {}
        for block in blocks:
            rates = [p.acceptance[block] for p in parts if block in p.acceptance]
            acceptance[block] = float(np.mean(rates))
        return cls(
            [s for p in parts for s in p.snapshots],
            [r for p in parts for r in p.remainders],
            [a for p in parts for a in p.remainder_atoms],
            acceptance,
            {"chains": len(parts), "per_chain": [p.allocation_summary for p in parts]},
        )


# --------------------------------------------------------------------------- #
#  Metropolis bookkeeping
# --------------------------------------------------------------------------- #
class _StepTuner:
    def __init__(self, initial: dict[str, float]):
        self.steps = dict(initial)
        self._window = {k: [0, 0] for k in initial}
        self._totals: dict[str, list[int]] = {}

    def step(self, block: str) -> float:
        return self.steps[block]

    def record(self, block: str, accepted: bool) -> None:
        for table in (self._window, self._totals):
            counts = table.setdefault(block, [0, 0])
            counts[0] += int(accepted)
            counts[1] += 1

    def tune(self) -> None:
        lo, hi = STEP_LIMITS
        for block, (accepted, proposed) in self._window.items():
            if proposed == 0 or block not in self.steps:
                continue
            rate = accepted / proposed
            self.steps[block] = float(np.clip(self.steps[block] * math.exp(2.0 * (rate - TARGET_ACCEPTANCE)), lo, hi))
            logger.debug(f"step {block}: acceptance {rate:.3f} -> step {self.steps[block]:.4g}")
        self._window = {k: [0, 0] for k in self._window}

    def reset_totals(self) -> None:
        self._totals = {}

    def rates(self) -> dict[str, float]:
        return {k: a / p for k, (a, p) in sorted(self._totals.items()) if p > 0}


def _log_likelihood(cov: np.ndarray, scatter: np.ndarray, n: int) -> float:
    """−n/2 log|Σ| − ½ tr(Σ⁻¹S), constants dropped."""
    try:
        chol = linalg.cholesky(cov, lower=True)
    except linalg.LinAlgError:
        return -math.inf
    log_det = 2.0 * float(np.sum(np.log(np.diag(chol))))
    return -0.5 * (n * log_det + float(np.trace(linalg.cho_solve((chol, True), scatter))))


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


# --------------------------------------------------------------------------- #
#  Covariance kernels, one per prior family
# --------------------------------------------------------------------------- #
class _CovarianceKernel:
    """Draws Σ from its prior and updates it given θ and the scatter S = Σ(x − θ)(x − θ)ᵀ."""

    rw_blocks: dict[str, float] = {}

    def __init__(self, prior: CovariancePrior):
        self.prior = prior

    def draw(self, rng: np.random.Generator) -> tuple[np.ndarray, dict[str, np.ndarray]]:
        raise NotImplementedError

    def cov_of(self, params: dict[str, np.ndarray]) -> np.ndarray:
        raise NotImplementedError

    def log_prior(self, params: dict[str, np.ndarray]) -> float:
        raise NotImplementedError

    def update(
        self, params: dict[str, np.ndarray], scatter: np.ndarray, n: int, rng: np.random.Generator, tuner: _StepTuner
    ) -> dict[str, np.ndarray]:
        def log_target(p: dict[str, np.ndarray]) -> float:
            return _log_likelihood(self.cov_of(p), scatter, n) + self.log_prior(p)

        current = log_target(params)
        for block in self.rw_blocks:
            proposal = dict(params)
            proposal[block] = params[block] + tuner.step(block) * rng.standard_normal(params[block].shape)
            candidate = log_target(proposal)
            accepted = math.log(rng.random()) < candidate - current
            tuner.record(block, accepted)
            if accepted:
                params, current = proposal, candidate
        return params


class _IWKernel(_CovarianceKernel):
    prior: IWParams

    def __init__(self, prior: IWParams):
        super().__init__(prior)
        self.scale = prior.scale_matrix().entries

    def draw(self, rng: np.random.Generator) -> tuple[np.ndarray, dict[str, np.ndarray]]:
        cov = sample_iw(self.prior, rng).entries
        return np.array(cov), {"cov": np.array(cov)}

    def cov_of(self, params: dict[str, np.ndarray]) -> np.ndarray:
        return params["cov"]

    def update(self, params, scatter, n, rng, tuner):
        # Σ | θ, x ~ IW(Σ₀ + S, ν + n)
        return {"cov": draw_inverse_wishart(self.scale + scatter, self.prior.nu + n, rng)}


class _FactorKernel(_CovarianceKernel):
    rw_blocks = {"loadings": 0.1, "log_precisions": 0.2}
    prior: FactorParams

    def draw(self, rng):
        parts = sample_factor_parts(self.prior, rng)
        params = {"loadings": np.array(parts.loadings), "log_precisions": np.log(parts.residual_precisions)}
        return self.cov_of(params), params

    def cov_of(self, params):
        gamma = params["loadings"]
        return _sym(gamma @ gamma.T + np.diag(np.exp(-params["log_precisions"])))

    def _log_precision_prior(self, lp: np.ndarray) -> float:
        return float(np.sum(self.prior.a * lp - self.prior.b * np.exp(lp)))

    def log_prior(self, params):
        return -0.5 * float(np.sum(params["loadings"] ** 2)) + self._log_precision_prior(params["log_precisions"])


class _MGPKernel(_FactorKernel):
    prior: MGPParams

    def draw(self, rng):
        parts = sample_mgp_parts(self.prior, rng)
        params = {
            "loadings": np.array(parts.loadings),
            "log_precisions": np.log(parts.residual_precisions),
            "local": np.array(parts.local_precisions),
            "global": np.array(parts.global_shrinkage),
        }
        return self.cov_of(params), params

    def log_prior(self, params):
        precision = params["local"] * np.cumprod(params["global"])[None, :]
        loadings = 0.5 * float(np.sum(np.log(precision) - precision * params["loadings"] ** 2))
        return loadings + self._log_precision_prior(params["log_precisions"])

    def update(self, params, scatter, n, rng, tuner):
        params = super().update(params, scatter, n, rng, tuner)
        return self._shrinkage_gibbs(params, rng)

    def _shrinkage_gibbs(self, params: dict[str, np.ndarray], rng: np.random.Generator) -> dict[str, np.ndarray]:
        gamma2 = params["loadings"] ** 2
        d, k = gamma2.shape
        delta = np.array(params["global"])
        tau = np.cumprod(delta)
        local = rng.gamma(MGP_LOCAL_SHAPE + 0.5, 1.0 / (MGP_LOCAL_RATE + 0.5 * tau[None, :] * gamma2))
        weighted = np.sum(local * gamma2, axis=0)
        for level in range(k):
            shape = (self.prior.a1 if level == 0 else self.prior.a2) + 0.5 * d * (k - level)
            tau_without = np.cumprod(delta) / delta[level]
            rate = 1.0 + 0.5 * float(np.sum(tau_without[level:] * weighted[level:]))
            delta[level] = rng.gamma(shape, 1.0 / rate)
        return {**params, "local": local, "global": delta}


class _SpectralKernel(_CovarianceKernel):
    rw_blocks = {"log_eigenvalues": 0.2}
    angle_step = 0.2
    prior: SpectralParams

    def draw(self, rng):
        parts = sample_spectral_parts(self.prior, rng)
        params = {"log_eigenvalues": np.log(parts.eigenvalues), "angles": np.array(parts.angles)}
        return np.array(parts.cov.entries), params

    def cov_of(self, params):
        rotation = rotation_from_angles(self.prior.d, params["angles"])
        return _sym((rotation * np.exp(params["log_eigenvalues"])) @ rotation.T)

    def log_prior(self, params):
        # λ⁻¹ ~ Ga(a, b) on u = log λ; the angles are handled by their own kernel
        u = params["log_eigenvalues"]
        return float(np.sum(-self.prior.a * u - self.prior.b * np.exp(-u)))

    def _on_atom(self, omega: float) -> bool:
        return (self.prior.beta_pi2 > 0.0 and omega == math.pi / 2.0) or (self.prior.beta_0 > 0.0 and omega == 0.0)

    def update(self, params, scatter, n, rng, tuner):
        params = super().update(params, scatter, n, rng, tuner)
        angles = np.array(params["angles"])
        kappa = self.prior.kappa_rot
        current = _log_likelihood(self.cov_of(params), scatter, n)
        for k in range(angles.size):
            old = float(angles[k])
            if rng.random() < 0.5:
                # independence proposal from the angle prior: accept on the likelihood ratio
                new, block, log_prior_ratio = sample_rotator_angle(self.prior, rng), "angle_jumps", 0.0
            elif not self._on_atom(old):
                new, block = old + tuner.step("angles") * rng.standard_normal(), "angles"
                if abs(new) >= math.pi / 2.0:
                    tuner.record(block, False)
                    continue
                log_prior_ratio = kappa * (math.cos(new) ** 2 - math.cos(old) ** 2)
            else:
                continue
            angles[k] = new
            candidate = _log_likelihood(self.cov_of({**params, "angles": angles}), scatter, n)
            accepted = math.log(rng.random()) < candidate - current + log_prior_ratio
            tuner.record(block, accepted)
            if accepted:
                current = candidate
            else:
                angles[k] = old
        return {**params, "angles": angles}


_KERNELS: dict[str, Callable[[Any], _CovarianceKernel]] = {
    "iw": _IWKernel,
    "factor": _FactorKernel,
    "mgp": _MGPKernel,
    "spectral": _SpectralKernel,
}


def _initial_steps(kernel: _CovarianceKernel) -> dict[str, float]:
    steps = dict(kernel.rw_blocks)
    if isinstance(kernel, _SpectralKernel) and kernel.prior.n_angles:
        steps["angles"] = kernel.angle_step
    return steps


# --------------------------------------------------------------------------- #
#  Sampler
# --------------------------------------------------------------------------- #
@dataclass
class _Atom:
    theta: np.ndarray
    cov: np.ndarray
    loc_scale: np.ndarray
    params: dict[str, np.ndarray]

    def component(self) -> GaussianComponent:
        return GaussianComponent(self.theta, SPDMatrix(self.cov))


def _as_data(data: Any, d: int) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 1 and d == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise InputError(f"data must be a non-empty (n, d) matrix, got shape {arr.shape}")
    if arr.shape[1] != d:
        raise InputError(f"data have {arr.shape[1]} columns, model dimension is {d}")
    if not np.all(np.isfinite(arr)):
        raise InputError("data contain non-finite entries")
    return arr


class BlockedGibbsSampler:
    """State and single sweeps of the blocked Gibbs chain.

    ``atoms`` has H + 1 entries; the last one is the overflow atom.
    """

    def __init__(
        self, model: DPMixtureModel, data: Any, rng: np.random.Generator, truncation: int | None = None
    ) -> None:
        model.base.ensure_valid()
        self.model = model
        self.rng = rng
        self.data = _as_data(data, model.d)
        self.H = truncation if truncation is not None else model.truncation_for(self.data.shape[0])
        if self.H < 1:
            raise InputError(f"truncation must be at least 1, got {self.H}")
        self.kernel = _KERNELS[model.base.covariance.family](model.base.covariance)
        self.tuner = _StepTuner(_initial_steps(self.kernel))
        location = model.base.location
        self._hierarchical = location.kind is LocationKind.HIERARCHICAL
        self._m = location.mean_vector()
        self._scale = location.scale_matrix().entries
        self._nu_b = location.hyper_dof
        self.draw_prior_state()
        # start occupied atoms at data points so the first allocations spread out
        picks = self.rng.choice(self.data.shape[0], size=self.H, replace=True)
        for atom, i in zip(self.atoms[: self.H], picks, strict=True):
            atom.theta = np.array(self.data[i])
        self.allocations = np.zeros(self.data.shape[0], dtype=int)
        self.counts = np.zeros(self.H + 1, dtype=int)

    # ---- prior ---- #
    def _draw_atom(self) -> _Atom:
        loc_scale = draw_inverse_wishart(self._scale, self._nu_b, self.rng) if self._hierarchical else self._scale
        theta = self._m + linalg.cholesky(loc_scale, lower=True) @ self.rng.standard_normal(self.model.d)
        cov, params = self.kernel.draw(self.rng)
        return _Atom(theta, cov, np.array(loc_scale), params)

    def draw_prior_state(self) -> None:
        """Replace sticks and atoms by a fresh draw from the truncated prior."""
        self.sticks = clip_sticks(self.rng.beta(1.0, self.model.alpha, size=self.H))
        self.atoms = [self._draw_atom() for _ in range(self.H + 1)]

    def weights(self) -> np.ndarray:
        """π_1, …, π_H followed by the overflow mass R."""
        pi = stick_weights(self.sticks)
        return np.append(pi, float(np.prod(1.0 - self.sticks)))

    def simulate(self, n: int) -> np.ndarray:
        """n observations from the current state, including the overflow atom."""
        probs = self.weights()
        labels = self.rng.choice(self.H + 1, size=n, p=probs / probs.sum())
        out = np.empty((n, self.model.d))
        for h in np.unique(labels):
            idx = np.flatnonzero(labels == h)
            atom = self.atoms[h]
            out[idx] = atom.theta + self.rng.standard_normal((idx.size, self.model.d)) @ linalg.cholesky(
                atom.cov, lower=True
            ).T
        return out

    def set_data(self, data: Any) -> None:
        self.data = _as_data(data, self.model.d)
        self.allocations = np.zeros(self.data.shape[0], dtype=int)

    # ---- sweep ---- #
    def sweep(self) -> None:
        self._update_allocations()
        self._update_sticks()
        self._update_atoms()

    def _update_allocations(self) -> None:
        with np.errstate(divide="ignore"):
            log_w = np.log(self.weights())
        logp = np.stack([log_gaussian(self.data, atom.component()) for atom in self.atoms]) + log_w[:, None]
        probs = np.exp(logp - logsumexp(logp, axis=0))
        cum = np.cumsum(probs, axis=0)
        u = self.rng.random(self.data.shape[0]) * cum[-1]
        self.allocations = np.minimum(np.sum(cum < u, axis=0), self.H)
        self.counts = np.bincount(self.allocations, minlength=self.H + 1)

    def _update_sticks(self) -> None:
        greater = np.cumsum(self.counts[::-1])[::-1][1:]
        self.sticks = clip_sticks(self.rng.beta(1.0 + self.counts[: self.H], self.model.alpha + greater))

    def _update_atoms(self) -> None:
        for h, atom in enumerate(self.atoms):
            if self.counts[h] == 0:
                self.atoms[h] = self._draw_atom()
                continue
            points = self.data[self.allocations == h]
            self._update_location(atom, points)
            resid = points - atom.theta
            atom.params = self.kernel.update(atom.params, resid.T @ resid, points.shape[0], self.rng, self.tuner)
            atom.cov = self.kernel.cov_of(atom.params)

    def _update_location(self, atom: _Atom, points: np.ndarray) -> None:
        n = points.shape[0]
        sigma_inv = linalg.inv(atom.cov)
        b_inv = linalg.inv(atom.loc_scale)
        precision = _sym(b_inv + n * sigma_inv)
        chol = linalg.cholesky(precision, lower=True)
        mean = linalg.cho_solve((chol, True), b_inv @ self._m + sigma_inv @ points.sum(axis=0))
        atom.theta = mean + linalg.solve_triangular(chol.T, self.rng.standard_normal(self.model.d), lower=False)
        if self._hierarchical:
            diff = atom.theta - self._m
            atom.loc_scale = draw_inverse_wishart(self._scale + np.outer(diff, diff), self._nu_b + 1.0, self.rng)

    # ---- output ---- #
    def snapshot(self) -> tuple[MixtureDensity, float, GaussianComponent]:
        weights = stick_weights(self.sticks)
        components = tuple(atom.component() for atom in self.atoms[: self.H])
        remainder = float(np.prod(1.0 - self.sticks))
        return MixtureDensity(weights, components), remainder, self.atoms[self.H].component()


# --------------------------------------------------------------------------- #
#  Fitting
# --------------------------------------------------------------------------- #
def _standardization(data: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    center = data.mean(axis=0)
    scale = data.std(axis=0)
    return center, np.where(scale > 0.0, scale, 1.0)


def _map_back(c: GaussianComponent, center: np.ndarray, scale: np.ndarray) -> GaussianComponent:
    # x = μ + D y: θ' = μ + Dθ, Σ' = DΣD
    return GaussianComponent(center + scale * c.mean, SPDMatrix(_sym(c.cov.entries * np.outer(scale, scale))))


def _run_chain(data: np.ndarray, model: DPMixtureModel, cfg: MCMCConfig, chain: int) -> PosteriorDraws:
    center, scale = _standardization(data) if cfg.standardize else (np.zeros(model.d), np.ones(model.d))
    work = (data - center) / scale
    sampler = BlockedGibbsSampler(model, work, stream(cfg.seed, chain))
    snapshots, remainders, atoms, occupied, overflow = [], [], [], [], []
    for it in range(cfg.iterations):
        if it == cfg.burn_in:
            sampler.tuner.reset_totals()
        sampler.sweep()
        if it < cfg.burn_in and (it + 1) % TUNE_EVERY == 0:
            sampler.tuner.tune()
        if it >= cfg.burn_in and (it - cfg.burn_in) % cfg.thin == 0:
            snap, rem, atom = sampler.snapshot()
            if cfg.standardize:
                snap = MixtureDensity(snap.weights, tuple(_map_back(c, center, scale) for c in snap.components))
                atom = _map_back(atom, center, scale)
            snapshots.append(snap)
            remainders.append(rem)
            atoms.append(atom)
            occupied.append(int(np.count_nonzero(sampler.counts)))
            overflow.append(int(sampler.counts[-1]))
    summary = {
        "n": int(data.shape[0]),
        "truncation": sampler.H,
        "mean_occupied": float(np.mean(occupied)),
        "max_occupied": int(np.max(occupied)),
        "mean_overflow": float(np.mean(overflow)),
        "final_counts": [int(c) for c in sampler.counts],
    }
    acceptance = sampler.tuner.rates()
    logger.info(
        f"chain {chain}: {len(snapshots)} snapshots, H={sampler.H}, "
        f"mean occupied {summary['mean_occupied']:.2f}, acceptance {acceptance}"
    )
    return PosteriorDraws(snapshots, remainders, atoms, acceptance, summary)


def fit(data: Any, model: DPMixtureModel, cfg: MCMCConfig) -> PosteriorDraws:
    """Run one blocked Gibbs chain and keep every ``thin``-th state after burn-in."""
    arr = _as_data(data, model.d)
    logger.info(f"fit: n={arr.shape[0]}, d={model.d}, family={model.base.covariance.family}, alpha={model.alpha}")
    return _run_chain(arr, model, cfg, 0)


def fit_chains(
    data: Any, model: DPMixtureModel, cfg: MCMCConfig, chains: int, workers: int | None = None
) -> PosteriorDraws:
    """Independent chains on streams (seed, chain), merged in chain order."""
    if chains < 1:
        raise InputError(f"need at least one chain, got {chains}")
    arr = _as_data(data, model.d)
    with ThreadPoolExecutor(max_workers=workers or chains) as pool:
        parts = list(pool.map(lambda c: _run_chain(arr, model, cfg, c), range(chains)))
    return PosteriorDraws.concatenate(parts)


def predictive_density(draws: PosteriorDraws, x: Any) -> float | np.ndarray:
    """Posterior mean density: average over snapshots of f_snapshot(x) + R·φ(x; overflow atom)."""
    if len(draws) == 0:
        raise InputError("no posterior snapshots")
    arr = np.asarray(x, dtype=float)
    width = arr.shape[-1] if arr.ndim >= 1 else 1
    if width != draws.dim:
        raise InputError(f"point has dimension {width}, draws have {draws.dim}")
    total = 0.0
    for snap, rem, atom in zip(draws.snapshots, draws.remainders, draws.remainder_atoms, strict=True):
        total = total + eval_mixture(arr, snap) + rem * eval_gaussian(arr, atom)
    return total / len(draws)


def posterior_distance_trace(
    draws: PosteriorDraws,
    f0: MixtureDensity,
    budget: int,
    rng: np.random.Generator,
    metric: Metric | str = Metric.HELLINGER,
) -> list[float]:
    """Distance from f₀ to every snapshot, overflow atom included."""
    if len(draws) and f0.dim != draws.dim:
        raise InputError(f"f0 has dimension {f0.dim}, draws have {draws.dim}")
    return [estimate_distance(metric, density, f0, budget, rng).value for density in draws.densities()]


__all__ = [
    "DPMixtureModel",
    "MCMCConfig",
    "PosteriorDraws",
    "BlockedGibbsSampler",
    "default_truncation",
    "fit",
    "fit_chains",
    "predictive_density",
    "posterior_distance_trace",
]
