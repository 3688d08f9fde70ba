"""Covering numbers, prior-mass bounds and the summability series for the mixture sieve.

The sieve keeps mixtures whose first H weights carry all but ε of the mass, whose
locations lie in a ball of radius ā, and whose covariance eigenvalues lie on a
ladder between σ² and σ²(1+ε/√d)^{2M}. It is partitioned into cells (j, l): component
h has ‖θ_h‖ ∈ (√n(j_h−1), √n j_h] and condition number in
(n^{2^{l_h−1}·1(l_h≥1)}, n^{2^{l_h}}].

Everything is evaluated exactly (no hidden constants) and in log space.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Sequence
from enum import Enum

import numpy as np
from pydantic import BaseModel, Field, model_validator

from .errors import InputError, ParameterError
from .tails import TailRequirements

logger = logging.getLogger("DPMixtures.Sieve")

DEFAULT_J_MAX = 50
DEFAULT_L_MAX = 10


class SieveParams(BaseModel):
    epsilon: float = Field(description="Radius ε ∈ (0, 1)")
    H: int = Field(description="Number of components kept")
    M: int = Field(description="Length of the eigenvalue ladder")
    sigma: float = Field(description="Lower eigenvalue scale σ")
    alpha: float = Field(default=1.0, description="DP mass α")
    c1: float = 1.0
    c2: float = 1.0
    c3: float = 1.0
    C: float = Field(default=1.0, description="Sieve-size constant in H_n = ⌊Cnε²/log n⌋")
    n: int = Field(default=2, description="Sample size")

    def ensure_valid(self) -> SieveParams:
        if not 0.0 < self.epsilon < 1.0:
            raise ParameterError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.H < 1 or self.M < 1:
            raise ParameterError(f"H and M must be at least 1, got H={self.H}, M={self.M}")
        if not self.sigma > 0:
            raise ParameterError(f"sigma must be positive, got {self.sigma}")
        for name in ("alpha", "c1", "c2", "c3", "C"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive, got {getattr(self, name)}")
        if self.n < 2:
            raise ParameterError(f"sample size must be at least 2, got {self.n}")
        return self

    @classmethod
    def from_sample_size(
        cls,
        n: int,
        epsilon: float,
        C: float = 1.0,
        alpha: float = 1.0,
        c1: float = 1.0,
        c2: float = 1.0,
        c3: float = 1.0,
    ) -> SieveParams:
        """M_n = σ_n^{−2c₂} = n and H_n = max(1, ⌊Cnε²/log n⌋)."""
        if n < 2:
            raise ParameterError(f"sample size must be at least 2, got {n}")
        H = max(1, math.floor(C * n * epsilon**2 / math.log(n)))
        sigma = n ** (-1.0 / (2.0 * c2))
        params = cls(epsilon=epsilon, H=H, M=n, sigma=sigma, alpha=alpha, c1=c1, c2=c2, c3=c3, C=C, n=n)
        return params.ensure_valid()

    @property
    def c4(self) -> float:
        return 0.5 + 0.5 / self.c2

    def complement_rate(self, d: int) -> float:
        """Supremum of the admissible b in Π(F_nᶜ) ≲ e^{−bnε²}."""
        return min(self.C * self.epsilon**2 / 2.0, self.c1, self.c3 * math.log1p(self.epsilon / math.sqrt(d)))


def max_sieve_constant(d: int, c: float, c2: float) -> float:
    """Upper limit 2(4 − c)/(c₄d + (d−1)(d+1)/2) on C."""
    c4 = 0.5 + 0.5 / c2
    return 2.0 * (4.0 - c) / (c4 * d + (d - 1) * (d + 1) / 2.0)


class SieveCell(BaseModel):
    j: list[int] = Field(description="Location shell index per component, j_h ≥ 1")
    l: list[int] = Field(description="Condition-number shell index per component, l_h ≥ 0")  # noqa: E741

    @model_validator(mode="after")
    def _check(self) -> SieveCell:
        if len(self.j) != len(self.l) or not self.j:
            raise ValueError("j and l must be non-empty and of equal length")
        if any(v < 1 for v in self.j) or any(v < 0 for v in self.l):
            raise ValueError("need j_h ≥ 1 and l_h ≥ 0")
        return self

    @property
    def H(self) -> int:
        return len(self.j)

    def location_bounds(self, n: int) -> list[tuple[float, float]]:
        root = math.sqrt(n)
        return [(root * (jh - 1), root * jh) for jh in self.j]

    def condition_bounds(self, n: int) -> list[tuple[float, float]]:
        return [(float(n) ** (2 ** (lh - 1)) if lh >= 1 else 1.0, float(n) ** (2**lh)) for lh in self.l]

    def contains(self, theta_norms: Sequence[float], condition_numbers: Sequence[float], n: int) -> bool:
        for (lo, hi), value in zip(self.location_bounds(n), theta_norms, strict=True):
            if not lo < value <= hi and not (lo == 0.0 and value == 0.0):
                return False
        return all(lo < z <= hi for (lo, hi), z in zip(self.condition_bounds(n), condition_numbers, strict=True))


class NetTarget(str, Enum):
    SIMPLEX = "simplex_H"
    ORTHOGONAL = "orthogonal_d"
    LOCATION_SHELL = "location_shell"
    EIGEN_LADDER = "eigen_ladder"


class NetSpec(BaseModel):
    target: NetTarget
    resolution: float = Field(gt=0)
    d: int = 1
    H: int = 1
    M: int = 1
    sigma: float = 1.0
    a_upper: float = 1.0
    a_lower: float = 0.0

    def size(self) -> float:
        if self.target is NetTarget.SIMPLEX:
            return float(simplex_net_size(self.H, self.resolution))
        if self.target is NetTarget.ORTHOGONAL:
            return orthogonal_net_size_bound(self.d, self.resolution)
        if self.target is NetTarget.LOCATION_SHELL:
            return shell_net_size_bound(self.a_upper, self.a_lower, self.sigma, self.resolution, self.d)
        return eigen_ladder_size(self.M, self.d, self.H)


# --------------------------------------------------------------------------- #
#  Nets
# --------------------------------------------------------------------------- #
def _simplex_lattice_order(H: int, epsilon: float) -> int:
    # largest-remainder rounding to the 1/m lattice moves a point by at most 2⌊H/2⌋⌈H/2⌉/(Hm) in ℓ¹
    worst = 2.0 * (H // 2) * ((H + 1) // 2) / H
    return max(1, math.ceil(worst / epsilon - 1e-12))


def simplex_net(H: int, epsilon: float) -> np.ndarray:
    """Lattice points {k/m : Σk = m} forming an ℓ¹ ε-net of the H-simplex."""
    _check_net_args(H, epsilon)
    m = _simplex_lattice_order(H, epsilon)
    points = []
    for bars in itertools.combinations(range(m + H - 1), H - 1):
        edges = (-1, *bars, m + H - 1)
        points.append([edges[i + 1] - edges[i] - 1 for i in range(H)])
    return np.asarray(points, dtype=float) / m


def simplex_net_size(H: int, epsilon: float) -> int:
    """Size of the lattice ε-net of the H-simplex, C(m + H − 1, H − 1)."""
    _check_net_args(H, epsilon)
    m = _simplex_lattice_order(H, epsilon)
    return math.comb(m + H - 1, H - 1)


def _check_net_args(H: int, epsilon: float) -> None:
    if H < 1:
        raise ParameterError(f"H must be at least 1, got {H}")
    if not epsilon > 0:
        raise ParameterError(f"resolution must be positive, got {epsilon}")


def orthogonal_net_size_bound(d: int, delta: float) -> float:
    """δ^{−d(d−1)/2}."""
    if not delta > 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    return delta ** (-d * (d - 1) / 2.0)


def _shell_log(a_upper: float, a_lower: float, sigma: float, epsilon: float, d: int) -> float:
    if not (epsilon > 0 and sigma > 0):
        raise ParameterError(f"epsilon and sigma must be positive, got epsilon={epsilon}, sigma={sigma}")
    if not a_upper > a_lower >= 0:
        raise ParameterError(f"need ā > a̲ ≥ 0, got ā={a_upper}, a̲={a_lower}")
    step = sigma * epsilon / 2.0
    outer = d * math.log(a_upper / step + 1.0)
    base = a_lower / step - 1.0
    if base == 0.0:
        return outer
    # (A^d − B^d) = A^d (1 − B^d/A^d) with |B| < A
    ratio = math.exp(d * math.log(abs(base)) - outer)
    if base < 0 and d % 2 == 1:
        ratio = -ratio
    return outer + math.log1p(-ratio)


def shell_net_size_bound(a_upper: float, a_lower: float, sigma: float, epsilon: float, d: int) -> float:
    """(ā/(σε/2) + 1)^d − (a̲/(σε/2) − 1)^d."""
    return math.exp(_shell_log(a_upper, a_lower, sigma, epsilon, d))


def eigen_ladder_size(M: int, d: int, H: int) -> float:
    return float(M) ** (d * H)


def entropy_bound(
    d: int,
    H: int,
    M: int,
    sigma: float,
    epsilon: float,
    a_upper: Sequence[float],
    a_lower: Sequence[float],
    u: Sequence[float],
    C1: float = 1.0,
) -> float:
    """Log covering-number bound for the sieve set, natural log.

    dH(log(a/(σε)) + log M) + H log(C₁/ε)
      + Σ_h [log((ā_h/(σε/2)+1)^d − (a̲_h/(σε/2)−1)^d) + (d(d−1)/2) log(2d·u_h/ε²)]
    with a = max_h ā_h.
    """
    if not (epsilon > 0 and sigma > 0):
        raise ParameterError(f"epsilon and sigma must be positive, got epsilon={epsilon}, sigma={sigma}")
    if H < 1 or M < 1 or d < 1:
        raise ParameterError(f"need d, H, M ≥ 1, got d={d}, H={H}, M={M}")
    if not len(a_upper) == len(a_lower) == len(u) == H:
        raise InputError(f"per-component sequences must have length H = {H}")
    if any(v < 1.0 for v in u):
        raise ParameterError("condition-number bounds u_h must be at least 1")
    if not C1 > 0:
        raise ParameterError(f"C1 must be positive, got {C1}")
    a = max(a_upper)
    value = d * H * (math.log(a / (sigma * epsilon)) + math.log(M)) + H * math.log(C1 / epsilon)
    for hi, lo, uh in zip(a_upper, a_lower, u, strict=True):
        value += _shell_log(hi, lo, sigma, epsilon, d)
        value += d * (d - 1) / 2.0 * math.log(2.0 * d * uh / epsilon**2)
    return value


# --------------------------------------------------------------------------- #
#  Prior mass bounds
# --------------------------------------------------------------------------- #
class ComplementBound(BaseModel):
    stick_term: float = Field(description="{eα log(1/ε)/H}^H")
    tail_term: float = Field(description="H[e^{−c₁σ^{−2c₂}} + σ^{−2c₃}(1+ε/√d)^{−c₃M}]")
    log_stick_term: float

    @property
    def total(self) -> float:
        return self.stick_term + self.tail_term


def prior_complement_bound(p: SieveParams, d: int = 1) -> ComplementBound:
    """Bound on the prior mass outside the sieve, with the stick-breaking term reported separately."""
    p.ensure_valid()
    log_stick = p.H * (1.0 + math.log(p.alpha) - math.log(p.H) + math.log(math.log(1.0 / p.epsilon)))
    gaussian_part = math.exp(-p.c1 * p.sigma ** (-2.0 * p.c2))
    log_ladder = -2.0 * p.c3 * math.log(p.sigma) - p.c3 * p.M * math.log1p(p.epsilon / math.sqrt(d))
    tail = p.H * (gaussian_part + math.exp(log_ladder))
    return ComplementBound(stick_term=math.exp(min(log_stick, 700.0)), tail_term=tail, log_stick_term=log_stick)


def stick_tail_probability_mc(alpha: float, H: int, epsilon: float, n_draws: int, rng: np.random.Generator) -> float:
    """Monte Carlo P(Σ_{h>H} π_h > ε), i.e. P(∏_{h≤H}(1 − V_h) > ε)."""
    v = rng.beta(1.0, alpha, size=(n_draws, H))
    remainder = np.exp(np.sum(np.log1p(-v), axis=1))
    return float(np.mean(remainder > epsilon))


def _log_location_factor(j: int, r: float, n: int) -> float:
    if j == 1:
        return 0.0
    return min(0.0, -2.0 * (r + 1.0) * math.log(math.sqrt(n) * (j - 1)))


def _log_condition_factor(l: int, kappa: float, n: int) -> float:  # noqa: E741
    return -(2 ** (l - 1)) * kappa * math.log(n) if l >= 1 else 0.0


def cell_prior_mass_bound(cell: SieveCell, req: TailRequirements, n: int) -> float:
    """∏_h [√n(j_h−1)]^{−2(r+1)} n^{−1(l_h≥1)2^{l_h−1}κ}; the location factor is capped at 1."""
    return math.exp(log_cell_prior_mass_bound(cell, req, n))


def log_cell_prior_mass_bound(cell: SieveCell, req: TailRequirements, n: int) -> float:
    if n < 2:
        raise ParameterError(f"sample size must be at least 2, got {n}")
    return sum(
        _log_location_factor(j, req.r, n) + _log_condition_factor(l, req.kappa, n)
        for j, l in zip(cell.j, cell.l, strict=True)
    )


# --------------------------------------------------------------------------- #
#  Summability series
# --------------------------------------------------------------------------- #
class SummabilityResult(BaseModel):
    log_partial: float = Field(description="Log of the series truncated at (j_max, l_max)")
    log_upper: float = Field(description="Log of the truncated series plus its tail bounds")
    divergent: bool
    reasons: list[str] = Field(default_factory=list)
    H: int
    c4: float
    max_C: float
    complement_rate: float

    @property
    def value(self) -> float:
        return math.inf if self.divergent else math.exp(min(self.log_upper, 700.0))


def _log_sum(logs: Sequence[float]) -> float:
    top = max(logs)
    if top == -math.inf:
        return top
    return top + math.log(sum(math.exp(v - top) for v in logs))


def summability_series(
    p: SieveParams,
    req: TailRequirements,
    c: float,
    truncation: tuple[int, int] = (DEFAULT_J_MAX, DEFAULT_L_MAX),
    C1: float = 1.0,
) -> SummabilityResult:
    """Σ_{j,l} √N(ε, F_{n,j,l}) √Π(F_{n,j,l}) e^{−(4−c)nε²} over the cell partition.

    The sum factorises over components, so the per-component sums over j and l are
    evaluated up to ``truncation`` and closed with the analytic tail bounds:
    Σ_{j>J} j^{(d−1)/2}(j−1)^{−(r+1)} ≤ 2^{r+1}J^{1−q}/(q−1) with q = r+1−(d−1)/2,
    and Σ_{l>L} exp(−2^{l−1}β) ≤ e^{−(L+1)β}/(1−e^{−β}) with β = (κ−d(d−1)) log n / 2.
    """
    p.ensure_valid()
    j_max, l_max = truncation
    if j_max < 1 or l_max < 1:
        raise InputError(f"truncation must be at least (1, 1), got {truncation}")
    d, n, eps = req.d, p.n, p.epsilon
    reasons = []
    if not req.location_ok:
        reasons.append(f"r = {req.r} ≤ (d−1)/2 = {req.r_threshold}: location shells are not summable")
    if not req.condition_ok:
        reasons.append(f"κ = {req.kappa} ≤ d(d−1) = {req.kappa_threshold}: condition shells are not summable")
    common = {
        "H": p.H,
        "c4": p.c4,
        "max_C": max_sieve_constant(d, c, p.c2),
        "complement_rate": p.complement_rate(d),
    }
    if reasons:
        for reason in reasons:
            logger.info(f"summability diverges: {reason}")
        return SummabilityResult(log_partial=math.inf, log_upper=math.inf, divergent=True, reasons=reasons, **common)

    log_n = math.log(n)
    step = p.sigma * eps / 2.0
    root = math.sqrt(n)
    rotations = d * (d - 1) / 2.0

    # per-component constant: M^d · C₁/ε · (2d/ε²)^{d(d−1)/2}, halved for the square root
    log_const = 0.5 * (d * math.log(p.M) + math.log(C1 / eps) + rotations * math.log(2.0 * d / eps**2))

    def log_j_term(j: int) -> float:
        shell = _shell_log(root * j, root * (j - 1), p.sigma, eps, d)
        return 0.5 * (shell + 2.0 * _log_location_factor(j, req.r, n)) if j > 1 else 0.5 * shell

    def log_l_term(l: int) -> float:  # noqa: E741
        return 0.5 * (rotations * (2**l) * log_n + _log_condition_factor(l, req.kappa, n))

    j_logs = [log_j_term(j) for j in range(1, j_max + 1)]
    l_logs = [log_l_term(l) for l in range(0, l_max + 1)]
    log_j_partial = _log_sum(j_logs)
    log_l_partial = _log_sum(l_logs)

    # tails of the j and l sums
    q = req.r + 1.0 - (d - 1) / 2.0
    shell_coeff = math.log(d) + math.log(2.0 * root / step + 2.0) + (d - 1) * math.log(root / step + 1.0)
    log_j_tail = 0.5 * shell_coeff - (req.r + 1.0) * 0.5 * log_n + (req.r + 1.0) * math.log(2.0)
    log_j_tail += (1.0 - q) * math.log(j_max) - math.log(q - 1.0) if q > 1.0 else math.inf
    beta = (req.kappa - d * (d - 1)) * log_n / 2.0
    log_l_tail = -(l_max + 1) * beta - math.log(-math.expm1(-beta))

    exponent = -(4.0 - c) * n * eps**2
    log_partial = p.H * (log_const + log_j_partial + log_l_partial) + exponent
    log_upper = p.H * (log_const + _log_sum([log_j_partial, log_j_tail]) + _log_sum([log_l_partial, log_l_tail]))
    log_upper += exponent
    logger.debug(f"summability n={n} H={p.H}: log partial={log_partial:.4g}, log upper={log_upper:.4g}")
    return SummabilityResult(log_partial=log_partial, log_upper=log_upper, divergent=False, **common)


__all__ = [
    "SieveParams",
    "SieveCell",
    "NetTarget",
    "NetSpec",
    "ComplementBound",
    "SummabilityResult",
    "max_sieve_constant",
    "simplex_net",
    "simplex_net_size",
    "orthogonal_net_size_bound",
    "shell_net_size_bound",
    "eigen_ladder_size",
    "entropy_bound",
    "prior_complement_bound",
    "stick_tail_probability_mc",
    "cell_prior_mass_bound",
    "log_cell_prior_mass_bound",
    "summability_series",
]
