"""Dirichlet-process location-scale Gaussian mixtures with numerical consistency checks."""

from .core_math import GaussianComponent, MixtureDensity, SPDMatrix, StickBreaking, eval_gaussian, eval_mixture
from .errors import (
    ConfigError,
    DomainError,
    DPMixturesError,
    EstimationError,
    InputError,
    ParameterError,
    ParseError,
    PreconditionError,
)
from .priors import BaseMeasureSpec, FactorParams, IWParams, LocationPriorSpec, MGPParams, SpectralParams

__all__ = [
    "GaussianComponent",
    "MixtureDensity",
    "SPDMatrix",
    "StickBreaking",
    "eval_gaussian",
    "eval_mixture",
    "BaseMeasureSpec",
    "IWParams",
    "FactorParams",
    "MGPParams",
    "SpectralParams",
    "LocationPriorSpec",
    "DPMixturesError",
    "InputError",
    "DomainError",
    "ParameterError",
    "EstimationError",
    "PreconditionError",
    "ConfigError",
    "ParseError",
]
