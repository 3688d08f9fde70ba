"""Exception hierarchy shared by every Mixtures module."""

from __future__ import annotations


class DPMixturesError(ValueError):
    """Any problem detected while building, sampling or checking a mixture model."""


class InputError(DPMixturesError):
    """Malformed caller input: dimension mismatches, empty or non-finite data."""


class DomainError(DPMixturesError):
    """A matrix is not symmetric positive definite."""


class ParameterError(DPMixturesError):
    """Hyperparameters outside the region where a prior or bound is defined."""


class EstimationError(DPMixturesError):
    """A Monte Carlo estimate or a fit could not be produced honestly."""


class PreconditionError(DPMixturesError):
    """An experiment precondition (for example the f0 regularity checks) failed."""


class ConfigError(DPMixturesError):
    """Unknown or invalid keys in a configuration file."""


class ParseError(DPMixturesError):
    """Malformed data file; the message names the offending line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


__all__ = [
    "DPMixturesError",
    "InputError",
    "DomainError",
    "ParameterError",
    "EstimationError",
    "PreconditionError",
    "ConfigError",
    "ParseError",
]
