"""TOML configuration for priors and consistency experiments.

A prior file holds a ``[prior]`` table (covariance family and its hyperparameters)
and an optional ``[location]`` table. An experiment file adds ``[f0]``, ``[mcmc]``
and ``[experiment]``::

    [prior]
    family = "iw"
    d = 1
    nu = 8

    [f0]
    weights = [1.0]
    means = [[0.0]]
    covs = [[[1.0]]]

    [mcmc]
    iterations = 400
    burn_in = 100

    [experiment]
    n_grid = [100, 500, 2000]
    replicates = 5
    epsilon_ball = 0.3
    seed = 7

Unknown keys are rejected.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import toml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .consistency_harness import ExperimentConfig
from .core_math import MixtureDensity
from .distances import Metric
from .errors import ConfigError, DPMixturesError
from .f0_checker import F0Spec
from .posterior_sampler import DPMixtureModel, MCMCConfig
from .priors import BaseMeasureSpec

logger = logging.getLogger("DPMixtures.Config")

_F0_KEYS = {"weights", "means", "covs", "eta", "delta", "M"}


class _ExperimentTable(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_grid: list[int]
    replicates: int = 1
    epsilon_ball: float = 0.3
    seed: int = 0
    alpha: float = 1.0
    truncation: int | None = None
    metric: Metric = Metric.HELLINGER
    distance_budget: int = 10_000
    standardize: bool = False
    record_seconds: bool = Field(default=True, description="Write wall times; false writes 0.0 for byte-stable CSVs")


def read_toml(path: str | Path) -> dict[str, Any]:
    try:
        return toml.load(str(path))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except toml.TomlDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc


def _table(data: dict[str, Any], name: str, required: bool = True) -> dict[str, Any]:
    table = data.get(name)
    if table is None:
        if required:
            raise ConfigError(f"missing [{name}] table")
        return {}
    if not isinstance(table, dict):
        raise ConfigError(f"[{name}] must be a table")
    return dict(table)


def base_measure_from_dict(data: dict[str, Any]) -> BaseMeasureSpec:
    """Build the base measure from parsed ``[prior]`` and ``[location]`` tables."""
    prior = _table(data, "prior")
    location = _table(data, "location", required=False)
    if "d" not in prior:
        raise ConfigError("[prior] needs the dimension 'd'")
    location.setdefault("d", prior["d"])
    try:
        return BaseMeasureSpec(location=location, covariance=prior)
    except ValidationError as exc:
        raise ConfigError(f"invalid prior configuration: {exc}") from exc


def load_base_measure(path: str | Path) -> BaseMeasureSpec:
    spec = base_measure_from_dict(read_toml(path))
    logger.info(f"loaded {spec.covariance.family} prior (d={spec.d}) from {path}")
    return spec


def _f0_from_table(table: dict[str, Any]) -> F0Spec:
    unknown = set(table) - _F0_KEYS
    if unknown:
        raise ConfigError(f"unknown keys in [f0]: {sorted(unknown)}")
    try:
        density = MixtureDensity.from_dict(table)
        extras = {k: table[k] for k in ("eta", "delta", "M") if k in table}
        return F0Spec(density=density, **extras)
    except ValidationError as exc:
        raise ConfigError(f"invalid [f0] table: {exc}") from exc
    except DPMixturesError as exc:
        raise ConfigError(f"invalid [f0] density: {exc}") from exc


def experiment_from_dict(data: dict[str, Any]) -> ExperimentConfig:
    unknown = set(data) - {"prior", "location", "f0", "mcmc", "experiment"}
    if unknown:
        raise ConfigError(f"unknown tables: {sorted(unknown)}")
    base = base_measure_from_dict(data)
    f0 = _f0_from_table(_table(data, "f0"))
    try:
        exp = _ExperimentTable(**_table(data, "experiment"))
        mcmc = MCMCConfig(**_table(data, "mcmc"), seed=exp.seed, standardize=exp.standardize)
        model = DPMixtureModel(alpha=exp.alpha, base=base, truncation=exp.truncation)
        return ExperimentConfig(
            f0=f0,
            n_grid=exp.n_grid,
            replicates=exp.replicates,
            model=model,
            mcmc=mcmc,
            epsilon_ball=exp.epsilon_ball,
            seed=exp.seed,
            metric=exp.metric,
            distance_budget=exp.distance_budget,
            record_seconds=exp.record_seconds,
        )
    except (ValidationError, TypeError) as exc:
        raise ConfigError(f"invalid experiment configuration: {exc}") from exc


def load_experiment(path: str | Path) -> ExperimentConfig:
    config = experiment_from_dict(read_toml(path))
    logger.info(f"loaded experiment from {path}: n_grid={config.n_grid}, replicates={config.replicates}")
    return config


__all__ = [
    "read_toml",
    "base_measure_from_dict",
    "load_base_measure",
    "experiment_from_dict",
    "load_experiment",
]
