"""Empirical posterior-consistency experiments.

For each sample size n in the grid and each replicate, a job draws n points from f₀,
fits the DP mixture and records the posterior mean distance to f₀ together with the
fraction of posterior snapshots farther than ε. Job (n, replicate) draws all of its
randomness from the seed derived from (seed, n, replicate), so results do not depend
on the number of workers or on scheduling order.
"""

from __future__ import annotations

import asyncio
import csv
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from utilities.project_info import run_metadata

from .distances import Metric
from .errors import InputError, ParseError, PreconditionError
from .f0_checker import F0Report, F0Spec, check_f0
from .posterior_sampler import DPMixtureModel, MCMCConfig, fit, posterior_distance_trace
from .random_streams import derived_seed, stream

logger = logging.getLogger("DPMixtures.Harness")

RESULTS_FILE = "results.csv"
MANIFEST_FILE = "manifest.json"
RESULT_COLUMNS = ("n", "replicate", "hellinger_mean", "exceedance_frac", "seconds", "seed")


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    f0: F0Spec
    n_grid: list[int] = Field(description="Strictly increasing sample sizes")
    replicates: int = Field(default=1, ge=1)
    model: DPMixtureModel
    mcmc: MCMCConfig
    epsilon_ball: float = Field(default=0.3, gt=0, description="ε of the exceedance statistic")
    seed: int = 0
    metric: Metric = Metric.HELLINGER
    distance_budget: int = Field(default=10_000, description="Monte Carlo budget per snapshot distance")
    record_seconds: bool = True

    @model_validator(mode="after")
    def _check_grid(self) -> ExperimentConfig:
        if not self.n_grid:
            raise ValueError("n_grid is empty")
        if any(n < 1 for n in self.n_grid) or any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:], strict=False)):
            raise ValueError(f"n_grid must be strictly increasing positive integers, got {self.n_grid}")
        if self.f0.density.dim != self.model.d:
            raise ValueError(f"f0 has dimension {self.f0.density.dim}, model has {self.model.d}")
        return self


class ResultRow(BaseModel):
    n: int
    replicate: int
    distance_mean: float = Field(description="Posterior mean distance to f₀ in the configured metric")
    exceedance_frac: float = Field(ge=0.0, le=1.0)
    seconds: float
    seed: int


class ExperimentResult(BaseModel):
    rows: list[ResultRow]
    metric: Metric = Metric.HELLINGER
    epsilon_ball: float = 0.3


class SummaryRow(BaseModel):
    n: int
    replicates: int
    median_distance: float
    iqr_distance: float
    median_exceedance: float


# --------------------------------------------------------------------------- #
#  Jobs
# --------------------------------------------------------------------------- #
def run_job(config: ExperimentConfig, n: int, replicate: int) -> ResultRow:
    """Simulate, fit and score one (n, replicate) cell."""
    job_seed = derived_seed(config.seed, n, replicate)
    start = time.perf_counter()
    data = config.f0.density.normalized().sample(n, stream(job_seed, 1))
    draws = fit(data, config.model, config.mcmc.model_copy(update={"seed": job_seed}))
    trace = np.asarray(
        posterior_distance_trace(draws, config.f0.density, config.distance_budget, stream(job_seed, 2), config.metric)
    )
    seconds = time.perf_counter() - start if config.record_seconds else 0.0
    return ResultRow(
        n=n,
        replicate=replicate,
        distance_mean=float(np.mean(trace)),
        exceedance_frac=float(np.mean(trace > config.epsilon_ball)),
        seconds=seconds,
        seed=job_seed,
    )


def ensure_f0_regular(config: ExperimentConfig) -> F0Report:
    report = check_f0(config.f0, config.distance_budget, stream(config.seed, 0))
    if not report.passed:
        names = ", ".join(c.name for c in report.failing)
        raise PreconditionError(f"f0 fails the regularity checks: {names}")
    return report


async def run_async(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Fan the (n, replicate) jobs out over a bounded pool and collect sorted rows."""
    if workers < 1:
        raise InputError(f"workers must be at least 1, got {workers}")
    ensure_f0_regular(config)
    loop = asyncio.get_running_loop()
    semaphore = asyncio.Semaphore(workers)
    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None

    async def one(n: int, replicate: int) -> ResultRow:
        async with semaphore:
            row = await loop.run_in_executor(executor, run_job, config, n, replicate)
        logger.info(
            f"n={n} replicate={replicate}: distance {row.distance_mean:.4f}, "
            f"exceedance {row.exceedance_frac:.3f} ({row.seconds:.1f}s)"
        )
        return row

    jobs = [one(n, r) for n in config.n_grid for r in range(config.replicates)]
    try:
        rows = await asyncio.gather(*jobs)
    finally:
        if executor is not None:
            executor.shutdown()
    rows = sorted(rows, key=lambda row: (row.n, row.replicate))
    return ExperimentResult(rows=rows, metric=config.metric, epsilon_ball=config.epsilon_ball)


def run(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    return asyncio.run(run_async(config, workers))


def summarize(result: ExperimentResult) -> list[SummaryRow]:
    """Per n: median and IQR of the posterior mean distance, median exceedance fraction."""
    if not result.rows:
        raise InputError("empty experiment result")
    out = []
    for n in sorted({row.n for row in result.rows}):
        rows = [row for row in result.rows if row.n == n]
        dist = np.array([row.distance_mean for row in rows])
        q1, q3 = np.percentile(dist, [25, 75])
        out.append(
            SummaryRow(
                n=n,
                replicates=len(rows),
                median_distance=float(np.median(dist)),
                iqr_distance=float(q3 - q1),
                median_exceedance=float(np.median([row.exceedance_frac for row in rows])),
            )
        )
    return out


# --------------------------------------------------------------------------- #
#  Files
# --------------------------------------------------------------------------- #
def ingest_data(path: str | Path, header: bool = False) -> np.ndarray:
    """Read an n×d matrix of finite reals from a CSV file."""
    rows: list[list[float]] = []
    width = None
    try:
        handle = open(path, newline="", encoding="utf-8")  # noqa: SIM115
    except OSError as exc:
        raise InputError(f"cannot read data file {path}: {exc}") from exc
    with handle:
        for lineno, record in enumerate(csv.reader(handle), start=1):
            if header and lineno == 1:
                continue
            if not record or all(not cell.strip() for cell in record):
                continue
            if width is None:
                width = len(record)
            elif len(record) != width:
                raise ParseError(f"expected {width} columns, found {len(record)}", line=lineno)
            try:
                values = [float(cell) for cell in record]
            except ValueError as exc:
                raise ParseError(f"non-numeric entry ({exc})", line=lineno) from exc
            if not np.all(np.isfinite(values)):
                raise ParseError("non-finite entry", line=lineno)
            rows.append(values)
    if not rows:
        raise ParseError(f"{path} contains no data rows")
    data = np.asarray(rows, dtype=float)
    logger.info(f"read {data.shape[0]} rows x {data.shape[1]} columns from {path}")
    return data


def write_results(
    result: ExperimentResult, config: ExperimentConfig | None, out_dir: str | Path, elapsed: float | None = None
) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / RESULTS_FILE
    with open(csv_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        for row in result.rows:
            writer.writerow(
                [row.n, row.replicate, repr(row.distance_mean), repr(row.exceedance_frac), repr(row.seconds), row.seed]
            )
    manifest: dict[str, Any] = {
        "metric": result.metric.value,
        "epsilon_ball": result.epsilon_ball,
        "rows": len(result.rows),
        "summary": [s.model_dump() for s in summarize(result)] if result.rows else [],
        "config": config.model_dump(mode="json") if config is not None else None,
        "project": run_metadata(),
        "elapsed_seconds": elapsed,
    }
    manifest_path = out / MANIFEST_FILE
    manifest_path.write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    logger.info(f"wrote {len(result.rows)} rows to {csv_path}")
    return csv_path, manifest_path


def read_results(out_dir: str | Path) -> ExperimentResult:
    out = Path(out_dir)
    manifest_path = out / MANIFEST_FILE
    manifest = json.loads(manifest_path.read_text(encoding="utf-8")) if manifest_path.exists() else {}
    rows = []
    with open(out / RESULTS_FILE, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(header) != RESULT_COLUMNS:
            raise ParseError(f"unexpected header {header}", line=1)
        for lineno, record in enumerate(reader, start=2):
            try:
                n, rep, dist, frac, secs, seed = record
                rows.append(
                    ResultRow(
                        n=int(n),
                        replicate=int(rep),
                        distance_mean=float(dist),
                        exceedance_frac=float(frac),
                        seconds=float(secs),
                        seed=int(seed),
                    )
                )
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from exc
    return ExperimentResult(
        rows=rows,
        metric=Metric(manifest.get("metric", Metric.HELLINGER.value)),
        epsilon_ball=manifest.get("epsilon_ball", 0.3),
    )


__all__ = [
    "ExperimentConfig",
    "ResultRow",
    "ExperimentResult",
    "SummaryRow",
    "run_job",
    "ensure_f0_regular",
    "run_async",
    "run",
    "summarize",
    "ingest_data",
    "write_results",
    "read_results",
]
