import json
import os
import sys

import numpy as np
import pytest
from pydantic import ValidationError

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from Mixtures.consistency_harness import (
    RESULT_COLUMNS,
    ExperimentConfig,
    ExperimentResult,
    ResultRow,
    ingest_data,
    read_results,
    run,
    run_async,
    run_job,
    summarize,
    write_results,
)
from Mixtures.core_math import MixtureDensity
from Mixtures.errors import InputError, ParseError, PreconditionError
from Mixtures.f0_checker import F0Spec
from Mixtures.posterior_sampler import DPMixtureModel, MCMCConfig
from Mixtures.priors import BaseMeasureSpec, IWParams, LocationPriorSpec


def small_config(**overrides):
    base = BaseMeasureSpec(location=LocationPriorSpec(d=1), covariance=IWParams(d=1, nu=5.0))
    fields = {
        "f0": F0Spec(density=MixtureDensity.single([0.0], [[1.0]])),
        "n_grid": [20, 40],
        "replicates": 2,
        "model": DPMixtureModel(alpha=1.0, base=base, truncation=5),
        "mcmc": MCMCConfig(iterations=25, burn_in=15),
        "seed": 3,
        "distance_budget": 10_000,
        "record_seconds": False,
    }
    fields.update(overrides)
    return ExperimentConfig(**fields)


def test_grid_must_increase():
    with pytest.raises(ValidationError):
        small_config(n_grid=[40, 20])
    with pytest.raises(ValidationError):
        small_config(n_grid=[])


def test_f0_dimension_must_match_model():
    with pytest.raises(ValidationError):
        small_config(f0=F0Spec(density=MixtureDensity.single([0.0, 0.0], np.eye(2))))


def test_job_is_reproducible():
    config = small_config()
    a = run_job(config, 20, 1)
    b = run_job(config, 20, 1)
    assert a == b
    assert 0.0 <= a.exceedance_frac <= 1.0
    assert a.seconds == 0.0


def test_run_rows_sorted_and_complete():
    result = run(small_config())
    assert [(r.n, r.replicate) for r in result.rows] == [(20, 0), (20, 1), (40, 0), (40, 1)]
    assert len({r.seed for r in result.rows}) == 4


async def test_worker_count_does_not_change_rows():
    config = small_config(n_grid=[20], replicates=2)
    serial = await run_async(config, workers=1)
    parallel = await run_async(config, workers=2)
    assert serial.rows == parallel.rows


def test_irregular_f0_is_rejected():
    config = small_config(f0=F0Spec(density=MixtureDensity.single([0.0], [[1.0]]), M=0.1))
    with pytest.raises(PreconditionError):
        run(config)


def test_bad_worker_count():
    with pytest.raises(InputError):
        run(small_config(), workers=0)


def test_summary_medians():
    rows = [
        ResultRow(n=10, replicate=r, distance_mean=d, exceedance_frac=e, seconds=0.0, seed=r)
        for r, (d, e) in enumerate([(0.1, 0.0), (0.3, 0.5), (0.2, 1.0)])
    ]
    (summary,) = summarize(ExperimentResult(rows=rows))
    assert summary.replicates == 3
    assert summary.median_distance == pytest.approx(0.2)
    assert summary.iqr_distance == pytest.approx(0.1)
    assert summary.median_exceedance == pytest.approx(0.5)


def test_results_written_and_read_back(tmp_path):
    config = small_config(n_grid=[20], replicates=1)
    result = run(config)
    csv_path, manifest_path = write_results(result, config, tmp_path)
    header = csv_path.read_text(encoding="utf-8").splitlines()[0]
    assert header == ",".join(RESULT_COLUMNS)
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    assert manifest["metric"] == "hellinger"
    assert manifest["config"]["n_grid"] == [20]
    assert "python" in manifest["project"]
    assert read_results(tmp_path).rows == result.rows


def test_results_are_byte_stable(tmp_path):
    config = small_config(n_grid=[20], replicates=1)
    write_results(run(config), config, tmp_path / "a")
    write_results(run(config), config, tmp_path / "b")
    assert (tmp_path / "a" / "results.csv").read_bytes() == (tmp_path / "b" / "results.csv").read_bytes()


def test_ingest_csv_with_header(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("x,y\n1.0,2.0\n\n3.5,-1\n", encoding="utf-8")
    data = ingest_data(path, header=True)
    assert data.shape == (2, 2)
    assert data[1, 0] == 3.5


def test_ingest_reports_line_of_bad_row(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("1.0,2.0\n3.0\n", encoding="utf-8")
    with pytest.raises(ParseError) as err:
        ingest_data(path)
    assert err.value.line == 2


def test_ingest_rejects_non_numeric(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("1.0\nabc\n", encoding="utf-8")
    with pytest.raises(ParseError, match="line 2"):
        ingest_data(path)


def test_ingest_missing_file(tmp_path):
    with pytest.raises(InputError):
        ingest_data(tmp_path / "absent.csv")
