import csv
import json
import math
import os
import sys

import numpy as np
import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from main import main
from Mixtures.core_math import MixtureDensity
from Mixtures.posterior_sampler import PosteriorDraws

IW_PRIOR = '[prior]\nfamily = "iw"\nd = 1\nnu = 6\n'


@pytest.fixture(autouse=True)
def in_tmp(tmp_path, monkeypatch):
    # log files land in ./logs
    monkeypatch.chdir(tmp_path)
    return tmp_path


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_sieve_entropy_csv(in_tmp):
    out = in_tmp / "entropy.csv"
    code = main(["sieve", "--mode", "entropy", "--epsilon", "1", "--u", "1", "--out", str(out)])
    assert code == 0
    with open(out, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["key", "value"]
    assert float(rows[1][1]) == pytest.approx(math.log(4.0))


def test_sieve_summability_needs_n():
    assert main(["sieve", "--mode", "summability"]) == 2


def test_sieve_summability_divergent_is_reported(capsys):
    code = main(["sieve", "--mode", "summability", "--n", "1000", "--d", "2", "--r", "2", "--kappa", "1.5"])
    assert code == 0
    assert "not summable" in capsys.readouterr().out


def test_distance_between_mixture_files(in_tmp, capsys):
    f = write(in_tmp / "f.json", json.dumps(MixtureDensity.single([0.0], [[1.0]]).to_dict()))
    g = write(in_tmp / "g.json", json.dumps(MixtureDensity.single([1.0], [[1.0]]).to_dict()))
    assert main(["distance", "--f", f, "--g", g, "--budget", "20000"]) == 0
    assert "hellinger distance" in capsys.readouterr().out


def test_distance_bad_json(in_tmp, capsys):
    f = write(in_tmp / "f.json", "{not json")
    assert main(["distance", "--f", f, "--g", f]) == 2
    assert "not valid JSON" in capsys.readouterr().err


def test_constraints_exit_codes(in_tmp):
    good = write(in_tmp / "good.toml", IW_PRIOR)
    bad = write(in_tmp / "bad.toml", '[prior]\nfamily = "spectral"\nd = 3\na = 2.0\nb = 1.0\n')
    assert main(["constraints", "--prior", good]) == 0
    assert main(["constraints", "--prior", bad]) == 1


def test_missing_prior_file(in_tmp, capsys):
    assert main(["constraints", "--prior", str(in_tmp / "absent.toml")]) == 2
    assert "error" in capsys.readouterr().err


def test_tails_with_grid(in_tmp):
    prior = write(in_tmp / "prior.toml", IW_PRIOR.replace("d = 1", "d = 2"))
    out = in_tmp / "tail.csv"
    code = main(
        ["tails", "--prior", prior, "--grid", "1:1000:30", "--samples", "50000", "--seed", "1", "--out", str(out)]
    )
    assert code == 0
    assert out.read_text(encoding="utf-8").startswith("x,survival,stderr")


def test_tails_bad_grid(in_tmp):
    prior = write(in_tmp / "prior.toml", IW_PRIOR)
    assert main(["tails", "--prior", prior, "--grid", "1:oops", "--samples", "50000"]) == 2


def test_fit_writes_draws(in_tmp):
    data = np.random.default_rng(0).standard_normal((40, 1))
    np.savetxt(in_tmp / "data.csv", data, delimiter=",")
    prior = write(in_tmp / "prior.toml", IW_PRIOR)
    out = in_tmp / "fit.json"
    code = main(
        [
            "fit",
            "--data",
            str(in_tmp / "data.csv"),
            "--prior",
            prior,
            "--trunc",
            "5",
            "--iters",
            "30",
            "--burnin",
            "10",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    draws = PosteriorDraws.from_dict(json.loads(out.read_text(encoding="utf-8")))
    assert len(draws) == 20


def test_fit_rejects_bad_mcmc_settings(in_tmp):
    np.savetxt(in_tmp / "data.csv", np.zeros((5, 1)), delimiter=",")
    prior = write(in_tmp / "prior.toml", IW_PRIOR)
    args = ["fit", "--data", str(in_tmp / "data.csv"), "--prior", prior, "--iters", "10", "--burnin", "20"]
    assert main(args) == 2


def test_check_f0(in_tmp):
    f0 = write(in_tmp / "f0.json", json.dumps(MixtureDensity.single([0.0, 0.0], np.eye(2)).to_dict()))
    assert main(["check-f0", "--f0", f0, "--M", "0.2", "--budget", "5000"]) == 0
    assert main(["check-f0", "--f0", f0, "--M", "0.1", "--budget", "5000"]) == 1


def test_consistency_end_to_end(in_tmp, capsys):
    config = write(
        in_tmp / "experiment.toml",
        IW_PRIOR
        + "\n[f0]\nweights = [1.0]\nmeans = [[0.0]]\ncovs = [[[1.0]]]\n"
        + "\n[mcmc]\niterations = 20\nburn_in = 10\n"
        + "\n[experiment]\nn_grid = [20]\ntruncation = 4\nrecord_seconds = false\n",
    )
    assert main(["consistency", "--config", config, "--out-dir", str(in_tmp / "out")]) == 0
    assert (in_tmp / "out" / "results.csv").exists()
    assert (in_tmp / "out" / "manifest.json").exists()
    assert "median_dist" in capsys.readouterr().out
