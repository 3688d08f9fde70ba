import os
import sys
import textwrap

import pytest
import toml

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from Mixtures.config import experiment_from_dict, load_base_measure, load_experiment, read_toml
from Mixtures.errors import ConfigError
from Mixtures.priors import LocationKind, SpectralParams

EXPERIMENT = textwrap.dedent(
    """
    [prior]
    family = "iw"
    d = 1
    nu = 8

    [f0]
    weights = [0.5, 0.5]
    means = [[-1.0], [1.0]]
    covs = [[[1.0]], [[0.5]]]
    eta = 0.5

    [mcmc]
    iterations = 40
    burn_in = 10

    [experiment]
    n_grid = [50, 100]
    replicates = 3
    seed = 7
    metric = "l1"
    """
)


def write(tmp_path, text, name="config.toml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_prior_file_defaults_location(tmp_path):
    path = write(tmp_path, '[prior]\nfamily = "spectral"\nd = 2\na = 3.0\nb = 1.0\nkappa_rot = 2.0\n')
    spec = load_base_measure(path)
    assert isinstance(spec.covariance, SpectralParams)
    assert spec.location.d == 2
    assert spec.location.kind is LocationKind.HIERARCHICAL


def test_prior_file_with_fixed_location(tmp_path):
    text = '[prior]\nfamily = "iw"\nd = 1\nnu = 4\n\n[location]\nkind = "fixed"\nscale = [[2.0]]\n'
    spec = load_base_measure(write(tmp_path, text))
    assert spec.location.kind is LocationKind.FIXED
    assert spec.location.scale == [[2.0]]


def test_missing_dimension(tmp_path):
    with pytest.raises(ConfigError):
        load_base_measure(write(tmp_path, '[prior]\nfamily = "iw"\nnu = 4\n'))


def test_unknown_family(tmp_path):
    with pytest.raises(ConfigError):
        load_base_measure(write(tmp_path, '[prior]\nfamily = "wishart"\nd = 1\n'))


def test_unknown_prior_key(tmp_path):
    with pytest.raises(ConfigError):
        load_base_measure(write(tmp_path, '[prior]\nfamily = "iw"\nd = 1\nnu = 4\nshape = 2\n'))


def test_invalid_toml(tmp_path):
    with pytest.raises(ConfigError):
        read_toml(write(tmp_path, "[prior\nfamily = "))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        read_toml(tmp_path / "absent.toml")


def test_experiment_file(tmp_path):
    config = load_experiment(write(tmp_path, EXPERIMENT))
    assert config.n_grid == [50, 100]
    assert config.replicates == 3
    assert config.metric.value == "l1"
    assert config.mcmc.seed == 7
    assert config.mcmc.iterations == 40
    assert config.f0.eta == 0.5
    assert config.f0.density.size == 2
    assert config.model.alpha == 1.0


def test_experiment_unknown_table(tmp_path):
    with pytest.raises(ConfigError):
        load_experiment(write(tmp_path, EXPERIMENT + "\n[plots]\nshow = true\n"))


def test_experiment_unknown_f0_key():
    data = toml.loads(EXPERIMENT)
    data["f0"]["mode"] = 0
    with pytest.raises(ConfigError):
        experiment_from_dict(data)


def test_experiment_bad_burn_in():
    data = toml.loads(EXPERIMENT)
    data["mcmc"]["burn_in"] = 100
    with pytest.raises(ConfigError):
        experiment_from_dict(data)


def test_experiment_unsorted_grid():
    data = toml.loads(EXPERIMENT)
    data["experiment"]["n_grid"] = [100, 50]
    with pytest.raises(ConfigError):
        experiment_from_dict(data)


def test_experiment_f0_weights_above_one():
    data = toml.loads(EXPERIMENT)
    data["f0"]["weights"] = [0.8, 0.8]
    with pytest.raises(ConfigError):
        experiment_from_dict(data)

