import pytest

from rmt_linstats.config import DEFAULTS, ensemble_specs, resolve_config, statistic, validate_config
from rmt_linstats.ensembles import EnsembleSpec
from rmt_linstats.errors import ConfigError, DomainError


@pytest.fixture
def config_file(tmp_path):
    def write(text):
        path = tmp_path / "run.cfg"
        path.write_text(text)
        return str(path)
    return write


def test_defaults():
    config = resolve_config()
    assert config == DEFAULTS
    assert config.family == "gaussian"
    assert config.N == [4]
    assert ensemble_specs(config) == [EnsembleSpec("gaussian", 2, 4)]


def test_precedence(config_file):
    path = config_file("""
# ensemble
family = laguerre
beta = 4
N = 3, 5
alpha = 2.5
lambdas = 0.1
grid-nodes = 48
""")
    config = resolve_config({"beta": 2, "alpha": None, "seed": 9}, path)
    assert config.family == "laguerre"
    assert config.beta == 2
    assert config.N == [3, 5]
    assert config.alpha == 2.5
    assert config.lambdas == [0.1]
    assert config.grid_nodes == 48
    assert config.seed == 9
    assert ensemble_specs(config) == [EnsembleSpec("laguerre", 2, 3, 2.5), EnsembleSpec("laguerre", 2, 5, 2.5)]


def test_command_line_lists_are_normalized():
    config = resolve_config({"N": (2, 4), "points": 0.5})
    assert config.N == [2, 4]
    assert config.points == [0.5]


def test_gaussian_ensembles_ignore_alpha():
    config = resolve_config({"alpha": -5.0})
    assert ensemble_specs(config)[0].alpha is None


def test_statistic():
    F = statistic(resolve_config({"stat": "sech", "amplitude": 2.0, "center": 1.0, "scale": 0.5}))
    assert (F.family, F.amplitude, F.center, F.scale) == ("sech", 2.0, 1.0, 0.5)


@pytest.mark.parametrize("cli_values", [
    {"beta": 3},
    {"N": [0]},
    {"scale": 0.0},
    {"method": "galerkin"},
    {"format": "xml"},
    {"unknown_option": 1},
    {"samples": 0},
    # beta = 1 needs an even number of eigenvalues
    {"beta": 1, "N": [3]},
    {"family": "laguerre", "beta": 4, "alpha": -0.5},
    {"stat": "exponential", "center": 1.0},
])
def test_invalid_values(cli_values):
    with pytest.raises(ConfigError) as e:
        resolve_config(cli_values)
    assert e.value.message.startswith("invalid configuration")


def test_config_error_is_a_domain_error():
    with pytest.raises(DomainError):
        validate_config(dict(DEFAULTS, beta=5))


def test_unreadable_config_file(tmp_path, config_file):
    with pytest.raises(ConfigError):
        resolve_config(config_path=str(tmp_path / "missing.cfg"))
    with pytest.raises(ConfigError) as e:
        resolve_config(config_path=config_file("beta 2\n"))
    assert "cannot parse" in e.value.message


def test_json_config_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text('{"family": "laguerre", "beta": 1, "N": [4, 6], "alpha": 0.5, "lambdas": [0.2, -0.1],'
                    ' "suite": "asymptotics"}')
    config = resolve_config({"seed": 3}, str(path))
    assert config.family == "laguerre"
    assert config.N == [4, 6]
    assert config.lambdas == [0.2, -0.1]
    assert config.suite == "asymptotics"
    assert config.seed == 3
    assert ensemble_specs(config)[1] == EnsembleSpec("laguerre", 1, 6, 0.5)


def test_json_config_scalars_become_lists(tmp_path):
    path = tmp_path / "run.json"
    path.write_text('{"N": 8, "points": 0.5}')
    config = resolve_config(config_path=str(path))
    assert config.N == [8]
    assert config.points == [0.5]


@pytest.mark.parametrize("text,message", [
    ('{"beta": 2,', "cannot parse"),
    ('[1, 2]', "cannot parse"),
    ('{"beta": "two"}', "invalid configuration at beta"),
    ('{"N": [2, 0]}', "invalid configuration at N/1"),
    ('{"grid-nodes": 40}', "invalid configuration"),
])
def test_json_config_is_validated(tmp_path, text, message):
    path = tmp_path / "run.json"
    path.write_text(text)
    with pytest.raises(ConfigError) as e:
        resolve_config(config_path=str(path))
    assert e.value.message.startswith(message)
