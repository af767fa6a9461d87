"""
Test experiment configuration loading, validation and environment overrides
"""
from pathlib import Path

import pytest
import yaml

from hilbert_lab.config.base import BaseConfig
from hilbert_lab.config.experiment import ExperimentConfig
from hilbert_lab.utils.errors import ConfigError, ErrorCode
from hilbert_lab.utils.io import config_hash

DOCUMENT = {
    "domain": {"kind": "p_ball", "n": 2, "p": 4.0},
    "group": {"family": "triangle_rotation", "p": 3, "q": 3, "r": 4},
    "experiment": {"x": [0.1, 0.2], "direction": [1.0, 0.0], "horizon": 12.0, "max_len": 6},
    "run": {"seed": 11, "threads": 2},
}


def _write(tmp_path: Path, document) -> Path:
    path = tmp_path / "experiment.yaml"
    path.write_text(yaml.safe_dump(document))
    return path


def test_defaults_are_valid():
    config = ExperimentConfig()
    assert config.validate() == []
    assert config.domain == {"kind": "ellipsoid", "n": 2}
    assert config.experiment.samples is None


def test_from_file(tmp_path):
    config = ExperimentConfig.from_file(_write(tmp_path, DOCUMENT))
    assert config.domain["p"] == 4.0
    assert config.experiment.x == [0.1, 0.2]
    assert config.experiment.horizon == 12.0
    assert config.run.seed == 11
    assert config.run.threads == 2
    assert config.validate() == []


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("")
    assert ExperimentConfig.from_file(path).document() == ExperimentConfig().document()


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError) as e:
        ExperimentConfig.from_file(tmp_path / "absent.yaml")
    assert e.value.code == ErrorCode.CONFIG_ERROR


def test_malformed_file(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("domain: [unclosed\n")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(path)


@pytest.mark.parametrize(
    "document",
    [
        {"plot": {"dpi": 300}},
        {"experiment": {"horizont": 3.0}},
        {"experiment": {"horizon": "long"}},
        ["domain", "group"],
    ],
)
def test_rejected_documents(document):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_document(document)


@pytest.mark.parametrize(
    "section,values,fragment",
    [
        ("experiment", {"radii": 4}, "radii"),
        ("experiment", {"r_max": 2.0}, "r_max"),
        ("experiment", {"horizon": -1.0}, "horizon"),
        ("experiment", {"max_len": 40}, "max_len"),
        ("experiment", {"scales": [1e-3, 0.0]}, "scales"),
        ("domain", {"kind": "torus"}, "domain kind"),
        ("group", {"family": "tetrahedral"}, "group family"),
        ("run", {"threads": 0}, "threads"),
    ],
)
def test_validation_errors(section, values, fragment):
    config = ExperimentConfig.from_document({section: values})
    errors = config.validate()
    assert any(fragment in error for error in errors)


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("HILBERT_RUN_SEED", "42")
    monkeypatch.setenv("HILBERT_NUMERICS_TRANSIENT_FRACTION", "0.3")
    monkeypatch.setenv("HILBERT_LOGGING_ENABLE_JSON_LOGGING", "true")
    config = BaseConfig.from_env()
    assert config.run.seed == 42
    assert config.numerics.transient_fraction == 0.3
    assert config.logging.enable_json_logging is True


def test_document_overrides_environment(monkeypatch):
    monkeypatch.setenv("HILBERT_RUN_SEED", "42")
    assert ExperimentConfig.from_document({}).run.seed == 42
    assert ExperimentConfig.from_document({"run": {"seed": 5}}).run.seed == 5


def test_invalid_environment_value_ignored(monkeypatch):
    monkeypatch.setenv("HILBERT_RUN_THREADS", "many")
    assert BaseConfig.from_env().run.threads == 1


def test_hash_is_stable_and_sensitive():
    first = ExperimentConfig.from_document(DOCUMENT)
    second = ExperimentConfig.from_document(DOCUMENT)
    assert config_hash(first.document()) == config_hash(second.document())
    second.run.seed = 12
    assert config_hash(first.document()) != config_hash(second.document())
    # Thread count does not change results.
    second.run.seed = 11
    second.run.threads = 8
    assert config_hash(first.document()) == config_hash(second.document())
