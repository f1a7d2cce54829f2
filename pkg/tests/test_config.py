"""Tests for command-line configuration layers."""

import pytest
from pydantic import ValidationError

from hyphull.cli.config import (
    DEFAULT_SEED,
    get_default_seed,
    get_default_threads,
    load_config_file,
    normalize_key,
    resolve_settings,
)
from hyphull.cli.schemas import EstimateSettings
from hyphull.exceptions import InvalidConfigError


def test_default_seed(monkeypatch) -> None:
    """Test the built-in seed and the environment override."""
    monkeypatch.delenv("HYPHULL_SEED", raising=False)
    assert get_default_seed() == DEFAULT_SEED
    monkeypatch.setenv("HYPHULL_SEED", "123")
    assert get_default_seed() == 123


def test_invalid_environment_values(monkeypatch) -> None:
    """Test non-integer environment values raise."""
    monkeypatch.setenv("HYPHULL_SEED", "abc")
    with pytest.raises(InvalidConfigError):
        get_default_seed()
    monkeypatch.setenv("HYPHULL_THREADS", "many")
    with pytest.raises(InvalidConfigError):
        get_default_threads()


def test_threads_floor(monkeypatch) -> None:
    """Test the worker count is at least one."""
    monkeypatch.setenv("HYPHULL_THREADS", "0")
    assert get_default_threads() == 1


def test_normalize_key() -> None:
    """Test flag-style keys become field names."""
    assert normalize_key("--r-floor") == "r_floor"
    assert normalize_key(" Max-Panels ") == "max_panels"


def test_load_config_file(tmp_path) -> None:
    """Test dotenv-style files load with normalized keys."""
    config = tmp_path / "run.env"
    config.write_text("# comment\nestimator=xi-moment\nr-floor=1e-5\nT=1,2\n")
    assert load_config_file(config) == {"estimator": "xi-moment", "r_floor": "1e-5", "t": "1,2"}


def test_missing_config_file(tmp_path) -> None:
    """Test a missing file raises."""
    with pytest.raises(InvalidConfigError):
        load_config_file(tmp_path / "absent.env")


def test_resolve_precedence(monkeypatch) -> None:
    """Test flags beat the file and the file beats the environment."""
    monkeypatch.setenv("HYPHULL_SEED", "9")
    merged = resolve_settings({"n": 50, "seed": None}, {"n": "20", "dt": "0.01"})
    assert merged["n"] == 50
    assert merged["dt"] == "0.01"
    assert merged["seed"] == 9
    assert resolve_settings({}, {"seed": "4"})["seed"] == "4"


def test_settings_parse_lists_and_flags() -> None:
    """Test comma lists and string booleans."""
    settings = EstimateSettings.model_validate(
        {"estimator": "rb", "t": "0.5,1", "seed": "3", "check": "yes"}
    )
    assert settings.t == [0.5, 1.0]
    assert settings.check is True
    assert settings.snapshot()["t"] == "0.5,1.0"


def test_settings_validation() -> None:
    """Test out-of-range settings raise."""
    with pytest.raises(ValidationError):
        EstimateSettings.model_validate({"estimator": "rb", "seed": 1, "n": 1})
    with pytest.raises(ValidationError):
        EstimateSettings.model_validate({"estimator": "rb", "seed": -1})
