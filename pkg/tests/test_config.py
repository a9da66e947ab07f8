# tests/test_config.py
import json
import logging
import os

import pytest

from augment.config import AugmentConfig
from config.logging_config import TRACE_LOGGER_NAME, get_logger, setup_logging
from config.model_loading import load_model, validate_range
from config.settings import Settings, parse_dims
from losses.spec import LossSpec
from volume.errors import ConfigError


def test_settings_defaults():
    settings = Settings.from_env(env_file=None)
    assert settings == Settings()
    assert settings.target_dims == (192, 192, 32)


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("LOSS_BENCH_LOG_LEVEL", "debug")
    monkeypatch.setenv("LOSS_BENCH_TAU_MM", "2.5")
    monkeypatch.setenv("LOSS_BENCH_TARGET_DIMS", "96, 96, 16")
    monkeypatch.setenv("LOSS_BENCH_WORKERS", "0")
    monkeypatch.setenv("LOSS_BENCH_LOG_TO_FILE", "yes")
    settings = Settings.from_env(env_file=None)
    assert settings.log_level == "DEBUG"
    assert settings.tau_mm == 2.5
    assert settings.target_dims == (96, 96, 16)
    assert settings.workers == 1
    assert settings.log_to_file is True


def test_settings_read_dotenv_file(tmp_path):
    env_file = tmp_path / ".env"
    env_file.write_text("LOSS_BENCH_WORKERS=4\n")
    try:
        assert Settings.from_env(env_file=str(env_file)).workers == 4
    finally:
        os.environ.pop("LOSS_BENCH_WORKERS", None)


@pytest.mark.parametrize("raw", ["1,2", "1,2,3,4", "a,b,c"])
def test_parse_dims_rejects(raw):
    with pytest.raises(ValueError):
        parse_dims(raw)


def test_trace_logger_writes_its_own_file(tmp_path):
    setup_logging(log_level="INFO", log_dir=str(tmp_path), enable_file_logging=True,
                  enable_console_logging=False)
    trace = get_logger(TRACE_LOGGER_NAME)
    assert isinstance(trace, logging.Logger) and not trace.propagate
    trace.info("Dice step=0 loss=0.5")
    get_logger("tests").info("structured_event", answer=42)
    for handler in logging.getLogger().handlers + trace.handlers:
        handler.flush()

    assert "Dice step=0 loss=0.5" in (tmp_path / f"{TRACE_LOGGER_NAME}.log").read_text()
    main_log = (tmp_path / "loss_bench.log").read_text()
    assert "structured_event" in main_log
    assert "Dice step=0" not in main_log


def test_load_model_accepts_flexible_sources(tmp_path):
    path = tmp_path / "augment.json"
    path.write_text(json.dumps({"seed": 12}))
    instance = AugmentConfig(seed=3)
    assert load_model(AugmentConfig, instance) is instance
    assert load_model(AugmentConfig, {"seed": 5}).seed == 5
    assert load_model(AugmentConfig, '{"seed": 6}').seed == 6
    assert load_model(AugmentConfig, path).seed == 12
    assert load_model(AugmentConfig, str(path)).seed == 12


def test_load_model_errors(tmp_path):
    with pytest.raises(ConfigError, match="neither JSON nor an existing file"):
        load_model(LossSpec, str(tmp_path / "missing.json"))
    with pytest.raises(ConfigError, match="LossSpec"):
        load_model(LossSpec, {"epsilon": -1})


def test_validate_range():
    assert validate_range((1.0, 2.0), "r", low_bound=1.0) == (1.0, 2.0)
    with pytest.raises(ValueError, match="ordered"):
        validate_range((2.0, 1.0), "r")
    with pytest.raises(ValueError, match=">="):
        validate_range((0.5, 1.0), "r", low_bound=1.0)
