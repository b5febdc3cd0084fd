"""Tests for configuration and logging setup."""

import json
import logging

import pytest
from pydantic import ValidationError

from src.config import Config
from src.logging import CustomJsonFormatter, setup_logging


class TestConfig:
    """Tests for settings validation."""

    def test_defaults(self):
        """Test the default settings."""
        config = Config()
        assert config.grid_size == 1024
        assert config.threads == 1
        assert config.log_level == "INFO"

    def test_env_prefix(self, monkeypatch):
        """Test SBC_* environment variables are read."""
        monkeypatch.setenv("SBC_GRID_SIZE", "512")
        monkeypatch.setenv("SBC_LOG_LEVEL", "debug")
        config = Config()
        assert config.grid_size == 512
        assert config.log_level == "DEBUG"

    @pytest.mark.parametrize("size", [128, 300, 1000])
    def test_grid_size_power_of_two(self, size):
        """Test grid sizes below 256 or not a power of two are rejected."""
        with pytest.raises(ValidationError):
            Config(grid_size=size)

    def test_threads_positive(self):
        """Test threads must be at least one."""
        with pytest.raises(ValidationError):
            Config(threads=0)

    def test_unknown_log_level(self):
        """Test unknown logging levels are rejected."""
        with pytest.raises(ValidationError):
            Config(log_level="LOUD")

    def test_positive_scales(self):
        """Test the imaginary half-period and dilation must be positive."""
        with pytest.raises(ValidationError):
            Config(omega_prime_im=0.0)
        with pytest.raises(ValidationError):
            Config(dilation=-1.0)

    def test_frozen(self):
        """Test settings cannot be mutated."""
        config = Config()
        with pytest.raises(ValidationError):
            config.seed = 3


class TestLogging:
    """Tests for logging setup."""

    def test_json_formatter_fields(self):
        """Test JSON records carry level, logger and extra fields."""
        formatter = CustomJsonFormatter("%(timestamp)s %(level)s %(name)s %(message)s")
        record = logging.LogRecord("src.hill", logging.INFO, __file__, 1, "Solved", None, None)
        record.residual = 1e-12
        data = json.loads(formatter.format(record))
        assert data["level"] == "INFO"
        assert data["logger"] == "src.hill"
        assert data["residual"] == 1e-12
        assert data["timestamp"]

    def test_setup_replaces_handlers(self, config):
        """Test setup_logging installs a single handler at the configured level."""
        setup_logging(config)
        setup_logging(config)
        root = logging.getLogger()
        assert len(root.handlers) == 1
        assert root.level == logging.INFO
        assert not isinstance(root.handlers[0].formatter, CustomJsonFormatter)

    def test_records_go_to_stderr(self, config, capsys):
        """Test log records are written to stderr and never to stdout."""
        setup_logging(config.model_copy(update={"log_json": True}))
        logging.getLogger("src.hill").info("Solved", extra={"residual": 1e-12})
        captured = capsys.readouterr()
        assert captured.out == ""
        record = json.loads(captured.err.strip().splitlines()[-1])
        assert record["message"] == "Solved"
        assert record["residual"] == 1e-12
