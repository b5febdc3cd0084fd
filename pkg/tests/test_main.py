"""Tests for the command-line entry point."""

import json
from unittest.mock import patch

import pytest

from src.main import main


@pytest.fixture
def out_dir(tmp_path):
    return tmp_path / "out"


def _run(out_dir, *args: str) -> int:
    return main(["--out-dir", str(out_dir), *args])


class TestExitCodes:
    """Tests for the process exit codes."""

    def test_success(self, out_dir, capsys):
        """Test a successful job exits 0 and prints its results."""
        assert _run(out_dir, "poly", "rigidity", "--n", "7", "--k", "3") == 0
        results = json.loads(capsys.readouterr().out)
        assert results["kernel_dim"] == 3
        assert (out_dir / "manifest.json").exists()

    def test_bad_arguments(self, out_dir):
        """Test argument errors exit 2."""
        assert _run(out_dir, "poly", "rigidity", "--n", "seven", "--k", "3") == 2
        assert _run(out_dir, "nonsense") == 2

    def test_invalid_configuration(self, out_dir):
        """Test an invalid grid size exits 2."""
        assert _run(out_dir, "--grid-size", "300", "poly", "rigidity", "--n", "7",
                    "--k", "3") == 2

    def test_domain_error(self, out_dir):
        """Test out-of-range parameters exit 6."""
        assert _run(out_dir, "poly", "rigidity", "--n", "7", "--k", "4") == 6

    def test_unsupported(self, out_dir):
        """Test cases without a construction exit 6."""
        assert _run(out_dir, "poly", "construct", "--n", "7", "--k", "3") == 6

    def test_missing_input(self, out_dir, tmp_path):
        """Test an unreadable input file exits 3."""
        assert _run(out_dir, "curve", "verify", "--in", str(tmp_path / "absent.json"),
                    "--alpha", "0.5") == 3

    def test_unexpected_error(self, out_dir):
        """Test exceptions outside the error hierarchy exit 1."""
        with patch("src.main.JobService.poly_rigidity", side_effect=RuntimeError("boom")):
            assert _run(out_dir, "poly", "rigidity", "--n", "7", "--k", "3") == 1

    def test_version(self, capsys):
        """Test --version exits 0."""
        assert main(["--version"]) == 0
        assert "sbc" in capsys.readouterr().out


class TestOutput:
    """Tests for what the CLI prints."""

    def test_elliptic_values(self, out_dir, capsys):
        """Test elliptic eval prints one 're,im' line per point."""
        assert _run(out_dir, "elliptic", "eval", "--fn", "wp", "--z", "0.5,0.25",
                    "--z", "0.3,0") == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2
        for line in lines:
            re, im = (float(v) for v in line.split(","))
            assert abs(re) > 0.0 or abs(im) > 0.0

    def test_real_axis_value(self, out_dir, capsys):
        """Test ℘ is real on the real axis of a rectangular lattice."""
        assert _run(out_dir, "elliptic", "eval", "--z", "0.3,0") == 0
        _, im = (float(v) for v in capsys.readouterr().out.strip().split(","))
        assert abs(im) < 1e-10

    def test_logs_go_to_stderr(self, out_dir, capsys):
        """Test structured logs stay off stdout."""
        assert _run(out_dir, "--log-level", "INFO", "curve", "roots", "--u", "0.5",
                    "--interval", "0,10") == 0
        captured = capsys.readouterr()
        assert "count" in json.loads(captured.out)
        assert "Starting job" in captured.err
