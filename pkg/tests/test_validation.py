"""Tests for validation utilities."""

import tempfile
from pathlib import Path

from tistar.utils.validation import (
    is_safe_prefix,
    parse_grid_option,
    validate_antisymmetric,
    validate_file_path,
    validate_square_matrix,
    validate_symmetric,
    validate_threads,
    validate_tolerance,
)


class TestValidation:
    """Test validation functions."""

    def test_parse_grid_option(self):
        """Test grid option parsing."""
        ok, parsed, _ = parse_grid_option("2,15,0.5")
        assert ok is True
        assert parsed == (2, 15, 0.5)

        ok, parsed, _ = parse_grid_option(" 1 , 9 , 1 ")
        assert ok is True
        assert parsed == (1, 9, 1.0)

        # Missing option means "use the defaults"
        ok, parsed, error = parse_grid_option(None)
        assert ok is True
        assert parsed is None
        assert error == ""

        ok, _, error = parse_grid_option("2,15")
        assert ok is False
        assert "m,N,dp" in error

        ok, _, error = parse_grid_option("two,15,1.0")
        assert ok is False
        assert "not numbers" in error

        ok, _, error = parse_grid_option("2,14,1.0")
        assert ok is False
        assert "odd" in error

        ok, _, error = parse_grid_option("0,15,1.0")
        assert ok is False
        assert "dimension" in error.lower()

        ok, _, error = parse_grid_option("2,15,-1")
        assert ok is False
        assert "positive" in error

        ok, _, _ = parse_grid_option("2,15,nan")
        assert ok is False

    def test_validate_tolerance(self):
        """Test tolerance validation."""
        valid, _ = validate_tolerance(1e-9)
        assert valid is True

        valid, error = validate_tolerance(0.0)
        assert valid is False
        assert "positive" in error

        valid, error = validate_tolerance(float("inf"))
        assert valid is False

        valid, error = validate_tolerance(2.0)
        assert valid is False
        assert "too loose" in error

    def test_validate_threads(self):
        """Test worker count validation."""
        valid, _ = validate_threads(1)
        assert valid is True

        valid, _ = validate_threads(8)
        assert valid is True

        valid, error = validate_threads(0)
        assert valid is False
        assert "positive" in error

        valid, error = validate_threads(1000)
        assert valid is False
        assert "too large" in error

    def test_validate_square_matrix(self):
        """Test square matrix validation."""
        valid, _ = validate_square_matrix([[1.0, 0.0], [0.0, 1.0]])
        assert valid is True

        valid, error = validate_square_matrix([[1.0, 0.0, 2.0], [0.0, 1.0, 2.0]])
        assert valid is False
        assert "square" in error

        valid, error = validate_square_matrix([[1.0, 0.0], [0.0, 1.0]], dim=3)
        assert valid is False
        assert "3x3" in error

        valid, error = validate_square_matrix([[1.0, float("nan")], [0.0, 1.0]])
        assert valid is False
        assert "finite" in error

        valid, error = validate_square_matrix([["a", "b"], ["c", "d"]])
        assert valid is False
        assert "real numbers" in error

    def test_validate_antisymmetric(self):
        """Test antisymmetric matrix validation."""
        valid, _ = validate_antisymmetric([[0.0, 0.3], [-0.3, 0.0]])
        assert valid is True

        valid, error = validate_antisymmetric([[0.0, 0.3], [0.3, 0.0]])
        assert valid is False
        assert "antisymmetric" in error

        valid, _ = validate_antisymmetric([[0.1, 0.0], [0.0, 0.0]])
        assert valid is False

    def test_validate_symmetric(self):
        """Test symmetric matrix validation."""
        valid, _ = validate_symmetric([[0.02, 0.01], [0.01, 0.03]])
        assert valid is True

        valid, error = validate_symmetric([[0.0, 0.3], [-0.3, 0.0]])
        assert valid is False
        assert "symmetric" in error

    def test_validate_file_path(self):
        """Test file path validation."""
        with tempfile.TemporaryDirectory() as temp_dir:
            spec = Path(temp_dir) / "moyal.yaml"
            spec.write_text("kind: zero\ndim: 1\n")

            valid, _ = validate_file_path(str(spec))
            assert valid is True

            valid, error = validate_file_path(str(Path(temp_dir) / "missing.yaml"))
            assert valid is False
            assert "does not exist" in error

            valid, error = validate_file_path(temp_dir)
            assert valid is False
            assert "not a file" in error

            valid, _ = validate_file_path(str(Path(temp_dir) / "new.yaml"), must_exist=False)
            assert valid is True

        valid, error = validate_file_path("/proc/self/status")
        assert valid is False
        assert "System directory" in error

    def test_is_safe_prefix(self):
        """Test CSV prefix validation."""
        assert is_safe_prefix("run") is True
        assert is_safe_prefix("out/run_01") is True
        assert is_safe_prefix("/tmp/scan/hodge") is True

        assert is_safe_prefix("") is False
        assert is_safe_prefix(".") is False
        assert is_safe_prefix("..") is False
        assert is_safe_prefix("../escape") is False
        assert is_safe_prefix("out/../../escape") is False
        assert is_safe_prefix("bad|name") is False
        assert is_safe_prefix("bad?name") is False
