"""
Input validation utilities for tistar.

Provides validation functions for CLI option strings, file paths,
and the matrices that parametrize generator families.
"""

from pathlib import Path
from typing import Any, Optional

import numpy as np

from ..utils.logging import get_logger

logger = get_logger(__name__)

MATRIX_SYMMETRY_TOLERANCE = 1e-12


def validate_file_path(file_path: str, must_exist: bool = True) -> tuple[bool, str]:
    """
    Validate file path for existence and readability.

    Returns:
        Tuple of (is_valid, error_message)
    """
    try:
        path = Path(file_path).expanduser().resolve()

        if str(path).startswith("/proc") or str(path).startswith("/sys"):
            return False, "System directory access not allowed"

        if must_exist and not path.exists():
            return False, f"Path does not exist: {path}"

        if must_exist and not path.is_file():
            return False, f"Path is not a file: {path}"

        return True, ""

    except Exception as e:
        return False, f"Invalid path: {e}"


def parse_grid_option(grid: Optional[str]) -> tuple[bool, Optional[tuple[int, int, float]], str]:
    """
    Parse a ``m,N,dp`` grid option.

    Returns:
        Tuple of (is_valid, (dim, points, step), error_message)
    """
    if not grid:
        return True, None, ""

    parts = [p.strip() for p in grid.split(",")]
    if len(parts) != 3:
        return False, None, "Grid must be given as m,N,dp"

    try:
        dim = int(parts[0])
        points = int(parts[1])
        step = float(parts[2])
    except ValueError:
        return False, None, f"Grid components are not numbers: {grid}"

    if dim < 1:
        return False, None, "Grid dimension must be at least 1"
    if points < 3 or points % 2 == 0:
        return False, None, "Points per axis must be odd and at least 3"
    if not np.isfinite(step) or step <= 0:
        return False, None, "Momentum step must be positive"

    return True, (dim, points, step), ""


def validate_tolerance(tol: float) -> tuple[bool, str]:
    """
    Validate a residual tolerance.

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not np.isfinite(tol) or tol <= 0:
        return False, "Tolerance must be a positive finite number"

    if tol >= 1.0:
        return False, "Tolerance too loose (must be below 1)"

    return True, ""


def validate_threads(threads: int) -> tuple[bool, str]:
    """
    Validate worker count.

    Returns:
        Tuple of (is_valid, error_message)
    """
    if threads < 1:
        return False, "Thread count must be positive"

    if threads > 256:
        return False, "Thread count too large (maximum 256)"

    return True, ""


def validate_square_matrix(matrix: Any, dim: Optional[int] = None) -> tuple[bool, str]:
    """
    Validate that ``matrix`` is a finite real square matrix.

    Returns:
        Tuple of (is_valid, error_message)
    """
    try:
        arr = np.asarray(matrix, dtype=float)
    except (TypeError, ValueError) as e:
        return False, f"Matrix entries must be real numbers: {e}"

    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        return False, f"Matrix must be square, got shape {arr.shape}"

    if dim is not None and arr.shape[0] != dim:
        return False, f"Matrix must be {dim}x{dim}, got {arr.shape[0]}x{arr.shape[1]}"

    if not np.all(np.isfinite(arr)):
        return False, "Matrix entries must be finite"

    return True, ""


def validate_antisymmetric(matrix: Any) -> tuple[bool, str]:
    """
    Validate an antisymmetric real matrix.

    Returns:
        Tuple of (is_valid, error_message)
    """
    ok, error = validate_square_matrix(matrix)
    if not ok:
        return ok, error

    arr = np.asarray(matrix, dtype=float)
    deviation = float(np.max(np.abs(arr + arr.T))) if arr.size else 0.0
    if deviation > MATRIX_SYMMETRY_TOLERANCE:
        return False, f"Matrix is not antisymmetric (deviation {deviation:.3e})"

    return True, ""


def validate_symmetric(matrix: Any) -> tuple[bool, str]:
    """
    Validate a symmetric real matrix.

    Returns:
        Tuple of (is_valid, error_message)
    """
    ok, error = validate_square_matrix(matrix)
    if not ok:
        return ok, error

    arr = np.asarray(matrix, dtype=float)
    deviation = float(np.max(np.abs(arr - arr.T))) if arr.size else 0.0
    if deviation > MATRIX_SYMMETRY_TOLERANCE:
        return False, f"Matrix is not symmetric (deviation {deviation:.3e})"

    return True, ""


def is_safe_prefix(prefix: str) -> bool:
    """Check that a CSV output prefix names a file, not a traversal."""
    if not prefix or prefix in [".", ".."]:
        return False

    name = Path(prefix).name
    if not name or ".." in Path(prefix).parts:
        return False

    invalid_chars = '<>:"|?*\x00'
    return not any(char in prefix for char in invalid_chars)
