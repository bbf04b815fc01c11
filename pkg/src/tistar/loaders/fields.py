"""
Field payload loader for tistar.

Binary layout (``.tisp``): the magic ``TISP1``, then ``m`` and ``N`` as
little-endian u32 and ``dp`` as little-endian f64, then ``N^m`` complex
coefficients as little-endian float64 (re, im) pairs in row-major
lattice order.

JSON layout: ``{"dim": m, "points": N, "step": dp, "coeffs": [[re, im], ...]}``.
"""

import json
import struct
from pathlib import Path

import numpy as np

from ..core.errors import SpecParseError
from ..core.lattice import GridSpec
from ..core.star import BandlimitedField
from ..utils.logging import get_logger

logger = get_logger(__name__)

MAGIC = b"TISP1"
HEADER = struct.Struct("<IId")
COEFF_DTYPE = np.dtype("<c16")


class FieldLoader:
    """Loader for band-limited field coefficient files."""

    def load_data(self, file_path: Path) -> BandlimitedField:
        """Read a field from ``.tisp`` or ``.json``."""
        file_path = Path(file_path)
        if not file_path.is_file():
            raise SpecParseError(f"Field file not found: {file_path}")
        if file_path.suffix.lower() == ".json":
            return self._load_json(file_path)
        return self._load_binary(file_path)

    def save(self, field: BandlimitedField, file_path: Path) -> None:
        """Write a field in the layout implied by the suffix."""
        file_path = Path(file_path)
        file_path.parent.mkdir(parents=True, exist_ok=True)
        grid = field.grid
        if file_path.suffix.lower() == ".json":
            payload = {
                "dim": grid.dim,
                "points": grid.points,
                "step": grid.step,
                "coeffs": [[float(z.real), float(z.imag)] for z in field.coeffs.ravel()],
            }
            with open(file_path, "w", encoding="utf-8") as f:
                json.dump(payload, f)
                f.write("\n")
        else:
            with open(file_path, "wb") as f:
                f.write(MAGIC)
                f.write(HEADER.pack(grid.dim, grid.points, grid.step))
                f.write(field.coeffs.astype(COEFF_DTYPE).tobytes(order="C"))
        logger.debug(f"Wrote field on {grid.describe()} to {file_path}")

    def _load_binary(self, file_path: Path) -> BandlimitedField:
        raw = file_path.read_bytes()
        if not raw.startswith(MAGIC):
            raise SpecParseError(f"{file_path.name} is not a field file (bad magic)")
        offset = len(MAGIC)
        if len(raw) < offset + HEADER.size:
            raise SpecParseError(f"{file_path.name} has a truncated header")
        dim, points, step = HEADER.unpack_from(raw, offset)
        grid = self._grid(dim, points, step, file_path)

        body = raw[offset + HEADER.size :]
        expected = grid.size * COEFF_DTYPE.itemsize
        if len(body) != expected:
            raise SpecParseError(
                f"{file_path.name} holds {len(body)} coefficient bytes, expected {expected}"
            )
        coeffs = np.frombuffer(body, dtype=COEFF_DTYPE).reshape(grid.shape)
        logger.debug(f"Loaded binary field on {grid.describe()} from {file_path}")
        return BandlimitedField(grid, coeffs)

    def _load_json(self, file_path: Path) -> BandlimitedField:
        try:
            with open(file_path, encoding="utf-8") as f:
                payload = json.load(f)
            grid = self._grid(payload["dim"], payload["points"], payload["step"], file_path)
            pairs = np.asarray(payload["coeffs"], dtype=float)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise SpecParseError(f"Malformed field file {file_path.name}: {e}") from e

        if pairs.shape != (grid.size, 2):
            raise SpecParseError(
                f"{file_path.name} needs {grid.size} [re, im] pairs, got shape {pairs.shape}"
            )
        coeffs = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(grid.shape)
        return BandlimitedField(grid, coeffs)

    @staticmethod
    def _grid(dim: int, points: int, step: float, file_path: Path) -> GridSpec:
        try:
            return GridSpec(dim=dim, points=points, step=step)
        except ValueError as e:
            raise SpecParseError(f"Invalid lattice header in {file_path.name}: {e}") from e
