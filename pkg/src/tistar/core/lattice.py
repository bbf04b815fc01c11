"""
Finite momentum lattices.

A lattice holds the momenta ``k * dp`` with integer ``k`` in
``{-(N-1)/2, ..., (N-1)/2}^m``. Arrays over the lattice use row-major
order with axis index ``k + (N-1)/2``.
"""

import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .errors import OffLatticeError, SpecParseError

# Relative slack when snapping a float momentum to the lattice
SNAP_TOLERANCE = 1e-9


class GridSpec(BaseModel):
    """Odd-sized cubic momentum lattice of spacing ``step``."""

    model_config = ConfigDict(frozen=True)

    dim: int = Field(ge=1)
    points: int = Field(ge=3)
    step: float = Field(gt=0.0)

    @field_validator("points")
    @classmethod
    def validate_points(cls, v: int) -> int:
        if v % 2 == 0:
            raise ValueError("Points per axis must be odd")
        return v

    @field_validator("step")
    @classmethod
    def validate_step(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("Momentum step must be finite")
        return v

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """Build a lattice from an ``m,N,dp`` string."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise SpecParseError("Grid must be given as m,N,dp", grid=text)
        try:
            return cls(dim=int(parts[0]), points=int(parts[1]), step=float(parts[2]))
        except ValueError as e:
            raise SpecParseError(f"Invalid grid: {e}", grid=text) from e

    @property
    def half(self) -> int:
        """Largest integer coordinate on each axis."""
        return (self.points - 1) // 2

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points,) * self.dim

    @property
    def size(self) -> int:
        return self.points**self.dim

    @property
    def volume_factor(self) -> float:
        """``(2*pi/dp)^m``, the position-space volume of one period."""
        return float((2.0 * math.pi / self.step) ** self.dim)

    @property
    def measure(self) -> float:
        """``(dp/(2*pi))^m``, the weight of one lattice point in a momentum sum."""
        return 1.0 / self.volume_factor

    def axis(self) -> np.ndarray:
        return np.arange(-self.half, self.half + 1)

    def integer_momenta(self) -> np.ndarray:
        """All integer coordinates, shape ``(size, dim)``, row-major."""
        grids = np.meshgrid(*([self.axis()] * self.dim), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def momenta(self) -> np.ndarray:
        """All lattice momenta, shape ``(size, dim)``, row-major."""
        return self.integer_momenta() * self.step

    def contains(self, k: np.ndarray) -> np.ndarray:
        """Mask of integer coordinates that lie inside the lattice."""
        return np.all(np.abs(k) <= self.half, axis=-1)

    def to_integer(self, p: np.ndarray) -> np.ndarray:
        """Snap momenta to integer coordinates, refusing off-lattice input."""
        scaled = np.asarray(p, dtype=float) / self.step
        k = np.rint(scaled)
        if np.any(np.abs(scaled - k) > SNAP_TOLERANCE * (1.0 + np.abs(scaled))):
            raise OffLatticeError("Momentum is not a multiple of the lattice step")
        k = k.astype(np.int64)
        if not np.all(self.contains(k)):
            raise OffLatticeError(
                "Momentum lies outside the lattice", half=self.half, dim=self.dim
            )
        return k

    def flat_index(self, k: np.ndarray) -> np.ndarray:
        """Row-major flat index of integer coordinates."""
        shifted = np.asarray(k, dtype=np.int64) + self.half
        return np.ravel_multi_index(tuple(np.moveaxis(shifted, -1, 0)), self.shape)

    def describe(self) -> str:
        return f"{self.dim},{self.points},{self.step:g}"
