"""
Star products of band-limited fields on a finite momentum lattice.

A field is a table of Fourier coefficients ``f~(k)`` over a
:class:`~tistar.core.lattice.GridSpec`. The product is the twisted
convolution

    (f * g)~(P) = sum_q f~(q) g~(P - q) exp(alpha(P, q))

with no measure factor, so the unit field (one at the zero mode) is a
two-sided identity. Integrals are ``(2 pi / dp)^m f~(0)``.

Products never wrap around the lattice: the support radii of the factors
must add up to at most ``(N - 1) / 2``.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import Any, Optional

import numpy as np

from ..utils.logging import get_logger
from ..utils.parallel import chunked_map
from .cochains import (
    Generator,
    OneCochain,
    PredicateReport,
    _tolerance,
    as_momenta,
    guarded_exp,
    scaled_residual,
)
from .errors import GridMismatchError, SupportOverflowError
from .generators import make_zero
from .lattice import GridSpec

logger = get_logger(__name__)

DEFAULT_CHUNK_SIZE = 256
# Upper bound on (output mode, left mode) pairs held in memory per work item
MAX_BLOCK_TERMS = 1 << 20


class BandlimitedField:
    """Fourier coefficients on a lattice, zero outside a support box."""

    def __init__(
        self,
        grid: GridSpec,
        coeffs: Any,
        support_radius: Optional[int] = None,
    ) -> None:
        table = np.array(coeffs, dtype=complex)
        if table.shape != grid.shape:
            if table.size == grid.size:
                table = table.reshape(grid.shape)
            else:
                raise GridMismatchError(
                    "Coefficient table does not match the lattice",
                    expected=grid.shape,
                    got=table.shape,
                )
        self.grid = grid
        self.coeffs = table
        self.coeffs.setflags(write=False)

        actual = self._measure_support()
        if support_radius is None:
            support_radius = actual
        elif actual > support_radius:
            raise ValueError(
                f"Coefficients extend to radius {actual}, beyond declared {support_radius}"
            )
        if support_radius > grid.half:
            raise SupportOverflowError(
                "Support radius exceeds the lattice", radius=support_radius, half=grid.half
            )
        self.support_radius = int(support_radius)

    def _measure_support(self) -> int:
        nonzero = np.argwhere(self.coeffs != 0)
        if nonzero.size == 0:
            return 0
        return int(np.max(np.abs(nonzero - self.grid.half)))

    @classmethod
    def zeros(cls, grid: GridSpec) -> BandlimitedField:
        return cls(grid, np.zeros(grid.shape, dtype=complex))

    @classmethod
    def unit(cls, grid: GridSpec) -> BandlimitedField:
        """The constant function 1: a single zero-mode coefficient."""
        table = np.zeros(grid.shape, dtype=complex)
        table[(grid.half,) * grid.dim] = 1.0
        return cls(grid, table)

    @classmethod
    def mode(cls, grid: GridSpec, k: Any, value: complex = 1.0) -> BandlimitedField:
        """Plane wave ``value * exp(i k dp x)`` for integer coordinates ``k``."""
        k = np.asarray(k, dtype=np.int64).reshape(grid.dim)
        if not grid.contains(k):
            raise SupportOverflowError("Mode lies outside the lattice", k=k.tolist())
        table = np.zeros(grid.shape, dtype=complex)
        table[tuple(k + grid.half)] = value
        return cls(grid, table)

    @classmethod
    def random(
        cls,
        grid: GridSpec,
        support_radius: int,
        rng: np.random.Generator,
        scale: float = 1.0,
    ) -> BandlimitedField:
        """Gaussian complex coefficients filling the box of ``support_radius``."""
        if support_radius > grid.half:
            raise SupportOverflowError(
                "Support radius exceeds the lattice", radius=support_radius, half=grid.half
            )
        table = np.zeros(grid.shape, dtype=complex)
        inner = (slice(grid.half - support_radius, grid.half + support_radius + 1),) * grid.dim
        shape = (2 * support_radius + 1,) * grid.dim
        table[inner] = scale * (rng.normal(size=shape) + 1j * rng.normal(size=shape))
        return cls(grid, table, support_radius)

    def support_momenta(self) -> np.ndarray:
        """Integer coordinates of nonzero coefficients, row-major order."""
        return np.argwhere(self.coeffs != 0) - self.grid.half

    def coefficient(self, k: Any) -> complex:
        k = np.asarray(k, dtype=np.int64).reshape(self.grid.dim)
        if not self.grid.contains(k):
            return 0j
        return complex(self.coeffs[tuple(k + self.grid.half)])

    def with_coeffs(self, coeffs: np.ndarray) -> BandlimitedField:
        return BandlimitedField(self.grid, coeffs)

    def __add__(self, other: BandlimitedField) -> BandlimitedField:
        require_same_grid(self, other)
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other: BandlimitedField) -> BandlimitedField:
        require_same_grid(self, other)
        return self.with_coeffs(self.coeffs - other.coeffs)

    def __mul__(self, scalar: complex) -> BandlimitedField:
        return self.with_coeffs(self.coeffs * complex(scalar))

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def __repr__(self) -> str:
        return (
            f"BandlimitedField(grid={self.grid.describe()}, "
            f"support_radius={self.support_radius})"
        )


def require_same_grid(*fields: BandlimitedField) -> GridSpec:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise GridMismatchError(
                "Fields live on different lattices",
                left=grid.describe(),
                right=f.grid.describe(),
            )
    return grid


class ProductBudget:
    """Largest number of factors of a given support radius that fit the lattice."""

    def __init__(self, grid: GridSpec, support_radius: int) -> None:
        self.grid = grid
        self.support_radius = support_radius
        self.max_factors = grid.half // support_radius if support_radius else None

    def check(self, fields: Sequence[BandlimitedField]) -> None:
        """Raise if the product of ``fields`` would alias."""
        total = sum(f.support_radius for f in fields)
        if total > self.grid.half:
            logger.error(
                f"Product of {len(fields)} fields needs radius {total}, "
                f"lattice allows {self.grid.half}"
            )
            raise SupportOverflowError(
                "Product support exceeds the lattice",
                radius=total,
                half=self.grid.half,
                factors=len(fields),
            )


def _box_momenta(grid: GridSpec, radius: int) -> np.ndarray:
    k = grid.integer_momenta()
    return k[np.max(np.abs(k), axis=-1) <= radius]


def star(
    f: BandlimitedField,
    g: BandlimitedField,
    alpha: Generator,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> BandlimitedField:
    """Twisted convolution of two fields under ``alpha``."""
    grid = require_same_grid(f, g)
    ProductBudget(grid, max(f.support_radius, g.support_radius)).check([f, g])
    h, dp = grid.half, grid.step

    kq = f.support_momenta()
    out = np.zeros(grid.shape, dtype=complex)
    if kq.size == 0 or not np.any(g.coeffs):
        return BandlimitedField(grid, out)
    fq = f.coeffs[tuple(np.moveaxis(kq + h, -1, 0))]
    out_k = _box_momenta(grid, f.support_radius + g.support_radius)

    def block(start: int, stop: int) -> np.ndarray:
        kp = out_k[start:stop]
        total = np.broadcast_to(kp[:, None, :], (len(kp), len(kq), grid.dim))
        left = np.broadcast_to(kq[None, :, :], total.shape)
        diff = total - left
        gvals = np.zeros(diff.shape[:-1], dtype=complex)
        inside = grid.contains(diff)
        gvals[inside] = g.coeffs[tuple(np.moveaxis(diff[inside] + h, -1, 0))]
        active = gvals != 0
        exponents = np.zeros(gvals.shape, dtype=complex)
        if np.any(active):
            exponents[active] = alpha.evaluate(total[active] * dp, left[active] * dp)
        weights = guarded_exp(exponents)
        return np.sum(weights * gvals * fq[None, :], axis=1)

    rows = max(1, min(chunk_size, MAX_BLOCK_TERMS // len(kq)))
    values = np.concatenate(chunked_map(block, len(out_k), rows))
    out[tuple(np.moveaxis(out_k + h, -1, 0))] = values
    return BandlimitedField(grid, out)


def pointwise_product(f: BandlimitedField, g: BandlimitedField) -> BandlimitedField:
    """Ordinary product, the star product of the zero generator."""
    return star(f, g, make_zero(f.grid.dim))


def star_chain(
    fields: Sequence[BandlimitedField],
    alpha: Generator,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> BandlimitedField:
    """Left-associated product ``((f1 * f2) * f3) * ...``."""
    if not fields:
        raise ValueError("Need at least one field")
    grid = require_same_grid(*fields)
    ProductBudget(grid, max(f.support_radius for f in fields)).check(fields)
    result = fields[0]
    for f in fields[1:]:
        result = star(result, f, alpha, chunk_size)
    return result


def integrate(f: BandlimitedField) -> complex:
    """``(2 pi / dp)^m`` times the zero mode."""
    return complex(f.grid.volume_factor * f.coeffs[(f.grid.half,) * f.grid.dim])


def integrated_star(
    fields: Sequence[BandlimitedField],
    alpha: Generator,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> complex:
    """``integral f1 * f2 * ... * fk``."""
    return integrate(star_chain(fields, alpha, chunk_size))


def trace_cyclicity(
    fields: Sequence[BandlimitedField],
    alpha: Generator,
    tol: Optional[float] = None,
) -> PredicateReport:
    """Integrated products agree under every cyclic shift of the factors."""
    reference = integrated_star(fields, alpha)
    residuals = []
    for shift in range(1, len(fields)):
        rotated = list(fields[shift:]) + list(fields[:shift])
        value = integrated_star(rotated, alpha)
        residuals.append(float(scaled_residual(value - reference, value, reference)))
    if not residuals:
        residuals = [0.0]
    points = np.zeros((len(residuals), 1, fields[0].grid.dim))
    return PredicateReport.from_residuals("trace_cyclicity", residuals, points, _tolerance(tol))


def associativity_residual(
    f: BandlimitedField,
    g: BandlimitedField,
    h: BandlimitedField,
    alpha: Generator,
) -> float:
    """``max |(f*g)*h - f*(g*h)| / (1 + max magnitude)`` over all modes."""
    left = star(star(f, g, alpha), h, alpha)
    right = star(f, star(g, h, alpha), alpha)
    scale = max(left.max_abs(), right.max_abs())
    return float(np.max(np.abs(left.coeffs - right.coeffs)) / (1.0 + scale))


def translate(f: BandlimitedField, a: Any) -> BandlimitedField:
    """Translation by ``a`` in position space: ``f~(p) -> exp(i p.a) f~(p)``."""
    shift = as_momenta(a, f.grid.dim).reshape(f.grid.dim)
    p = f.grid.momenta()
    phase = np.exp(1j * (p @ shift)).reshape(f.grid.shape)
    return f.with_coeffs(f.coeffs * phase)


def conjugate(f: BandlimitedField) -> BandlimitedField:
    """Complex conjugation in position space: ``f~(p) -> conj(f~(-p))``."""
    flipped = f.coeffs[(slice(None, None, -1),) * f.grid.dim]
    return f.with_coeffs(np.conj(flipped))


def involution_check(
    f: BandlimitedField,
    g: BandlimitedField,
    alpha: Generator,
    tol: Optional[float] = None,
) -> PredicateReport:
    """``(f * g)^* = g^* * f^*`` coefficientwise."""
    lhs = conjugate(star(f, g, alpha))
    rhs = star(conjugate(g), conjugate(f), alpha)
    scale = max(lhs.max_abs(), rhs.max_abs())
    residual = np.abs(lhs.coeffs - rhs.coeffs).ravel() / (1.0 + scale)
    points = f.grid.momenta()[:, None, :]
    return PredicateReport.from_residuals("involution", residual, points, _tolerance(tol))


def mode_commutator(
    p: Any,
    q: Any,
    alpha: Generator,
    grid: Optional[GridSpec] = None,
) -> complex:
    """
    Coefficient at ``p + q`` of ``[exp(ipx), exp(iqx)]``: ``e^{alpha(p+q,p)} - e^{alpha(p+q,q)}``.

    With ``grid`` given, both momenta and their sum must be lattice points.
    """
    a = as_momenta(p, alpha.dim).reshape(alpha.dim)
    b = as_momenta(q, alpha.dim).reshape(alpha.dim)
    if grid is not None:
        grid.to_integer(a)
        grid.to_integer(b)
        grid.to_integer(a + b)
    total = a + b
    weights = guarded_exp([alpha.evaluate(total, a), alpha.evaluate(total, b)])
    return complex(weights[0] - weights[1])


def factorized_mode_commutator(
    p: Any,
    q: Any,
    alpha_h: Generator,
    beta: OneCochain,
) -> complex:
    """Mode commutator rebuilt from a split ``alpha = alpha_H + d beta``.

    ``(e^{a} - e^{-a}) e^{d beta(p+q, p)}`` with ``a = alpha_H(p+q, p)``.
    """
    a = as_momenta(p, alpha_h.dim).reshape(alpha_h.dim)
    b = as_momenta(q, alpha_h.dim).reshape(alpha_h.dim)
    total = a + b
    harmonic = complex(alpha_h.evaluate(total, a))
    d_beta = complex(beta.evaluate(a) - beta.evaluate(total) + beta.evaluate(b))
    factors = guarded_exp([harmonic, -harmonic, d_beta])
    return complex((factors[0] - factors[1]) * factors[2])
