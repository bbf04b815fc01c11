"""
Cochains, the coboundary operator, and pointwise structural predicates.

One-cochains ``beta(p)`` and two-cochains (generators) ``alpha(p, q)`` are
evaluated on numpy arrays whose last axis holds the ``m`` momentum
components; all leading axes broadcast. Predicates sample these
evaluators on a seeded :class:`SampleSet` and return a
:class:`PredicateReport` carrying the worst residual.

Conventions:
    coboundary of a one-cochain  (d beta)(p, q) = beta(q) - beta(p) + beta(p - q)
    coboundary of a generator    (d alpha)(p0, p1, p2) = alpha(p1, p2) - alpha(p0, p2)
                                     + alpha(p0, p1) - alpha(p0 - p2, p1 - p2)
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass
from typing import Any, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..utils.logging import get_logger
from .errors import (
    DimensionMismatchError,
    EmptySampleError,
    NumericalOverflowError,
    UnitalityError,
    UnsupportedLevelError,
    ValidationFailure,
)
from .lattice import GridSpec

logger = get_logger(__name__)

DEFAULT_TOLERANCE = 1e-9
DEFAULT_SEED = 20240917
DEFAULT_BOX_RADIUS = 3.0
UNITALITY_TOLERANCE = 1e-12
EXPONENT_LIMIT = 700.0

Evaluation = Union[complex, np.ndarray]


def as_momenta(x: Any, dim: int) -> np.ndarray:
    """Coerce input to a float array whose last axis has length ``dim``."""
    arr = np.asarray(x, dtype=float)
    if dim == 1 and (arr.ndim == 0 or arr.shape[-1] != 1):
        arr = arr[..., None]
    if arr.ndim == 0 or arr.shape[-1] != dim:
        raise DimensionMismatchError(
            "Momentum has the wrong number of components",
            expected=dim,
            shape=tuple(arr.shape),
        )
    return arr


def _finish(values: np.ndarray) -> Evaluation:
    out = np.asarray(values, dtype=complex)
    if out.ndim == 0:
        return complex(out)
    return out


def scaled_residual(diff: np.ndarray, *terms: np.ndarray) -> np.ndarray:
    """``|diff| / (1 + max |term|)`` pointwise; NaN becomes infinity."""
    diff = np.abs(np.asarray(diff, dtype=complex))
    if terms:
        scale = np.max(
            np.stack([np.abs(np.broadcast_to(t, diff.shape)) for t in terms]), axis=0
        )
    else:
        scale = np.zeros_like(diff)
    out = diff / (1.0 + scale)
    return np.where(np.isnan(out), np.inf, out)


def guarded_exp(exponent: Any) -> np.ndarray:
    """``exp`` of complex exponents, refusing real parts beyond the guard."""
    z = np.asarray(exponent, dtype=complex)
    if z.size and np.max(np.abs(z.real)) > EXPONENT_LIMIT:
        worst = float(np.max(np.abs(z.real)))
        logger.error(f"Exponent overflow guard tripped: |Re| = {worst:.3e}")
        raise NumericalOverflowError(
            "Exponent real part exceeds the overflow guard",
            limit=EXPONENT_LIMIT,
            value=f"{worst:.3e}",
        )
    return np.exp(z)


def _validation_points(dim: int, count: int = 16) -> np.ndarray:
    rng = np.random.default_rng(7919)
    return rng.uniform(-3.0, 3.0, size=(count, dim))


# ---------------------------------------------------------------------------
# One-cochains
# ---------------------------------------------------------------------------


class OneCochain(ABC):
    """Complex function ``beta(p)`` on momenta with ``beta(0) = 0``."""

    kind = "composite"

    def __init__(self, dim: int, validate: bool = True) -> None:
        if dim < 1:
            raise ValueError("Momentum dimension must be at least 1")
        self.dim = dim
        if validate:
            self._check_vanishes_at_origin()

    @abstractmethod
    def evaluate(self, p: np.ndarray) -> np.ndarray:
        """Evaluate on an array of shape ``(..., dim)``."""

    def __call__(self, p: Any) -> Evaluation:
        return _finish(self.evaluate(as_momenta(p, self.dim)))

    def _check_vanishes_at_origin(self) -> None:
        value = complex(np.asarray(self.evaluate(np.zeros(self.dim))))
        if abs(value) > UNITALITY_TOLERANCE:
            raise UnitalityError(
                "One-cochain does not vanish at the origin", value=f"{value:.3e}"
            )

    def conjugate(self) -> OneCochain:
        """Pointwise complex conjugate."""
        return FunctionOneCochain(
            lambda p: np.conj(self.evaluate(p)), self.dim, validate=False
        )

    def reflected(self) -> OneCochain:
        """``p -> beta(-p)``."""
        return FunctionOneCochain(lambda p: self.evaluate(-p), self.dim, validate=False)

    def __add__(self, other: OneCochain) -> OneCochain:
        return LinearOneCochain([(1.0, self), (1.0, other)])

    def __sub__(self, other: OneCochain) -> OneCochain:
        return LinearOneCochain([(1.0, self), (-1.0, other)])

    def __neg__(self) -> OneCochain:
        return LinearOneCochain([(-1.0, self)])

    def __mul__(self, scalar: complex) -> OneCochain:
        return LinearOneCochain([(complex(scalar), self)])

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim}, kind={self.kind!r})"


class FunctionOneCochain(OneCochain):
    """One-cochain backed by a vectorized callable on ``(..., dim)`` arrays."""

    def __init__(
        self,
        fn: Callable[[np.ndarray], Any],
        dim: int,
        kind: str = "composite",
        validate: bool = True,
    ) -> None:
        self._fn = fn
        self.kind = kind
        super().__init__(dim, validate)

    def evaluate(self, p: np.ndarray) -> np.ndarray:
        out = np.asarray(self._fn(p), dtype=complex)
        return np.broadcast_to(out, p.shape[:-1])


class LinearOneCochain(OneCochain):
    """Finite linear combination of one-cochains."""

    def __init__(self, terms: Iterable[tuple[complex, OneCochain]]) -> None:
        self.terms = [(complex(c), b) for c, b in terms]
        if not self.terms:
            raise ValueError("Linear combination needs at least one term")
        dims = {b.dim for _, b in self.terms}
        if len(dims) != 1:
            raise DimensionMismatchError("Cannot combine cochains", dims=sorted(dims))
        super().__init__(dims.pop(), validate=False)

    def evaluate(self, p: np.ndarray) -> np.ndarray:
        total = np.zeros(p.shape[:-1], dtype=complex)
        for c, b in self.terms:
            total = total + c * b.evaluate(p)
        return total


class PolynomialOneCochain(OneCochain):
    """``beta(p) = sum_k c_k prod_mu p_mu^{k_mu}`` with no constant term."""

    kind = "polynomial"

    def __init__(self, coefficients: Mapping[tuple[int, ...], complex], dim: int) -> None:
        cleaned: dict[tuple[int, ...], complex] = {}
        for index, coeff in coefficients.items():
            index = tuple(int(i) for i in index)
            if len(index) != dim:
                raise DimensionMismatchError(
                    "Multi-index length differs from dimension",
                    index=index,
                    dim=dim,
                )
            if any(i < 0 for i in index):
                raise ValueError(f"Negative exponent in multi-index {index}")
            if sum(index) == 0 and coeff != 0:
                raise UnitalityError(
                    "Polynomial one-cochain has a nonzero constant term"
                )
            if coeff != 0:
                cleaned[index] = cleaned.get(index, 0j) + complex(coeff)
        self.coefficients = cleaned
        super().__init__(dim, validate=False)

    @property
    def max_degree(self) -> int:
        return max((sum(k) for k in self.coefficients), default=0)

    @classmethod
    def random(
        cls,
        dim: int,
        degree: int,
        rng: np.random.Generator,
        scale: float = 1.0,
        complex_coefficients: bool = True,
    ) -> PolynomialOneCochain:
        """Dense polynomial with Gaussian coefficients in every monomial up to ``degree``."""
        coefficients: dict[tuple[int, ...], complex] = {}
        for index in np.ndindex(*([degree + 1] * dim)):
            total = sum(index)
            if total == 0 or total > degree:
                continue
            c = rng.normal() * scale
            if complex_coefficients:
                c = c + 1j * rng.normal() * scale
            coefficients[tuple(int(i) for i in index)] = complex(c)
        return cls(coefficients, dim)

    def evaluate(self, p: np.ndarray) -> np.ndarray:
        total = np.zeros(p.shape[:-1], dtype=complex)
        for index, coeff in self.coefficients.items():
            term = np.ones(p.shape[:-1], dtype=float)
            for mu, power in enumerate(index):
                if power:
                    term = term * p[..., mu] ** power
            total = total + coeff * term
        return total


class QuadraticOneCochain(OneCochain):
    """``beta(p) = p^T M p`` for a fixed (possibly complex) matrix ``M``."""

    kind = "quadratic-form"

    def __init__(self, matrix: Any) -> None:
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"Quadratic form must be square, got shape {m.shape}")
        self.matrix = m
        super().__init__(m.shape[0], validate=False)

    def evaluate(self, p: np.ndarray) -> np.ndarray:
        return np.einsum("...i,ij,...j->...", p, self.matrix, p)


class TabulatedOneCochain(OneCochain):
    """One-cochain known only on the points of a momentum lattice."""

    kind = "tabulated"

    def __init__(self, grid: GridSpec, values: Any) -> None:
        table = np.array(values, dtype=complex)
        if table.shape != grid.shape:
            raise ValueError(f"Table shape {table.shape} does not match lattice {grid.shape}")
        self.grid = grid
        self.values = table
        self.values.setflags(write=False)
        super().__init__(grid.dim, validate=True)

    def evaluate(self, p: np.ndarray) -> np.ndarray:
        k = self.grid.to_integer(p) + self.grid.half
        return self.values[tuple(np.moveaxis(k, -1, 0))]


# ---------------------------------------------------------------------------
# Generators (two-cochains)
# ---------------------------------------------------------------------------


class Generator(ABC):
    """Complex function ``alpha(p, q)`` with ``alpha(p, 0) = alpha(p, p) = 0``."""

    kind = "composite"

    def __init__(self, dim: int, validate: bool = True) -> None:
        if dim < 1:
            raise ValueError("Momentum dimension must be at least 1")
        self.dim = dim
        if validate:
            self._check_unital()

    @abstractmethod
    def evaluate(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        """Evaluate on broadcastable arrays of shape ``(..., dim)``."""

    def __call__(self, p: Any, q: Any) -> Evaluation:
        return _finish(self.evaluate(as_momenta(p, self.dim), as_momenta(q, self.dim)))

    def _check_unital(self) -> None:
        p = _validation_points(self.dim)
        at_zero = np.abs(self.evaluate(p, np.zeros_like(p)))
        at_diag = np.abs(self.evaluate(p, p))
        scale = 1.0 + np.abs(self.evaluate(p, p[::-1]))
        worst = float(np.max(np.maximum(at_zero, at_diag) / scale))
        if not worst <= UNITALITY_TOLERANCE:
            raise UnitalityError(
                "Generator violates alpha(p,0) = alpha(p,p) = 0",
                residual=f"{worst:.3e}",
            )

    def conjugate(self) -> Generator:
        """Pointwise complex conjugate ``conj(alpha(p, q))``."""
        return FunctionGenerator(
            lambda p, q: np.conj(self.evaluate(p, q)), self.dim, validate=False
        )

    def __add__(self, other: Generator) -> Generator:
        return LinearGenerator([(1.0, self), (1.0, other)])

    def __sub__(self, other: Generator) -> Generator:
        return LinearGenerator([(1.0, self), (-1.0, other)])

    def __neg__(self) -> Generator:
        return LinearGenerator([(-1.0, self)])

    def __mul__(self, scalar: complex) -> Generator:
        return LinearGenerator([(complex(scalar), self)])

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim}, kind={self.kind!r})"


class FunctionGenerator(Generator):
    """Generator backed by a vectorized callable ``fn(p, q)``."""

    def __init__(
        self,
        fn: Callable[[np.ndarray, np.ndarray], Any],
        dim: int,
        kind: str = "composite",
        validate: bool = True,
    ) -> None:
        self._fn = fn
        self.kind = kind
        super().__init__(dim, validate)

    def evaluate(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        shape = np.broadcast_shapes(p.shape, q.shape)[:-1]
        return np.broadcast_to(np.asarray(self._fn(p, q), dtype=complex), shape)


class LinearGenerator(Generator):
    """Finite linear combination of generators."""

    kind = "sum"

    def __init__(self, terms: Iterable[tuple[complex, Generator]]) -> None:
        self.terms = [(complex(c), g) for c, g in terms]
        if not self.terms:
            raise ValueError("Linear combination needs at least one term")
        dims = {g.dim for _, g in self.terms}
        if len(dims) != 1:
            raise DimensionMismatchError("Cannot combine generators", dims=sorted(dims))
        super().__init__(dims.pop(), validate=False)

    def evaluate(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        shape = np.broadcast_shapes(p.shape, q.shape)[:-1]
        total = np.zeros(shape, dtype=complex)
        for c, g in self.terms:
            total = total + c * g.evaluate(p, q)
        return total


class CoboundaryGenerator(Generator):
    """``(d beta)(p, q) = beta(q) - beta(p) + beta(p - q)``."""

    kind = "coboundary"

    def __init__(self, beta: OneCochain) -> None:
        self.beta = beta
        super().__init__(beta.dim, validate=False)

    def evaluate(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        p, q = np.broadcast_arrays(p, q)
        return self.beta.evaluate(q) - self.beta.evaluate(p) + self.beta.evaluate(p - q)


def coboundary1(beta: OneCochain) -> Generator:
    """Coboundary of a one-cochain."""
    return CoboundaryGenerator(beta)


def coboundary2(alpha: Generator) -> Callable[[Any, Any, Any], Evaluation]:
    """Coboundary of a generator, evaluated pointwise on triples.

    It vanishes identically exactly when ``alpha`` satisfies the cyclic
    condition that makes its star product associative.
    """

    def d_alpha(p0: Any, p1: Any, p2: Any) -> Evaluation:
        a = as_momenta(p0, alpha.dim)
        b = as_momenta(p1, alpha.dim)
        c = as_momenta(p2, alpha.dim)
        return _finish(_cocycle_terms(alpha, a, b, c).sum(axis=0))

    return d_alpha


def _cocycle_terms(
    alpha: Generator, p0: np.ndarray, p1: np.ndarray, p2: np.ndarray
) -> np.ndarray:
    return np.stack(
        [
            alpha.evaluate(p1, p2),
            -alpha.evaluate(p0, p2),
            alpha.evaluate(p0, p1),
            -alpha.evaluate(p0 - p2, p1 - p2),
        ]
    )


def zero_slice(alpha: Generator) -> OneCochain:
    """``alpha_0(p) = alpha(0, p)``."""
    return FunctionOneCochain(
        lambda p: alpha.evaluate(np.zeros_like(p), p), alpha.dim, kind="composite"
    )


def conjugate_generator(alpha: Generator) -> Generator:
    """Generator of the conjugate class, ``conj(alpha(p, q))``."""
    return alpha.conjugate()


# ---------------------------------------------------------------------------
# Samples and reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SampleSet:
    """Seeded tuples of momenta, shape ``(count, arity, dim)``."""

    points: np.ndarray
    seed: Optional[int]
    box_radius: float
    kind: str = "random"

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 3:
            raise ValueError("Sample points must have shape (count, arity, dim)")
        if pts.size and np.max(np.abs(pts)) > self.box_radius * (1 + 1e-12):
            raise ValueError("Sample points leave the sampling box")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def random(
        cls,
        dim: int,
        count: int,
        arity: int = 2,
        seed: int = DEFAULT_SEED,
        box_radius: float = DEFAULT_BOX_RADIUS,
    ) -> SampleSet:
        """Uniform momenta in ``[-box_radius, box_radius]^dim``."""
        rng = np.random.default_rng(seed)
        pts = rng.uniform(-box_radius, box_radius, size=(count, arity, dim))
        return cls(pts, seed, box_radius, "random")

    @classmethod
    def lattice(
        cls,
        dim: int,
        count: int,
        arity: int = 2,
        seed: int = DEFAULT_SEED,
        radius: int = 3,
        step: float = 1.0,
    ) -> SampleSet:
        """Integer lattice momenta (times ``step``) with coordinates in ``[-radius, radius]``."""
        rng = np.random.default_rng(seed)
        pts = rng.integers(-radius, radius + 1, size=(count, arity, dim)) * step
        return cls(pts.astype(float), seed, radius * step, "lattice")

    @classmethod
    def from_points(cls, points: Any, dim: int) -> SampleSet:
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 2:
            pts = pts[:, None, :] if dim > 1 else pts[:, :, None]
        if pts.ndim == 1:
            pts = pts[:, None, None]
        radius = float(np.max(np.abs(pts))) if pts.size else 0.0
        return cls(pts, None, radius, "explicit")

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def arity(self) -> int:
        return int(self.points.shape[1])

    @property
    def dim(self) -> int:
        return int(self.points.shape[2])

    def column(self, i: int) -> np.ndarray:
        """All ``i``-th momenta, shape ``(count, dim)``."""
        if i >= self.arity:
            raise ValidationFailure(
                "Sample tuples are too short", needed=i + 1, arity=self.arity
            )
        return self.points[:, i, :]

    def require(self, dim: int, arity: int) -> None:
        if len(self) == 0:
            raise EmptySampleError("Sample set is empty")
        if self.dim != dim:
            raise DimensionMismatchError(
                "Sample dimension differs from the cochain", sample=self.dim, cochain=dim
            )
        if self.arity < arity:
            raise ValidationFailure(
                "Sample tuples are too short", needed=arity, arity=self.arity
            )


class PredicateReport(BaseModel):
    """Outcome of a sampled identity check."""

    model_config = ConfigDict(populate_by_name=True)

    name: str
    max_residual: float
    worst_point: list[list[float]]
    passed: bool = Field(alias="pass")
    tolerance: float
    samples: int
    parts: dict[str, PredicateReport] = Field(default_factory=dict)

    @classmethod
    def from_residuals(
        cls,
        name: str,
        residuals: Any,
        points: Any,
        tolerance: float,
    ) -> PredicateReport:
        """Reduce per-point residuals; ties resolve to the lowest index."""
        res = np.asarray(residuals, dtype=float).ravel()
        if res.size == 0:
            raise EmptySampleError(f"No samples for predicate '{name}'")
        res = np.where(np.isnan(res), np.inf, res)
        idx = int(np.argmax(res))
        worst = float(res[idx])
        pts = np.asarray(points, dtype=float)
        worst_point = pts[idx].reshape(-1, pts.shape[-1]).tolist() if pts.size else []
        report = cls(
            name=name,
            max_residual=worst,
            worst_point=worst_point,
            passed=bool(worst <= tolerance),
            tolerance=tolerance,
            samples=int(res.size),
        )
        logger.debug(
            f"{name}: max residual {worst:.3e} over {res.size} samples "
            f"(tol {tolerance:.1e}) -> {'pass' if report.passed else 'fail'}"
        )
        return report

    @classmethod
    def combine(cls, name: str, parts: Mapping[str, PredicateReport]) -> PredicateReport:
        """Aggregate named sub-reports; passes only if every part passes."""
        if not parts:
            raise EmptySampleError(f"No parts for predicate '{name}'")
        worst_key = max(parts, key=lambda k: parts[k].max_residual / parts[k].tolerance)
        worst = parts[worst_key]
        return cls(
            name=name,
            max_residual=max(p.max_residual for p in parts.values()),
            worst_point=worst.worst_point,
            passed=all(p.passed for p in parts.values()),
            tolerance=worst.tolerance,
            samples=sum(p.samples for p in parts.values()),
            parts=dict(parts),
        )

    def to_dict(self) -> dict[str, Any]:
        return self.model_dump(by_alias=True)


PredicateReport.model_rebuild()


def _evaluate_any(f: Any, *args: np.ndarray) -> np.ndarray:
    shape = np.broadcast_shapes(*(a.shape for a in args))[:-1]
    if isinstance(f, (OneCochain, Generator)):
        out = f.evaluate(*args)
    else:
        out = f(*args)
    return np.broadcast_to(np.asarray(out, dtype=complex), shape)


def _tolerance(tol: Optional[float]) -> float:
    if tol is None:
        return DEFAULT_TOLERANCE
    if not (tol > 0 and math.isfinite(tol)):
        raise ValueError("Tolerance must be a positive finite number")
    return tol


# ---------------------------------------------------------------------------
# Predicates
# ---------------------------------------------------------------------------


def is_cocycle(
    alpha: Generator, samples: SampleSet, tol: Optional[float] = None
) -> PredicateReport:
    """Cyclic condition ``d alpha = 0`` on sampled triples."""
    samples.require(alpha.dim, 3)
    p0, p1, p2 = (samples.column(i) for i in range(3))
    terms = _cocycle_terms(alpha, p0, p1, p2)
    residual = scaled_residual(terms.sum(axis=0), *terms)
    return PredicateReport.from_residuals(
        "cocycle", residual, samples.points[:, :3], _tolerance(tol)
    )


def is_unital(
    alpha: Generator, samples: SampleSet, tol: Optional[float] = None
) -> PredicateReport:
    """``alpha(p, 0) = alpha(p, p) = 0`` on the first momentum of each tuple."""
    samples.require(alpha.dim, 1)
    p = samples.column(0)
    residual = np.maximum(
        np.abs(alpha.evaluate(p, np.zeros_like(p))), np.abs(alpha.evaluate(p, p))
    )
    return PredicateReport.from_residuals(
        "unital", residual, samples.points[:, :1], _tolerance(tol)
    )


def is_commutative(
    alpha: Generator, samples: SampleSet, tol: Optional[float] = None
) -> PredicateReport:
    """``alpha(p, q) = alpha(p, p - q)``."""
    samples.require(alpha.dim, 2)
    p, q = samples.column(0), samples.column(1)
    a = alpha.evaluate(p, q)
    b = alpha.evaluate(p, p - q)
    return PredicateReport.from_residuals(
        "commutative", scaled_residual(a - b, a, b), samples.points[:, :2], _tolerance(tol)
    )


def is_involutive(
    alpha: Generator, samples: SampleSet, tol: Optional[float] = None
) -> PredicateReport:
    """``conj(alpha(p, q)) = alpha(-p, q - p)``."""
    samples.require(alpha.dim, 2)
    p, q = samples.column(0), samples.column(1)
    a = np.conj(alpha.evaluate(p, q))
    b = alpha.evaluate(-p, q - p)
    return PredicateReport.from_residuals(
        "involutive", scaled_residual(a - b, a, b), samples.points[:, :2], _tolerance(tol)
    )


def cochain_membership(
    f: Any,
    n: int,
    samples: SampleSet,
    tol: Optional[float] = None,
    starred: bool = False,
) -> PredicateReport:
    """Membership of ``f`` in the level-``n`` cochains (optionally the starred ones).

    ``f`` may be a cochain object or any vectorized callable taking
    ``n`` arrays of shape ``(count, dim)``.
    """
    if n not in (1, 2):
        raise UnsupportedLevelError(f"Cochain level {n} is not supported", level=n)
    tol = _tolerance(tol)
    samples.require(samples.dim, n)
    p = samples.column(0)
    zero = np.zeros_like(p)
    parts: dict[str, PredicateReport] = {}

    if n == 1:
        vanish = np.abs(_evaluate_any(f, zero))
        parts["vanishing"] = PredicateReport.from_residuals(
            "vanishing", vanish, samples.points[:, :1], tol
        )
        if starred:
            a = np.conj(_evaluate_any(f, p))
            b = _evaluate_any(f, -p)
            parts["starred"] = PredicateReport.from_residuals(
                "starred", scaled_residual(a - b, a, b), samples.points[:, :1], tol
            )
    else:
        q = samples.column(1)
        vanish = np.maximum(
            np.abs(_evaluate_any(f, p, zero)), np.abs(_evaluate_any(f, p, p))
        )
        parts["vanishing"] = PredicateReport.from_residuals(
            "vanishing", vanish, samples.points[:, :1], tol
        )
        if starred:
            a = np.conj(_evaluate_any(f, p, q))
            b = _evaluate_any(f, -p, q - p)
            parts["starred"] = PredicateReport.from_residuals(
                "starred", scaled_residual(a - b, a, b), samples.points[:, :2], tol
            )

    return PredicateReport.combine(f"membership_C{n}" + ("*" if starred else ""), parts)


def check_cocycle_identities(
    alpha: Generator, samples: SampleSet, tol: Optional[float] = None
) -> PredicateReport:
    """Consequences of unitality plus the cyclic condition.

    Checks the even zero slice ``alpha(0,p) = alpha(0,-p)``, the swap rule
    ``alpha(p,q) + alpha(q,p) = alpha(0,q-p)``, the zero-slice relation
    ``alpha(0,q) = alpha(0,p) - alpha(q,p) + alpha(-p,q-p)`` and the
    reconstruction ``alpha(p,q) = -alpha(0,p) + alpha(0,q) + alpha(0,p-q)
    - alpha(-p,q-p)``.
    """
    samples.require(alpha.dim, 2)
    tol = _tolerance(tol)
    p, q = samples.column(0), samples.column(1)
    zero = np.zeros_like(p)
    pts = samples.points[:, :2]

    a0p = alpha.evaluate(zero, p)
    a0mp = alpha.evaluate(zero, -p)
    a0q = alpha.evaluate(zero, q)
    a0qp = alpha.evaluate(zero, q - p)
    a0pq = alpha.evaluate(zero, p - q)
    apq = alpha.evaluate(p, q)
    aqp = alpha.evaluate(q, p)
    amp = alpha.evaluate(-p, q - p)

    parts = {
        "even_zero_slice": PredicateReport.from_residuals(
            "even_zero_slice", scaled_residual(a0p - a0mp, a0p, a0mp), pts, tol
        ),
        "swap": PredicateReport.from_residuals(
            "swap", scaled_residual(apq + aqp - a0qp, apq, aqp, a0qp), pts, tol
        ),
        "zero_slice_relation": PredicateReport.from_residuals(
            "zero_slice_relation",
            scaled_residual(a0q - a0p + aqp - amp, a0q, a0p, aqp, amp),
            pts,
            tol,
        ),
        "reconstruction": PredicateReport.from_residuals(
            "reconstruction",
            scaled_residual(apq + a0p - a0q - a0pq + amp, apq, a0p, a0q, a0pq, amp),
            pts,
            tol,
        ),
    }
    return PredicateReport.combine("cocycle_identities", parts)
