"""
Concrete generator families and the structured spec they are parsed from.

The quadratic family ``alpha(p, q) = i q^T A p + q^T S (p - q)`` with ``A``
antisymmetric and ``S`` symmetric covers Groenewold-Moyal (``S = 0``) and
Wick-Voros. Arbitrary commutative corrections enter as coboundaries of
polynomial one-cochains.
"""

from __future__ import annotations

from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from ..utils.logging import get_logger
from ..utils.validation import validate_antisymmetric, validate_symmetric
from .cochains import (
    CoboundaryGenerator,
    Generator,
    LinearGenerator,
    OneCochain,
    PolynomialOneCochain,
    QuadraticOneCochain,
    coboundary1,
)
from .errors import DimensionMismatchError, SpecParseError, ValidationFailure

logger = get_logger(__name__)

SPEC_VERSION = 1

GeneratorKind = Literal["moyal", "wick_voros", "coboundary", "quadratic", "sum", "zero"]


class QuadraticGenerator(Generator):
    """``alpha(p, q) = i q^T A p + q^T S (p - q)``."""

    def __init__(self, theta_a: Any, theta_s: Any = None, kind: str = "quadratic") -> None:
        a = np.asarray(theta_a, dtype=float)
        ok, error = validate_antisymmetric(a)
        if not ok:
            raise ValidationFailure(f"theta_A: {error}")
        s = np.zeros_like(a) if theta_s is None else np.asarray(theta_s, dtype=float)
        ok, error = validate_symmetric(s)
        if not ok:
            raise ValidationFailure(f"theta_S: {error}")
        if s.shape != a.shape:
            raise DimensionMismatchError(
                "theta_A and theta_S have different shapes", a=a.shape, s=s.shape
            )
        self.theta_a = a
        self.theta_s = s
        self.theta_a.setflags(write=False)
        self.theta_s.setflags(write=False)
        self.kind = kind
        super().__init__(a.shape[0], validate=False)

    def evaluate(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        antisym = np.einsum("...i,ij,...j->...", q, self.theta_a, p)
        sym = np.einsum("...i,ij,...j->...", q, self.theta_s, p - q)
        return 1j * antisym + sym

    @property
    def is_harmonic_form(self) -> bool:
        return not np.any(self.theta_s)

    def harmonic(self) -> QuadraticGenerator:
        """Exact harmonic representative: the Moyal generator of ``A``."""
        return QuadraticGenerator(self.theta_a, kind="moyal")

    def coboundary_potential(self) -> QuadraticOneCochain:
        """``beta(p) = -1/2 p^T S p``, whose coboundary is the symmetric part."""
        return QuadraticOneCochain(-0.5 * self.theta_s)

    def exact_commutator_matrix(self) -> np.ndarray:
        """Mixed second derivatives at the origin, antisymmetrized: ``-2i A``."""
        return -2j * self.theta_a


def make_moyal(theta_a: Any) -> QuadraticGenerator:
    """Groenewold-Moyal generator ``i q^T theta_A p``."""
    return QuadraticGenerator(theta_a, kind="moyal")


def make_wick_voros(theta_a: Any, theta_s: Any) -> QuadraticGenerator:
    """Wick-Voros generator: Moyal plus ``q^T theta_S (p - q)``."""
    return QuadraticGenerator(theta_a, theta_s, kind="wick_voros")


def make_quadratic(theta_a: Any, theta_s: Any) -> QuadraticGenerator:
    return QuadraticGenerator(theta_a, theta_s, kind="quadratic")


def make_zero(dim: int) -> QuadraticGenerator:
    """Generator of the ordinary pointwise product."""
    return QuadraticGenerator(np.zeros((dim, dim)), kind="zero")


def make_coboundary(beta: OneCochain) -> Generator:
    return coboundary1(beta)


def make_sum(g1: Generator, g2: Generator) -> Generator:
    """Pointwise sum of two generators of the same dimension."""
    if g1.dim != g2.dim:
        raise DimensionMismatchError(
            "Cannot add generators of different dimension", left=g1.dim, right=g2.dim
        )
    return LinearGenerator([(1.0, g1), (1.0, g2)])


def quadratic_form_polynomial(matrix: Any) -> PolynomialOneCochain:
    """Rewrite ``p^T M p`` as a polynomial in monomial coefficients."""
    m = np.asarray(matrix, dtype=complex)
    dim = m.shape[0]
    coefficients: dict[tuple[int, ...], complex] = {}
    for i in range(dim):
        for j in range(dim):
            index = [0] * dim
            index[i] += 1
            index[j] += 1
            key = tuple(index)
            coefficients[key] = coefficients.get(key, 0j) + m[i, j]
    return PolynomialOneCochain(coefficients, dim)


# ---------------------------------------------------------------------------
# Structured spec
# ---------------------------------------------------------------------------


class GeneratorSpec(BaseModel):
    """Structured config form of a generator."""

    kind: GeneratorKind
    dim: int = Field(ge=1)
    theta_A: Optional[list[list[float]]] = None
    theta_S: Optional[list[list[float]]] = None
    beta: Optional[list[tuple[list[int], float, float]]] = None
    terms: Optional[list[GeneratorSpec]] = None
    version: int = SPEC_VERSION

    @field_validator("version")
    @classmethod
    def validate_version(cls, v: int) -> int:
        if v != SPEC_VERSION:
            raise ValueError(f"Unsupported spec version {v} (expected {SPEC_VERSION})")
        return v

    @field_validator("theta_A", "theta_S")
    @classmethod
    def validate_square(cls, v: Optional[list[list[float]]]) -> Optional[list[list[float]]]:
        if v is None:
            return v
        n = len(v)
        if n == 0 or any(len(row) != n for row in v):
            raise ValueError("Matrix must be square")
        return v

    @model_validator(mode="after")
    def validate_fields_for_kind(self) -> GeneratorSpec:
        needs = {
            "moyal": ("theta_A",),
            "wick_voros": ("theta_A", "theta_S"),
            "quadratic": ("theta_A", "theta_S"),
            "coboundary": ("beta",),
            "sum": ("terms",),
            "zero": (),
        }[self.kind]
        for name in needs:
            if getattr(self, name) is None:
                raise ValueError(f"Generator kind '{self.kind}' requires '{name}'")
        for name in ("theta_A", "theta_S"):
            matrix = getattr(self, name)
            if matrix is not None and len(matrix) != self.dim:
                raise ValueError(f"{name} must be {self.dim}x{self.dim}")
        for index, _, _ in self.beta or []:
            if len(index) != self.dim:
                raise ValueError(f"beta multi-index {index} must have {self.dim} entries")
        if self.kind == "sum" and not self.terms:
            raise ValueError("Sum spec needs at least one term")
        for term in self.terms or []:
            if term.dim != self.dim:
                raise ValueError("Sum terms must share the spec dimension")
        return self


GeneratorSpec.model_rebuild()


def load_generator_spec(data: Any) -> GeneratorSpec:
    """Validate raw mapping data into a :class:`GeneratorSpec`."""
    if not isinstance(data, dict):
        raise SpecParseError("Generator spec must be a mapping")
    try:
        return GeneratorSpec(**data)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first.get("loc", ())) or "spec"
        raise SpecParseError(
            f"Invalid generator spec at {location}: {first.get('msg')}"
        ) from e
    except TypeError as e:
        raise SpecParseError(f"Invalid generator spec: {e}") from e


def _beta_from_entries(entries: list[tuple[list[int], float, float]], dim: int) -> PolynomialOneCochain:
    coefficients: dict[tuple[int, ...], complex] = {}
    for index, re, im in entries:
        key = tuple(index)
        coefficients[key] = coefficients.get(key, 0j) + complex(re, im)
    return PolynomialOneCochain(coefficients, dim)


def parse_generator(spec: Any) -> Generator:
    """Build a generator from a :class:`GeneratorSpec` or its mapping form."""
    if not isinstance(spec, GeneratorSpec):
        spec = load_generator_spec(spec)

    try:
        if spec.kind == "moyal":
            return make_moyal(spec.theta_A)
        if spec.kind == "wick_voros":
            return make_wick_voros(spec.theta_A, spec.theta_S)
        if spec.kind == "quadratic":
            return make_quadratic(spec.theta_A, spec.theta_S)
        if spec.kind == "zero":
            return make_zero(spec.dim)
        if spec.kind == "coboundary":
            return make_coboundary(_beta_from_entries(spec.beta or [], spec.dim))
        terms = [parse_generator(term) for term in spec.terms or []]
        return LinearGenerator([(1.0, g) for g in terms])
    except ValidationFailure as e:
        raise SpecParseError(f"Generator spec rejected: {e}") from e


def _polynomial_entries(beta: OneCochain) -> list[tuple[list[int], float, float]]:
    if isinstance(beta, QuadraticOneCochain):
        beta = quadratic_form_polynomial(beta.matrix)
    if not isinstance(beta, PolynomialOneCochain):
        raise SpecParseError(
            "Only polynomial or quadratic-form one-cochains can be serialized",
            kind=beta.kind,
        )
    return [
        (list(index), float(c.real), float(c.imag))
        for index, c in sorted(beta.coefficients.items())
    ]


def generator_to_spec(alpha: Generator) -> GeneratorSpec:
    """Serialize a generator built from the supported families."""
    if isinstance(alpha, QuadraticGenerator):
        data: dict[str, Any] = {"kind": alpha.kind, "dim": alpha.dim}
        if alpha.kind != "zero":
            data["theta_A"] = alpha.theta_a.tolist()
        if alpha.kind in ("wick_voros", "quadratic"):
            data["theta_S"] = alpha.theta_s.tolist()
        return GeneratorSpec(**data)
    if isinstance(alpha, CoboundaryGenerator):
        return GeneratorSpec(
            kind="coboundary", dim=alpha.dim, beta=_polynomial_entries(alpha.beta)
        )
    if isinstance(alpha, LinearGenerator) and all(c == 1 for c, _ in alpha.terms):
        return GeneratorSpec(
            kind="sum",
            dim=alpha.dim,
            terms=[generator_to_spec(g) for _, g in alpha.terms],
        )
    raise SpecParseError("Generator has no spec form", kind=alpha.kind)
