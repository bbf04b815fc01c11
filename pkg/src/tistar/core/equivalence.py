"""
Equivalence of translation-invariant star products.

Two products are isomorphic exactly when their generators are
cohomologous, ``alpha_2 = alpha_1 + d beta``. The isomorphism is the
Fourier multiplier ``T f~(p) = exp(beta(p)) f~(p)``, which carries
``*_{alpha_1 + d beta}`` onto ``*_{alpha_1}``. Equality of harmonic parts is
the deciding test; the mode-commutator criterion is an independent
second route.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from ..utils.logging import get_logger
from .cochains import (
    DEFAULT_SEED,
    CoboundaryGenerator,
    Generator,
    LinearGenerator,
    OneCochain,
    PredicateReport,
    SampleSet,
    _tolerance,
    conjugate_generator,
    guarded_exp,
    is_cocycle,
    scaled_residual,
)
from .errors import NotACocycleError
from .hodge import COCYCLE_SAMPLES, harmonic_part, lattice_pairs, recover_witness
from .lattice import GridSpec
from .star import BandlimitedField, integrated_star, require_same_grid, star

logger = get_logger(__name__)

EQUIVALENCE_TOLERANCE = 1e-8


def apply_T(beta: OneCochain, f: BandlimitedField) -> BandlimitedField:
    """Multiply every coefficient by ``exp(beta(p))``."""
    nonzero = f.coeffs != 0
    exponents = np.zeros(f.grid.shape, dtype=complex)
    if np.any(nonzero):
        momenta = f.grid.momenta().reshape(f.grid.shape + (f.grid.dim,))
        exponents[nonzero] = beta.evaluate(momenta[nonzero])
    return f.with_coeffs(f.coeffs * guarded_exp(exponents))


def intertwining_residual(
    beta: OneCochain,
    alpha_twisted: Generator,
    alpha: Generator,
    f: BandlimitedField,
    g: BandlimitedField,
) -> float:
    """``max |T(f *' g) - T f * T g|`` with ``*'`` from ``alpha_twisted = alpha + d beta``."""
    require_same_grid(f, g)
    lhs = apply_T(beta, star(f, g, alpha_twisted))
    rhs = star(apply_T(beta, f), apply_T(beta, g), alpha)
    scale = max(lhs.max_abs(), rhs.max_abs())
    return float(np.max(np.abs(lhs.coeffs - rhs.coeffs)) / (1.0 + scale))


@dataclass
class EquivalenceVerdict:
    """Outcome of comparing two generators."""

    equivalent: bool
    witness: Optional[OneCochain]
    harmonic_gap: float
    tolerance: float
    evidence: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "equivalent": self.equivalent,
            "harmonic_gap": self.harmonic_gap,
            "tolerance": self.tolerance,
            "evidence": dict(self.evidence),
        }
        if self.witness is not None and hasattr(self.witness, "grid"):
            data["witness_grid"] = self.witness.grid.describe()  # type: ignore[attr-defined]
        return data


def _seed(samples: SampleSet) -> int:
    return samples.seed if samples.seed is not None else DEFAULT_SEED


def _triples(alpha: Generator, samples: SampleSet) -> SampleSet:
    if samples.arity >= 3:
        return samples
    return SampleSet.random(
        alpha.dim, COCYCLE_SAMPLES, arity=3, seed=_seed(samples)
    )


def _require_cocycle(alpha: Generator, samples: SampleSet, tol: float, label: str) -> None:
    report = is_cocycle(alpha, _triples(alpha, samples), tol)
    if not report.passed:
        logger.error(f"{label} generator is not a cocycle (residual {report.max_residual:.3e})")
        raise NotACocycleError(
            f"{label} generator fails the cyclic condition",
            residual=f"{report.max_residual:.3e}",
        )


def harmonic_gap(
    alpha1: Generator, alpha2: Generator, samples: SampleSet
) -> tuple[float, np.ndarray]:
    """Largest scaled difference of the harmonic parts, and where it occurs."""
    h1 = harmonic_part(alpha1, check=False)
    h2 = harmonic_part(alpha2, check=False)
    p, q = samples.column(0), samples.column(1)
    a, b = h1.evaluate(p, q), h2.evaluate(p, q)
    gap = scaled_residual(a - b, a, b)
    idx = int(np.argmax(gap))
    return float(gap[idx]), samples.points[idx, :2]


def decide_equivalence(
    alpha1: Generator,
    alpha2: Generator,
    samples: SampleSet,
    grid: GridSpec,
    tol: Optional[float] = None,
) -> EquivalenceVerdict:
    """
    Decide whether ``alpha1`` and ``alpha2`` generate isomorphic products.

    When they do, the verdict carries a lattice witness ``beta`` with
    ``alpha1 + d beta = alpha2``.
    """
    tol = tol if tol is not None else EQUIVALENCE_TOLERANCE
    samples.require(alpha1.dim, 2)
    _require_cocycle(alpha1, samples, tol, "First")
    _require_cocycle(alpha2, samples, tol, "Second")

    gap, _ = harmonic_gap(alpha1, alpha2, samples)
    evidence: dict[str, float] = {"harmonic_gap": gap}
    if gap > tol:
        logger.info(f"Generators are not equivalent (harmonic gap {gap:.3e})")
        return EquivalenceVerdict(False, None, gap, tol, evidence)

    difference = LinearGenerator([(1.0, alpha2), (-1.0, alpha1)])
    witness = recover_witness(difference, grid, samples, tol, seed=_seed(samples))
    evidence["witness_path_residual"] = witness.path_residual

    pairs = lattice_pairs(grid, len(samples), _seed(samples)) * grid.step
    kp, kq = pairs[:, 0], pairs[:, 1]
    rebuilt = CoboundaryGenerator(witness).evaluate(kp, kq)
    target = difference.evaluate(kp, kq)
    evidence["witness_coboundary_residual"] = float(
        np.max(scaled_residual(rebuilt - target, rebuilt, target))
    )

    momenta = grid.momenta()
    values = witness.evaluate(momenta)
    mirrored = witness.evaluate(-momenta)
    evidence["witness_involution_residual"] = float(
        np.max(scaled_residual(np.conj(values) - mirrored, values, mirrored))
    )
    logger.info(
        f"Generators are equivalent (harmonic gap {gap:.3e}, "
        f"witness residual {evidence['witness_coboundary_residual']:.3e})"
    )
    return EquivalenceVerdict(True, witness, gap, tol, evidence)


def _commutator_factor(alpha_h: Generator, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    exponent = alpha_h.evaluate(p + q, p)
    return guarded_exp(exponent) - guarded_exp(-exponent)


def mode_commutator_criterion(
    alpha1: Generator,
    alpha2: Generator,
    samples: SampleSet,
    tol: Optional[float] = None,
) -> PredicateReport:
    """
    Equality of the harmonic commutator factors ``e^{a} - e^{-a}``,
    ``a = alpha_H(p + q, p)``, of both generators on sampled pairs.

    Passing means the two mode commutators differ only by an exponential
    factor, which happens exactly for cohomologous generators.
    """
    samples.require(alpha1.dim, 2)
    tol = tol if tol is not None else EQUIVALENCE_TOLERANCE
    h1 = harmonic_part(alpha1, samples, tol)
    h2 = harmonic_part(alpha2, samples, tol)
    p, q = samples.column(0), samples.column(1)
    c1 = _commutator_factor(h1, p, q)
    c2 = _commutator_factor(h2, p, q)
    return PredicateReport.from_residuals(
        "mode_commutator_criterion",
        scaled_residual(c1 - c2, c1, c2),
        samples.points[:, :2],
        tol,
    )


def commutator_relation(
    alpha1: Generator,
    alpha2: Generator,
    beta: OneCochain,
    samples: SampleSet,
    tol: Optional[float] = None,
) -> PredicateReport:
    """``[e^{ipx}, e^{iqx}]_2 = e^{d beta(p+q, p)} [e^{ipx}, e^{iqx}]_1`` for ``alpha2 = alpha1 + d beta``."""
    samples.require(alpha1.dim, 2)
    p, q = samples.column(0), samples.column(1)
    total = p + q

    def bracket(alpha: Generator) -> np.ndarray:
        return guarded_exp(alpha.evaluate(total, p)) - guarded_exp(alpha.evaluate(total, q))

    d_beta = beta.evaluate(p) - beta.evaluate(total) + beta.evaluate(q)
    lhs = bracket(alpha2)
    rhs = guarded_exp(d_beta) * bracket(alpha1)
    return PredicateReport.from_residuals(
        "commutator_relation",
        scaled_residual(lhs - rhs, lhs, rhs),
        samples.points[:, :2],
        _tolerance(tol if tol is not None else EQUIVALENCE_TOLERANCE),
    )


def quantum_identities(
    alpha1: Generator,
    alpha2: Generator,
    beta: OneCochain,
    samples: SampleSet,
    tol: Optional[float] = None,
) -> PredicateReport:
    """
    One-, two- and three-field identities implied by ``alpha1 + d beta = alpha2``:

        beta(0) = 0
        alpha1(0,p) + beta(p) + beta(-p) = alpha2(0,p)
        alpha1(0,-p-q) + alpha1(p+q,p) + beta(p) + beta(q) + beta(-p-q)
            = alpha2(0,-p-q) + alpha2(p+q,p)
    """
    samples.require(alpha1.dim, 2)
    tol = _tolerance(tol if tol is not None else EQUIVALENCE_TOLERANCE)
    p, q = samples.column(0), samples.column(1)
    zero = np.zeros_like(p)
    pts = samples.points[:, :2]

    origin = np.abs(beta.evaluate(zero[:1]))
    parts = {
        "one_point": PredicateReport.from_residuals(
            "one_point", origin, np.zeros((1, 1, alpha1.dim)), tol
        )
    }

    bp, bmp = beta.evaluate(p), beta.evaluate(-p)
    lhs2 = alpha1.evaluate(zero, p) + bp + bmp
    rhs2 = alpha2.evaluate(zero, p)
    parts["two_point"] = PredicateReport.from_residuals(
        "two_point", scaled_residual(lhs2 - rhs2, lhs2, rhs2, bp, bmp), pts, tol
    )

    total = p + q
    lhs3 = (
        alpha1.evaluate(zero, -total)
        + alpha1.evaluate(total, p)
        + bp
        + beta.evaluate(q)
        + beta.evaluate(-total)
    )
    rhs3 = alpha2.evaluate(zero, -total) + alpha2.evaluate(total, p)
    parts["three_point"] = PredicateReport.from_residuals(
        "three_point", scaled_residual(lhs3 - rhs3, lhs3, rhs3), pts, tol
    )
    return PredicateReport.combine("quantum_identities", parts)


def conjugate_class_gap(
    alpha: Generator, samples: SampleSet, tol: Optional[float] = None
) -> PredicateReport:
    """Harmonic parts of ``alpha`` and its pointwise conjugate cancel."""
    samples.require(alpha.dim, 2)
    h = harmonic_part(alpha, samples)
    h_star = harmonic_part(conjugate_generator(alpha), samples)
    p, q = samples.column(0), samples.column(1)
    a, b = h.evaluate(p, q), h_star.evaluate(p, q)
    return PredicateReport.from_residuals(
        "conjugate_class", scaled_residual(a + b, a, b), samples.points[:, :2], _tolerance(tol)
    )


def integration_equivalence(
    alpha1: Generator,
    alpha2: Generator,
    beta: OneCochain,
    fields: Sequence[BandlimitedField],
    tol: Optional[float] = None,
) -> PredicateReport:
    """
    ``integral (T f1) *1 ... *1 (T fn) = integral f1 *2 ... *2 fn``
    for ``alpha2 = alpha1 + d beta`` and ``T`` the multiplier of ``beta``.
    """
    transformed = [apply_T(beta, f) for f in fields]
    lhs = integrated_star(transformed, alpha1)
    rhs = integrated_star(list(fields), alpha2)
    residual = scaled_residual(np.asarray(lhs - rhs), np.asarray(lhs), np.asarray(rhs))
    return PredicateReport.from_residuals(
        "integration_equivalence",
        np.atleast_1d(residual),
        np.zeros((1, 1, fields[0].grid.dim)),
        _tolerance(tol if tol is not None else EQUIVALENCE_TOLERANCE),
    )
