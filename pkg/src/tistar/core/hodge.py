"""
Hodge decomposition of generators.

Every cocycle splits uniquely as ``alpha = alpha_H + d beta`` with a
harmonic part

    alpha_H(p, q) = 1/2 (alpha(p + q, q) - alpha(p + q, p))

annihilated by the Laplace-Beltrami operator. This module computes that
split, recovers ``beta`` on a momentum lattice, and checks the structural
properties of ``omega(p, q) = alpha(p + q, p) - alpha(p + q, q) = -2 alpha_H``
and of the space-time commutator matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Sequence

import numpy as np

from ..utils.logging import get_logger
from .cochains import (
    DEFAULT_SEED,
    CoboundaryGenerator,
    Evaluation,
    FunctionGenerator,
    Generator,
    LinearGenerator,
    PredicateReport,
    SampleSet,
    TabulatedOneCochain,
    _finish,
    _tolerance,
    as_momenta,
    is_cocycle,
    scaled_residual,
)
from .errors import (
    DimensionMismatchError,
    InconsistentCoboundaryError,
    NonFiniteError,
    NotACoboundaryError,
    NotACocycleError,
)
from .generators import QuadraticGenerator, make_zero
from .lattice import GridSpec

logger = get_logger(__name__)

WITNESS_TOLERANCE = 1e-8
FD_STEP = 1e-4
COCYCLE_SAMPLES = 200
PATH_SAMPLES = 100


# ---------------------------------------------------------------------------
# Symmetrizations
# ---------------------------------------------------------------------------


def symmetrize(alpha: Generator) -> Generator:
    """``alpha'(p, q) = 1/2 (alpha(p, q) + alpha(-p, -q))``."""
    return FunctionGenerator(
        lambda p, q: 0.5 * (alpha.evaluate(p, q) + alpha.evaluate(-p, -q)),
        alpha.dim,
        kind="symmetrized",
        validate=False,
    )


def antisymmetrize(alpha: Generator) -> Generator:
    """``alpha''(p, q) = 1/2 (alpha(p, q) - alpha(-p, -q))``."""
    return FunctionGenerator(
        lambda p, q: 0.5 * (alpha.evaluate(p, q) - alpha.evaluate(-p, -q)),
        alpha.dim,
        kind="antisymmetrized",
        validate=False,
    )


def minus_part(alpha: Generator) -> Generator:
    """``alpha_-(p, q) = 1/2 (alpha(p, q) - alpha(-p, q - p))``."""
    return FunctionGenerator(
        lambda p, q: 0.5 * (alpha.evaluate(p, q) - alpha.evaluate(-p, q - p)),
        alpha.dim,
        kind="minus_part",
        validate=False,
    )


def plus_part(alpha: Generator) -> Generator:
    """``alpha_+(p, q) = 1/2 (alpha(p, q) + alpha(-p, q - p))``, equal to ``1/2 d alpha_0``."""
    return FunctionGenerator(
        lambda p, q: 0.5 * (alpha.evaluate(p, q) + alpha.evaluate(-p, q - p)),
        alpha.dim,
        kind="plus_part",
        validate=False,
    )


# ---------------------------------------------------------------------------
# Harmonic part and Laplacian
# ---------------------------------------------------------------------------


def _harmonic_formula(alpha: Generator) -> Generator:
    def alpha_h(p: np.ndarray, q: np.ndarray) -> np.ndarray:
        total = p + q
        return 0.5 * (alpha.evaluate(total, q) - alpha.evaluate(total, p))

    return FunctionGenerator(alpha_h, alpha.dim, kind="harmonic", validate=False)


def _harmonic_exact(alpha: Generator) -> Optional[Generator]:
    """Closed-form harmonic part for the families where one is known."""
    if isinstance(alpha, QuadraticGenerator):
        return alpha.harmonic()
    if isinstance(alpha, CoboundaryGenerator):
        return make_zero(alpha.dim)
    if isinstance(alpha, LinearGenerator):
        parts = [(c, _harmonic_exact(g)) for c, g in alpha.terms]
        if any(h is None for _, h in parts):
            return None
        if all(isinstance(h, QuadraticGenerator) and c.imag == 0 for c, h in parts):
            theta = sum(c.real * h.theta_a for c, h in parts)  # type: ignore[union-attr]
            theta = np.asarray(theta)
            return QuadraticGenerator(theta, kind="moyal" if np.any(theta) else "zero")
        return LinearGenerator([(c, h) for c, h in parts if h is not None])
    return None


def harmonic_part(
    alpha: Generator,
    samples: Optional[SampleSet] = None,
    tol: Optional[float] = None,
    check: bool = True,
) -> Generator:
    """
    Harmonic representative of the class of ``alpha``.

    Quadratic generators, coboundaries and their linear combinations take
    an exact path; anything else goes through the averaging formula,
    which is only valid for cocycles, so the cyclic condition is checked
    on ``samples`` first unless ``check`` is false.
    """
    exact = _harmonic_exact(alpha)
    if exact is not None:
        return exact

    if check:
        if samples is None or samples.arity < 3:
            samples = SampleSet.random(alpha.dim, COCYCLE_SAMPLES, arity=3)
        report = is_cocycle(alpha, samples, tol)
        if not report.passed:
            logger.error(
                f"Harmonic part requested for a non-cocycle "
                f"(residual {report.max_residual:.3e})"
            )
            raise NotACocycleError(
                "Generator fails the cyclic condition",
                residual=f"{report.max_residual:.3e}",
            )

    return _harmonic_formula(alpha)


def _laplacian(alpha: Generator, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    zero = np.zeros_like(p)
    return np.stack(
        [
            alpha.evaluate(zero, q),
            -alpha.evaluate(zero, p),
            alpha.evaluate(zero, p - q),
            alpha.evaluate(p, q),
            alpha.evaluate(p, p - q),
        ]
    )


def laplace_beltrami(alpha: Generator) -> Any:
    """Pointwise ``Delta alpha``; zero exactly on harmonic generators."""

    def delta(p: Any, q: Any) -> Evaluation:
        a = as_momenta(p, alpha.dim)
        b = as_momenta(q, alpha.dim)
        a, b = np.broadcast_arrays(a, b)
        return _finish(_laplacian(alpha, a, b).sum(axis=0))

    return delta


def is_harmonic(
    alpha: Generator, samples: SampleSet, tol: Optional[float] = None
) -> PredicateReport:
    """``Delta alpha = 0`` on sampled pairs."""
    samples.require(alpha.dim, 2)
    p, q = samples.column(0), samples.column(1)
    terms = _laplacian(alpha, p, q)
    residual = scaled_residual(terms.sum(axis=0), *terms)
    return PredicateReport.from_residuals(
        "harmonic", residual, samples.points[:, :2], _tolerance(tol)
    )


def check_harmonic_relations(
    alpha_h: Generator, samples: SampleSet, tol: Optional[float] = None
) -> PredicateReport:
    """``alpha_H(p,q) = -alpha_H(p,p-q) = alpha_H(-p,-q) = -alpha_H(q,p)``."""
    samples.require(alpha_h.dim, 2)
    tol = _tolerance(tol)
    p, q = samples.column(0), samples.column(1)
    pts = samples.points[:, :2]
    base = alpha_h.evaluate(p, q)
    reflected = alpha_h.evaluate(p, p - q)
    negated = alpha_h.evaluate(-p, -q)
    swapped = alpha_h.evaluate(q, p)
    parts = {
        "reflection": PredicateReport.from_residuals(
            "reflection", scaled_residual(base + reflected, base, reflected), pts, tol
        ),
        "parity": PredicateReport.from_residuals(
            "parity", scaled_residual(base - negated, base, negated), pts, tol
        ),
        "antisymmetry": PredicateReport.from_residuals(
            "antisymmetry", scaled_residual(base + swapped, base, swapped), pts, tol
        ),
    }
    return PredicateReport.combine("harmonic_relations", parts)


def check_periodicity(
    alpha_h: Generator,
    samples: SampleSet,
    shifts: Sequence[int] = range(-3, 4),
    tol: Optional[float] = None,
) -> PredicateReport:
    """``alpha_H(p + n q, q) = alpha_H(p, q)`` for every ``n`` in ``shifts``."""
    samples.require(alpha_h.dim, 2)
    p, q = samples.column(0), samples.column(1)
    base = alpha_h.evaluate(p, q)
    residuals = []
    for n in shifts:
        shifted = alpha_h.evaluate(p + n * q, q)
        residuals.append(scaled_residual(shifted - base, shifted, base))
    residual = np.max(np.stack(residuals), axis=0)
    return PredicateReport.from_residuals(
        "periodicity", residual, samples.points[:, :2], _tolerance(tol)
    )


# ---------------------------------------------------------------------------
# Witness recovery
# ---------------------------------------------------------------------------


class RecoveredWitness(TabulatedOneCochain):
    """Lattice one-cochain recovered from a coboundary.

    ``gauge`` holds the values ``beta(e_mu)`` on the unit lattice steps.
    """

    kind = "recovered"

    def __init__(
        self,
        grid: GridSpec,
        values: Any,
        path_residual: float,
        path_samples: int,
    ) -> None:
        super().__init__(grid, values)
        self.gauge = self.evaluate(np.eye(grid.dim) * grid.step)
        self.path_residual = path_residual
        self.path_samples = path_samples


def _slab(grid: GridSpec, mu: int, k: int) -> tuple[tuple[Any, ...], np.ndarray]:
    """Table index and integer momenta of the points filled at step ``k`` of axis ``mu``."""
    h = grid.half
    index = tuple([slice(None)] * mu + [k + h] + [h] * (grid.dim - mu - 1))
    lower_shape = (grid.points,) * mu
    coords = np.zeros(lower_shape + (grid.dim,), dtype=np.int64)
    if mu:
        mesh = np.meshgrid(*([grid.axis()] * mu), indexing="ij")
        for i, g in enumerate(mesh):
            coords[..., i] = g
    coords[..., mu] = k
    return index, coords


def lattice_pairs(
    grid: GridSpec, count: int, seed: int = DEFAULT_SEED
) -> np.ndarray:
    """Random integer pairs ``(p, q)`` with ``p``, ``q`` and ``p - q`` on the lattice."""
    rng = np.random.default_rng(seed)
    h = grid.half
    found: list[np.ndarray] = []
    have = 0
    while have < count:
        draw = rng.integers(-h, h + 1, size=(4 * count, 2, grid.dim))
        keep = draw[grid.contains(draw[:, 0] - draw[:, 1])]
        found.append(keep)
        have += len(keep)
    return np.concatenate(found)[:count]


def recover_witness(
    alpha: Generator,
    grid: GridSpec,
    samples: Optional[SampleSet] = None,
    tol: Optional[float] = None,
    path_samples: int = PATH_SAMPLES,
    seed: int = DEFAULT_SEED,
    gauge: Optional[Sequence[complex]] = None,
) -> RecoveredWitness:
    """
    Recover ``beta`` with ``d beta = alpha`` on the points of ``grid``.

    The linear ambiguity is fixed by ``beta(e_mu) = gauge[mu]`` (zero by
    default) on the unit lattice steps. Each axis is filled
    outward from the already-filled hyperplane using
    ``beta(p) = beta(+-e_mu) + beta(p -+ e_mu) - alpha(p, +-e_mu)``, and the
    result is checked against ``alpha`` on random lattice pairs.

    Raises:
        NotACoboundaryError: ``alpha`` has a nonzero harmonic part.
        InconsistentCoboundaryError: the recovered table does not reproduce ``alpha``.
    """
    tol = tol if tol is not None else WITNESS_TOLERANCE
    offsets = np.zeros(grid.dim, dtype=complex)
    if gauge is not None:
        offsets = np.asarray(gauge, dtype=complex)
    if offsets.shape != (grid.dim,):
        raise DimensionMismatchError(
            "Gauge needs one value per axis", gauge=offsets.shape, dim=grid.dim
        )

    alpha_h = harmonic_part(alpha, samples, tol)
    if samples is None or samples.arity < 2:
        samples = SampleSet.random(alpha.dim, 4 * PATH_SAMPLES, arity=2, seed=seed)
    samples.require(alpha.dim, 2)
    p, q = samples.column(0), samples.column(1)
    gap = scaled_residual(alpha_h.evaluate(p, q), alpha.evaluate(p, q))
    if float(np.max(gap)) > tol:
        logger.error(f"Witness requested for a non-coboundary (harmonic {np.max(gap):.3e})")
        raise NotACoboundaryError(
            "Generator has a nonzero harmonic part", harmonic=f"{float(np.max(gap)):.3e}"
        )

    h, dp = grid.half, grid.step
    table = np.zeros(grid.shape, dtype=complex)

    for mu in range(grid.dim):
        unit = np.zeros(grid.dim)
        unit[mu] = dp
        beta_minus = complex(alpha.evaluate(np.zeros(grid.dim), unit))
        for k in range(1, h + 1):
            index, coords = _slab(grid, mu, k)
            prev, _ = _slab(grid, mu, k - 1)
            table[index] = table[prev] - alpha.evaluate(coords * dp, unit)
        for k in range(-1, -h - 1, -1):
            index, coords = _slab(grid, mu, k)
            prev, _ = _slab(grid, mu, k + 1)
            table[index] = beta_minus + table[prev] - alpha.evaluate(coords * dp, -unit)

    if np.any(offsets):
        mesh = np.meshgrid(*([grid.axis()] * grid.dim), indexing="ij")
        table += sum(c * n for c, n in zip(offsets, mesh))

    if not np.all(np.isfinite(table)):
        raise NonFiniteError("Recovered witness is not finite")

    pairs = lattice_pairs(grid, path_samples, seed)
    kp, kq = pairs[:, 0], pairs[:, 1]
    def lookup(k: np.ndarray) -> np.ndarray:
        return table[tuple(np.moveaxis(k + h, -1, 0))]

    target = alpha.evaluate(kp * dp, kq * dp)
    rebuilt = lookup(kq) - lookup(kp) + lookup(kp - kq)
    residual = float(np.max(scaled_residual(rebuilt - target, rebuilt, target)))
    logger.debug(
        f"Witness recovered on {grid.describe()}: path residual {residual:.3e} "
        f"over {len(pairs)} pairs"
    )
    if not residual <= tol:
        raise InconsistentCoboundaryError(
            "Recovered witness does not reproduce the generator",
            residual=f"{residual:.3e}",
            tolerance=tol,
        )
    return RecoveredWitness(grid, table, residual, len(pairs))


@dataclass(frozen=True)
class HodgeDecomposition:
    """``alpha = harmonic + d witness`` on the recovery lattice."""

    harmonic: Generator
    witness: RecoveredWitness
    gauge: np.ndarray
    residual: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "harmonic_kind": self.harmonic.kind,
            "gauge": [[float(z.real), float(z.imag)] for z in self.gauge],
            "residual": self.residual,
            "witness_grid": self.witness.grid.describe(),
            "path_samples": self.witness.path_samples,
        }


def decompose(
    alpha: Generator,
    grid: GridSpec,
    samples: Optional[SampleSet] = None,
    tol: Optional[float] = None,
    seed: int = DEFAULT_SEED,
    gauge: Optional[Sequence[complex]] = None,
) -> HodgeDecomposition:
    """Split a cocycle into its harmonic part and a lattice witness."""
    alpha_h = harmonic_part(alpha, samples, tol)
    remainder = LinearGenerator([(1.0, alpha), (-1.0, alpha_h)])
    witness = recover_witness(remainder, grid, samples, tol, seed=seed, gauge=gauge)
    logger.info(
        f"Decomposed {alpha.kind} generator: harmonic kind {alpha_h.kind}, "
        f"residual {witness.path_residual:.3e}"
    )
    return HodgeDecomposition(
        harmonic=alpha_h,
        witness=witness,
        gauge=witness.gauge,
        residual=witness.path_residual,
    )


# ---------------------------------------------------------------------------
# omega
# ---------------------------------------------------------------------------


class Omega:
    """``omega(p, q) = alpha(p + q, p) - alpha(p + q, q)``."""

    def __init__(self, alpha: Generator) -> None:
        self.generator = alpha
        self.dim = alpha.dim

    def evaluate(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        total = p + q
        return self.generator.evaluate(total, p) - self.generator.evaluate(total, q)

    def __call__(self, p: Any, q: Any) -> Evaluation:
        return _finish(
            self.evaluate(as_momenta(p, self.dim), as_momenta(q, self.dim))
        )


def omega(alpha: Generator) -> Omega:
    return Omega(alpha)


def check_omega_properties(
    alpha: Generator,
    samples: SampleSet,
    shifts: Sequence[int] = range(-3, 4),
    tol: Optional[float] = None,
) -> PredicateReport:
    """Antisymmetry, parity, vanishing, shift rules and ``omega = -2 alpha_H``."""
    samples.require(alpha.dim, 2)
    tol = _tolerance(tol)
    w = omega(alpha)
    alpha_h = harmonic_part(alpha, check=False)
    p, q = samples.column(0), samples.column(1)
    pts = samples.points[:, :2]

    base = w.evaluate(p, q)

    def part(name: str, lhs: np.ndarray, rhs: np.ndarray) -> PredicateReport:
        return PredicateReport.from_residuals(
            name, scaled_residual(lhs - rhs, lhs, rhs), pts, tol
        )

    swapped = w.evaluate(q, p)
    shifted = [w.evaluate(p + n * q, q) for n in shifts]
    direct = alpha.evaluate(p, p - q) - alpha.evaluate(p, q)
    parts = {
        "antisymmetry": part("antisymmetry", base, -swapped),
        "parity": part("parity", base, w.evaluate(-p, -q)),
        "vanishing": part("vanishing", w.evaluate(p, np.zeros_like(q)), np.zeros_like(base)),
        "difference_form": part("difference_form", base, direct),
        "translation": part("translation", base, w.evaluate(p - q, q)),
        "periodicity": PredicateReport.combine(
            "periodicity",
            {f"n={n}": part(f"n={n}", s, base) for n, s in zip(shifts, shifted)},
        ),
        "odd_in_second": part("odd_in_second", base, -w.evaluate(p, -q)),
        "harmonic_multiple": part("harmonic_multiple", base, -2.0 * alpha_h.evaluate(p, q)),
        "swapped_harmonic": part("swapped_harmonic", base, 2.0 * alpha_h.evaluate(q, p)),
    }
    return PredicateReport.combine("omega_properties", parts)


def continued_fraction_ratio(quotients: Sequence[int]) -> tuple[Fraction, list[int]]:
    """
    Convergent numerators of ``[n_1; n_2, ...]``.

    Uses ``N_0 = 1``, ``N_1 = n_1`` and ``N_k = n_k N_{k-1} + N_{k-2}``;
    returns ``N_K / N_{K-1}`` and the full list ``N_0..N_K``.
    """
    if not quotients:
        raise ValueError("Need at least one partial quotient")
    if any(n < 1 for n in quotients):
        raise ValueError("Partial quotients must be positive integers")
    numerators = [1, int(quotients[0])]
    for n in quotients[1:]:
        numerators.append(int(n) * numerators[-1] + numerators[-2])
    return Fraction(numerators[-1], numerators[-2]), numerators


def check_rational_rays(
    alpha: Generator,
    samples: SampleSet,
    count: int = 100,
    max_depth: int = 5,
    max_quotient: int = 4,
    seed: int = DEFAULT_SEED,
    tol: Optional[float] = None,
) -> PredicateReport:
    """
    ``omega(r p, p) = 0`` for continued-fraction rationals ``r``.

    Each trial draws random partial quotients, a base momentum from
    ``samples``, and checks both the ray ``r p`` and every pair of
    consecutive convergent numerators ``(N_k p, N_{k-1} p)``.
    """
    samples.require(alpha.dim, 1)
    tol = _tolerance(tol)
    rng = np.random.default_rng(seed)
    w = omega(alpha)
    base = samples.column(0)

    residuals = np.empty(count)
    points = np.empty((count, 1, alpha.dim))
    for t in range(count):
        depth = int(rng.integers(1, max_depth + 1))
        quotients = [int(n) for n in rng.integers(1, max_quotient + 1, size=depth)]
        ratio, numerators = continued_fraction_ratio(quotients)
        p = base[t % len(base)]
        lhs = [np.asarray(float(ratio) * p)]
        rhs = [p]
        for a, b in zip(numerators[1:], numerators[:-1]):
            lhs.append(a * p)
            rhs.append(b * p)
        left = np.stack(lhs)
        right = np.stack(rhs)
        values = w.evaluate(left, right)
        scale = alpha.evaluate(left + right, left)
        residuals[t] = float(np.max(scaled_residual(values, scale)))
        points[t, 0] = p
    return PredicateReport.from_residuals("rational_rays", residuals, points, tol)


# ---------------------------------------------------------------------------
# Space-time commutator matrix
# ---------------------------------------------------------------------------


def _mixed_derivatives(alpha: Generator, h: float) -> np.ndarray:
    """``D[mu, nu] = d^2 alpha / dz1_mu dz2_nu`` at the origin, central differences."""
    eye = np.eye(alpha.dim) * h
    z1 = eye[:, None, :]
    z2 = eye[None, :, :]
    z1, z2 = np.broadcast_arrays(z1, z2)
    total = (
        alpha.evaluate(z1, z2)
        - alpha.evaluate(z1, -z2)
        - alpha.evaluate(-z1, z2)
        + alpha.evaluate(-z1, -z2)
    )
    return total / (4.0 * h * h)


def _exact_commutator(alpha: Generator) -> Optional[np.ndarray]:
    if isinstance(alpha, QuadraticGenerator):
        return alpha.exact_commutator_matrix()
    if isinstance(alpha, CoboundaryGenerator):
        return np.zeros((alpha.dim, alpha.dim), dtype=complex)
    if isinstance(alpha, LinearGenerator):
        parts = [(c, _exact_commutator(g)) for c, g in alpha.terms]
        if all(m is not None for _, m in parts):
            return sum((c * m for c, m in parts), np.zeros((alpha.dim, alpha.dim), dtype=complex))
    return None


def commutator_matrix(
    alpha: Generator,
    h: float = FD_STEP,
    richardson: bool = True,
    exact: bool = True,
) -> np.ndarray:
    """
    ``Theta[mu, nu] = D[mu, nu] - D[nu, mu]`` with ``D`` the mixed second
    derivatives of ``alpha`` at the origin; coboundaries contribute nothing.

    For the Moyal generator of ``A`` this is ``-2i A``.
    """
    if exact:
        known = _exact_commutator(alpha)
        if known is not None:
            return known

    d = _mixed_derivatives(alpha, h)
    if richardson:
        d = (4.0 * _mixed_derivatives(alpha, h / 2.0) - d) / 3.0
    if not np.all(np.isfinite(d)):
        raise NonFiniteError("Finite-difference derivative is not finite", step=h)
    return d - d.T
