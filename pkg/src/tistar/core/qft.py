"""
Scalar Feynman amplitudes with star-product vertex and propagator factors.

A ``k``-valent vertex with incoming momenta ``p1..pk`` (in the order the
fields appear in the interaction) carries

    V = exp(sum_{i=2..k} alpha(P_i, P_{i-1})),   P_i = p1 + ... + pi

and every propagator of momentum ``p`` carries ``exp(-alpha(0, p)) / Xi(p)``
with the Euclidean kinetic symbol ``Xi(p) = p^2 + m^2``. Loop momenta are
summed over a lattice box. All exponents are accumulated in log space
and amplitudes are returned as log-magnitude and phase.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from ..utils.logging import get_logger
from ..utils.parallel import chunked_map
from .cochains import (
    DEFAULT_SEED,
    CoboundaryGenerator,
    Generator,
    OneCochain,
    PredicateReport,
    _tolerance,
    as_momenta,
    guarded_exp,
    scaled_residual,
)
from .errors import (
    DimensionMismatchError,
    LoopBudgetError,
    PoleError,
    SpecParseError,
)
from .hodge import omega
from .lattice import GridSpec

logger = get_logger(__name__)

LOOP_CHUNK_SIZE = 4096
CONSERVATION_TOLERANCE = 1e-9


# ---------------------------------------------------------------------------
# Log-space amplitudes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogAmplitude:
    """Complex number stored as ``exp(log_magnitude + i phase)``."""

    log_magnitude: float
    phase: float

    @classmethod
    def from_log(cls, z: complex) -> LogAmplitude:
        z = complex(z)
        phase = math.remainder(z.imag, 2.0 * math.pi)
        return cls(z.real, phase)

    @classmethod
    def zero(cls) -> LogAmplitude:
        return cls(-math.inf, 0.0)

    @property
    def log(self) -> complex:
        return complex(self.log_magnitude, self.phase)

    @property
    def value(self) -> complex:
        if self.log_magnitude == -math.inf:
            return 0j
        return complex(guarded_exp(self.log))

    def log_ratio(self, other: LogAmplitude) -> complex:
        """``log(self / other)`` with the phase wrapped to ``(-pi, pi]``."""
        return complex(
            self.log_magnitude - other.log_magnitude,
            math.remainder(self.phase - other.phase, 2.0 * math.pi),
        )

    def ratio(self, other: LogAmplitude) -> complex:
        return complex(guarded_exp(self.log_ratio(other)))

    def to_dict(self) -> dict[str, float]:
        return {"log_magnitude": self.log_magnitude, "phase": self.phase}


def _log_sum(terms: np.ndarray) -> tuple[float, complex]:
    """Shifted sum ``(M, S)`` with ``sum exp(terms) = exp(M) S``."""
    if terms.size == 0:
        return -math.inf, 0j
    shift = float(np.max(terms.real))
    return shift, complex(np.sum(np.exp(terms - shift)))


def _combine_log_sums(parts: Sequence[tuple[float, complex]]) -> complex:
    finite = [(m, s) for m, s in parts if m != -math.inf]
    if not finite:
        return complex(-math.inf)
    top = max(m for m, _ in finite)
    total = sum((s * math.exp(m - top) for m, s in finite), 0j)
    if total == 0:
        return complex(-math.inf)
    return top + complex(np.log(total))


# ---------------------------------------------------------------------------
# Kinetic symbol and loop configuration
# ---------------------------------------------------------------------------


class KineticSymbol:
    """Euclidean ``Xi(p) = p^2 + m^2``."""

    def __init__(self, mass2: float) -> None:
        if not mass2 > 0:
            raise ValueError("Mass squared must be positive")
        self.mass2 = float(mass2)

    def evaluate(self, p: np.ndarray) -> np.ndarray:
        return np.sum(p * p, axis=-1) + self.mass2

    def __call__(self, p: Any) -> Any:
        return self.evaluate(np.asarray(p, dtype=float))

    def log_regular(self, p: np.ndarray) -> np.ndarray:
        """``log Xi(p)``, refusing zeros."""
        values = self.evaluate(p)
        if np.any(values <= 0):
            raise PoleError("Kinetic symbol vanishes on a summed momentum")
        return np.log(values)


class LoopConfig(BaseModel):
    """Loop-momentum lattice and mass for amplitude sums."""

    grid: GridSpec
    mass2: float = Field(1.0, gt=0.0)
    max_terms: int = Field(2_000_000, gt=0)

    @property
    def kinetic(self) -> KineticSymbol:
        return KineticSymbol(self.mass2)


# ---------------------------------------------------------------------------
# Graphs
# ---------------------------------------------------------------------------


class Line(BaseModel):
    """A propagator; external lines carry a fixed incoming momentum."""

    id: str
    kind: Literal["internal", "external"]
    momentum: Optional[list[float]] = None


class Vertex(BaseModel):
    """Interaction vertex with the ordered ids of its incident lines."""

    lines: list[str] = Field(min_length=2)


class FeynmanGraph(BaseModel):
    """Connected scalar graph; each internal line joins two vertex slots."""

    dim: int = Field(ge=1)
    lines: list[Line]
    vertices: list[Vertex] = Field(min_length=1)

    @model_validator(mode="after")
    def validate_topology(self) -> FeynmanGraph:
        ids = [line.id for line in self.lines]
        if len(set(ids)) != len(ids):
            raise ValueError("Line ids must be unique")
        by_id = {line.id: line for line in self.lines}

        counts = {i: 0 for i in ids}
        for vertex in self.vertices:
            for lid in vertex.lines:
                if lid not in by_id:
                    raise ValueError(f"Vertex references unknown line '{lid}'")
                counts[lid] += 1

        total = np.zeros(self.dim)
        scale = 0.0
        for line in self.lines:
            expected = 1 if line.kind == "external" else 2
            if counts[line.id] != expected:
                raise ValueError(
                    f"{line.kind.capitalize()} line '{line.id}' must appear "
                    f"{expected} time(s), found {counts[line.id]}"
                )
            if line.kind == "external":
                if line.momentum is None or len(line.momentum) != self.dim:
                    raise ValueError(
                        f"External line '{line.id}' needs a {self.dim}-component momentum"
                    )
                total += np.asarray(line.momentum)
                scale = max(scale, float(np.max(np.abs(line.momentum))))
            elif line.momentum is not None:
                raise ValueError(f"Internal line '{line.id}' cannot fix a momentum")
        if np.max(np.abs(total)) > CONSERVATION_TOLERANCE * (1.0 + scale):
            raise ValueError("External momenta do not sum to zero")

        parent = list(range(len(self.vertices)))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for a, b in self._internal_endpoints().values():
            parent[find(a)] = find(b)
        if len({find(i) for i in range(len(self.vertices))}) != 1:
            raise ValueError("Graph must be connected")
        return self

    def _internal_endpoints(self) -> dict[str, tuple[int, int]]:
        internal = {line.id for line in self.lines if line.kind == "internal"}
        seen: dict[str, list[int]] = {}
        for v, vertex in enumerate(self.vertices):
            for lid in vertex.lines:
                if lid in internal:
                    seen.setdefault(lid, []).append(v)
        return {lid: (ends[0], ends[1]) for lid, ends in seen.items()}

    @property
    def external_lines(self) -> list[Line]:
        return [line for line in self.lines if line.kind == "external"]

    @property
    def internal_lines(self) -> list[Line]:
        return [line for line in self.lines if line.kind == "internal"]

    @property
    def loop_count(self) -> int:
        return len(self.internal_lines) - len(self.vertices) + 1

    def external_momenta(self) -> np.ndarray:
        if not self.external_lines:
            return np.zeros((0, self.dim))
        return np.asarray([line.momentum for line in self.external_lines], dtype=float)


def load_graph_spec(data: Any) -> FeynmanGraph:
    """Validate raw mapping data into a :class:`FeynmanGraph`."""
    if not isinstance(data, dict):
        raise SpecParseError("Graph spec must be a mapping")
    try:
        return FeynmanGraph(**data)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first.get("loc", ())) or "graph"
        raise SpecParseError(f"Invalid graph spec at {location}: {first.get('msg')}") from e


@dataclass(frozen=True)
class MomentumRouting:
    """Internal momenta ``k = offset + coefficients @ loop_momenta``."""

    offset: np.ndarray
    coefficients: np.ndarray
    loop_lines: tuple[int, ...]
    slots: tuple[tuple[tuple[str, int, int], ...], ...]


def route_momenta(graph: FeynmanGraph) -> MomentumRouting:
    """
    Solve momentum conservation at every vertex.

    The first appearance of an internal line brings ``+k`` into its
    vertex and the second ``-k``. Lines that close a cycle become free
    loop momenta; the rest follow from the incidence matrix.
    """
    internal = [line.id for line in graph.internal_lines]
    external = [line.id for line in graph.external_lines]
    col = {lid: i for i, lid in enumerate(internal)}
    ext_index = {lid: i for i, lid in enumerate(external)}
    ext_momenta = graph.external_momenta()

    n_v, n_i = len(graph.vertices), len(internal)
    incidence = np.zeros((n_v, n_i))
    inflow = np.zeros((n_v, graph.dim))
    seen: set[str] = set()
    slots = []
    for v, vertex in enumerate(graph.vertices):
        vertex_slots = []
        for lid in vertex.lines:
            if lid in ext_index:
                inflow[v] += ext_momenta[ext_index[lid]]
                vertex_slots.append(("external", ext_index[lid], 1))
            else:
                sign = -1 if lid in seen else 1
                seen.add(lid)
                incidence[v, col[lid]] += sign
                vertex_slots.append(("internal", col[lid], sign))
        slots.append(tuple(vertex_slots))

    tree: list[int] = []
    loops: list[int] = []
    for j in range(n_i):
        candidate = tree + [j]
        if np.linalg.matrix_rank(incidence[:, candidate]) > len(tree):
            tree.append(j)
        else:
            loops.append(j)

    offset = np.zeros((n_i, graph.dim))
    coefficients = np.zeros((n_i, len(loops)))
    for j, line in enumerate(loops):
        coefficients[line, j] = 1.0
    if tree:
        solve = np.linalg.pinv(incidence[:, tree])
        offset[tree] = -solve @ inflow
        coefficients[tree] = -solve @ incidence[:, loops]
        coefficients = np.where(
            np.abs(coefficients - np.rint(coefficients)) < 1e-12,
            np.rint(coefficients),
            coefficients,
        )

    mismatch = incidence @ offset + inflow
    if np.max(np.abs(mismatch), initial=0.0) > CONSERVATION_TOLERANCE * (
        1.0 + np.max(np.abs(ext_momenta), initial=0.0)
    ):
        raise SpecParseError("Momentum conservation cannot be solved for this graph")

    return MomentumRouting(offset, coefficients, tuple(loops), tuple(slots))


# ---------------------------------------------------------------------------
# Vertex and propagator factors
# ---------------------------------------------------------------------------


def vertex_exponent(alpha: Generator, momenta: Any) -> Any:
    """``sum_{i>=2} alpha(P_i, P_{i-1})`` over the last-but-one axis."""
    p = as_momenta(momenta, alpha.dim)
    if p.ndim < 2 or p.shape[-2] < 2:
        raise ValueError("A vertex needs at least two momenta")
    partial = np.cumsum(p, axis=-2)
    return np.sum(alpha.evaluate(partial[..., 1:, :], partial[..., :-1, :]), axis=-1)


def vertex_factor(alpha: Generator, momenta: Any) -> LogAmplitude:
    return LogAmplitude.from_log(complex(vertex_exponent(alpha, momenta)))


def harmonic_vertex_factor(alpha: Generator, momenta: Any) -> LogAmplitude:
    """``exp(sum_i 1/2 omega(P_i, p_{i+1}))``; the vertex of the harmonic representative."""
    p = as_momenta(momenta, alpha.dim)
    if p.shape[-2] < 2:
        raise ValueError("A vertex needs at least two momenta")
    partial = np.cumsum(p, axis=-2)
    w = omega(alpha)
    exponent = 0.5 * np.sum(w.evaluate(partial[..., :-1, :], p[..., 1:, :]), axis=-1)
    return LogAmplitude.from_log(complex(exponent))


def propagator_factor(alpha: Generator, p: Any) -> complex:
    """``exp(-alpha(0, p))``."""
    q = as_momenta(p, alpha.dim).reshape(alpha.dim)
    return complex(guarded_exp(-alpha.evaluate(np.zeros(alpha.dim), q)))


def external_leg_exponent(
    beta: OneCochain, externals: Any, amputated: bool = False
) -> complex:
    """
    Log of ``amplitude(alpha + d beta) / amplitude(alpha)`` for incoming
    external momenta: ``-sum beta(-p)`` with external propagators,
    ``sum beta(p)`` without.
    """
    p = as_momenta(externals, beta.dim).reshape(-1, beta.dim)
    if amputated:
        return complex(np.sum(beta.evaluate(p)))
    return complex(-np.sum(beta.evaluate(-p)))


def coboundary_factorization_check(
    beta: OneCochain,
    k: int,
    trials: int,
    seed: int = DEFAULT_SEED,
    box_radius: float = 3.0,
    tol: float = 1e-12,
) -> PredicateReport:
    """
    Telescoping of coboundary vertex exponents.

    ``sum_{i>=2} d beta(P_i, P_{i-1}) = sum_i beta(p_i) - beta(P_k)`` for
    free momenta, and ``sum_i beta(p_i)`` once they sum to zero.
    """
    if k < 2:
        raise ValueError("Vertex valence must be at least 2")
    rng = np.random.default_rng(seed)
    d_beta = CoboundaryGenerator(beta)
    free = rng.uniform(-box_radius, box_radius, size=(trials, k, beta.dim))

    lhs = vertex_exponent(d_beta, free)
    rhs = np.sum(beta.evaluate(free), axis=-1) - beta.evaluate(free.sum(axis=1))
    parts = {
        "telescoping": PredicateReport.from_residuals(
            "telescoping", scaled_residual(lhs - rhs, lhs, rhs), free, tol
        )
    }

    conserved = free.copy()
    conserved[:, -1] = -free[:, :-1].sum(axis=1)
    lhs_c = vertex_exponent(d_beta, conserved)
    rhs_c = np.sum(beta.evaluate(conserved), axis=-1)
    parts["conserved"] = PredicateReport.from_residuals(
        "conserved", scaled_residual(lhs_c - rhs_c, lhs_c, rhs_c), conserved, tol
    )
    return PredicateReport.combine("coboundary_factorization", parts)


def vertex_cyclic_residual(alpha: Generator, momenta: Any) -> float:
    """Largest change of the vertex factor under cyclic rotation of conserved momenta."""
    p = as_momenta(momenta, alpha.dim)
    if p.ndim == 2:
        p = p[None]
    base = guarded_exp(vertex_exponent(alpha, p))
    worst = 0.0
    for shift in range(1, p.shape[-2]):
        rotated = guarded_exp(vertex_exponent(alpha, np.roll(p, -shift, axis=-2)))
        worst = max(worst, float(np.max(scaled_residual(rotated - base, rotated, base))))
    return worst


# ---------------------------------------------------------------------------
# Amplitudes
# ---------------------------------------------------------------------------


def _check_loop_budget(cfg: LoopConfig, loops: int) -> int:
    terms = cfg.grid.size**loops
    if terms > cfg.max_terms:
        logger.error(f"Loop sum of {terms} terms exceeds budget {cfg.max_terms}")
        raise LoopBudgetError(
            "Loop-momentum sum exceeds the configured budget",
            terms=terms,
            max_terms=cfg.max_terms,
        )
    return terms


def graph_amplitude(
    graph: FeynmanGraph,
    alpha: Generator,
    cfg: LoopConfig,
    amputated: bool = False,
) -> LogAmplitude:
    """
    Sum over loop momenta of propagator and vertex factors.

    External propagators are included unless ``amputated``; momentum
    conservation makes the result a single number per external
    configuration.
    """
    if graph.dim != alpha.dim or cfg.grid.dim != graph.dim:
        raise DimensionMismatchError(
            "Graph, generator and loop lattice dimensions differ",
            graph=graph.dim,
            generator=alpha.dim,
            grid=cfg.grid.dim,
        )
    routing = route_momenta(graph)
    n_loops = len(routing.loop_lines)
    terms = _check_loop_budget(cfg, n_loops)
    kinetic = cfg.kinetic
    externals = graph.external_momenta()

    constant = 0j
    if not amputated and len(externals):
        zero = np.zeros_like(externals)
        constant += complex(
            np.sum(-kinetic.log_regular(externals) - alpha.evaluate(zero, externals))
        )

    lattice = cfg.grid.momenta()

    def block(start: int, stop: int) -> tuple[float, complex]:
        n = stop - start
        if n_loops:
            digits = np.unravel_index(np.arange(start, stop), (cfg.grid.size,) * n_loops)
            loop_k = np.stack([lattice[d] for d in digits], axis=1)
        else:
            loop_k = np.zeros((n, 0, graph.dim))
        k = routing.offset[None] + np.einsum("lj,bjm->blm", routing.coefficients, loop_k)
        log_terms = np.zeros(n, dtype=complex)
        if k.shape[1]:
            log_terms -= np.sum(kinetic.log_regular(k), axis=1)
            log_terms -= np.sum(alpha.evaluate(np.zeros_like(k), k), axis=1)
        for vertex_slots in routing.slots:
            momenta = np.stack(
                [
                    np.broadcast_to(externals[i], (n, graph.dim))
                    if kind == "external"
                    else sign * k[:, i]
                    for kind, i, sign in vertex_slots
                ],
                axis=1,
            )
            log_terms += vertex_exponent(alpha, momenta)
        return _log_sum(log_terms)

    partial = chunked_map(block, terms, LOOP_CHUNK_SIZE)
    total = _combine_log_sums(partial)
    if n_loops:
        total += n_loops * math.log(cfg.grid.measure)
    total += constant
    logger.debug(
        f"Graph amplitude over {terms} loop terms ({n_loops} loops): "
        f"log |A| = {total.real:.6g}"
    )
    return LogAmplitude.from_log(total)


def amplitude_log_ratio(
    graph: FeynmanGraph,
    alpha1: Generator,
    alpha2: Generator,
    cfg: LoopConfig,
    amputated: bool = False,
) -> complex:
    """``log(amplitude(alpha1) / amplitude(alpha2))``."""
    a1 = graph_amplitude(graph, alpha1, cfg, amputated)
    a2 = graph_amplitude(graph, alpha2, cfg, amputated)
    return a1.log_ratio(a2)


def nonplanar_selfenergy(alpha: Generator, p: Any, cfg: LoopConfig) -> complex:
    """
    ``sum_q exp(-alpha(0,p) + omega(p,q)) / ((p^2+m^2)^2 (q^2+m^2))`` times the
    lattice measure.
    """
    if cfg.grid.dim != alpha.dim:
        raise DimensionMismatchError(
            "Loop lattice and generator dimensions differ",
            grid=cfg.grid.dim,
            generator=alpha.dim,
        )
    _check_loop_budget(cfg, 1)
    external = as_momenta(p, alpha.dim).reshape(alpha.dim)
    kinetic = cfg.kinetic
    q = cfg.grid.momenta()
    w = omega(alpha)
    prefactor = -complex(alpha.evaluate(np.zeros(alpha.dim), external)) - 2.0 * float(
        kinetic.log_regular(external)
    )

    def block(start: int, stop: int) -> complex:
        qs = q[start:stop]
        exponent = prefactor + w.evaluate(external, qs) - kinetic.log_regular(qs)
        return complex(np.sum(guarded_exp(exponent)))

    total = sum(chunked_map(block, len(q), LOOP_CHUNK_SIZE), 0j)
    return total * cfg.grid.measure


# ---------------------------------------------------------------------------
# Standard graphs
# ---------------------------------------------------------------------------


def _vec(p: Any, dim: int) -> list[float]:
    return [float(x) for x in as_momenta(p, dim).reshape(dim)]


def tree_three_point(p1: Any, p2: Any) -> FeynmanGraph:
    """Single cubic vertex with incoming ``p1``, ``p2`` and ``-p1-p2``."""
    a = np.asarray(p1, dtype=float).reshape(-1)
    b = np.asarray(p2, dtype=float).reshape(-1)
    dim = a.size
    return FeynmanGraph(
        dim=dim,
        lines=[
            Line(id="e1", kind="external", momentum=_vec(a, dim)),
            Line(id="e2", kind="external", momentum=_vec(b, dim)),
            Line(id="e3", kind="external", momentum=_vec(-a - b, dim)),
        ],
        vertices=[Vertex(lines=["e1", "e2", "e3"])],
    )


def tree_four_point(p1: Any, p2: Any, p3: Any) -> FeynmanGraph:
    """Single quartic vertex; the fourth momentum closes conservation."""
    ps = [np.asarray(x, dtype=float).reshape(-1) for x in (p1, p2, p3)]
    dim = ps[0].size
    ps.append(-sum(ps))
    return FeynmanGraph(
        dim=dim,
        lines=[
            Line(id=f"e{i + 1}", kind="external", momentum=_vec(p, dim))
            for i, p in enumerate(ps)
        ],
        vertices=[Vertex(lines=["e1", "e2", "e3", "e4"])],
    )


def one_loop_two_point(p: Any) -> FeynmanGraph:
    """Quartic tadpole in the non-planar ordering ``(p, k, -p, -k)``."""
    a = np.asarray(p, dtype=float).reshape(-1)
    dim = a.size
    return FeynmanGraph(
        dim=dim,
        lines=[
            Line(id="e1", kind="external", momentum=_vec(a, dim)),
            Line(id="e2", kind="external", momentum=_vec(-a, dim)),
            Line(id="k", kind="internal"),
        ],
        vertices=[Vertex(lines=["e1", "k", "e2", "k"])],
    )


def one_loop_four_point(p1: Any, p2: Any, p3: Any) -> FeynmanGraph:
    """Two quartic vertices joined by two internal lines (s-channel bubble)."""
    ps = [np.asarray(x, dtype=float).reshape(-1) for x in (p1, p2, p3)]
    dim = ps[0].size
    ps.append(-sum(ps))
    return FeynmanGraph(
        dim=dim,
        lines=[
            *(
                Line(id=f"e{i + 1}", kind="external", momentum=_vec(p, dim))
                for i, p in enumerate(ps)
            ),
            Line(id="k1", kind="internal"),
            Line(id="k2", kind="internal"),
        ],
        vertices=[
            Vertex(lines=["e1", "e2", "k1", "k2"]),
            Vertex(lines=["k1", "k2", "e3", "e4"]),
        ],
    )


STANDARD_GRAPHS = {
    "tree_three_point": tree_three_point,
    "tree_four_point": tree_four_point,
    "one_loop_two_point": one_loop_two_point,
    "one_loop_four_point": one_loop_four_point,
}


def amplitude_matches_leg_exponent(
    graph: FeynmanGraph,
    alpha: Generator,
    beta: OneCochain,
    cfg: LoopConfig,
    tol: Optional[float] = None,
) -> PredicateReport:
    """Compare ``log(A(alpha + d beta) / A(alpha))`` with the closed-form leg exponent."""
    shifted = alpha + CoboundaryGenerator(beta)
    measured = amplitude_log_ratio(graph, shifted, alpha, cfg)
    expected = external_leg_exponent(beta, graph.external_momenta())
    diff = measured - expected
    diff = complex(diff.real, math.remainder(diff.imag, 2.0 * math.pi))
    residual = scaled_residual(np.asarray(diff), np.asarray(expected))
    return PredicateReport.from_residuals(
        "leg_exponent",
        np.atleast_1d(residual),
        graph.external_momenta()[None],
        _tolerance(tol if tol is not None else 1e-8),
    )
