"""Tests for cochains, generators and sampled predicates."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from tistar.core.cochains import (
    FunctionGenerator,
    FunctionOneCochain,
    LinearOneCochain,
    PolynomialOneCochain,
    PredicateReport,
    QuadraticOneCochain,
    SampleSet,
    TabulatedOneCochain,
    as_momenta,
    check_cocycle_identities,
    coboundary1,
    coboundary2,
    cochain_membership,
    conjugate_generator,
    guarded_exp,
    is_cocycle,
    is_commutative,
    is_involutive,
    is_unital,
    scaled_residual,
    zero_slice,
)
from tistar.core.errors import (
    DimensionMismatchError,
    EmptySampleError,
    NumericalOverflowError,
    OffLatticeError,
    UnitalityError,
    UnsupportedLevelError,
    SpecParseError,
    ValidationFailure,
)
from tistar.core.generators import (
    generator_to_spec,
    make_coboundary,
    make_moyal,
    make_quadratic,
    make_sum,
    make_wick_voros,
    make_zero,
    parse_generator,
)
from tistar.core.lattice import GridSpec

THETA_A = [[0.0, 0.3], [-0.3, 0.0]]
THETA_S = [[0.02, 0.01], [0.01, 0.03]]

momentum = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


def _broken_generator() -> FunctionGenerator:
    return FunctionGenerator(
        lambda p, q: 0.05j * q[..., 0] ** 2 * (p[..., 0] - q[..., 0]), 2, kind="broken"
    )


class TestHelpers:
    """Test array helpers."""

    def test_as_momenta(self):
        """Test momentum coercion."""
        assert as_momenta(1.5, 1).shape == (1,)
        assert as_momenta([1.0, 2.0, 3.0], 1).shape == (3, 1)
        assert as_momenta([[1.0, 2.0]], 2).shape == (1, 2)

        with pytest.raises(DimensionMismatchError):
            as_momenta([1.0, 2.0, 3.0], 2)

    def test_scaled_residual(self):
        """Test residual scaling by the largest term."""
        out = scaled_residual(np.array([2.0]), np.array([1.0]), np.array([-3.0]))
        assert out[0] == pytest.approx(0.5)

        out = scaled_residual(np.array([1.0]))
        assert out[0] == pytest.approx(1.0)

        out = scaled_residual(np.array([np.nan]), np.array([1.0]))
        assert np.isinf(out[0])

    def test_guarded_exp(self):
        """Test the exponent overflow guard."""
        assert complex(guarded_exp(1j * np.pi)) == pytest.approx(-1.0)
        assert complex(guarded_exp(-699.0)) == pytest.approx(np.exp(-699.0))

        with pytest.raises(NumericalOverflowError):
            guarded_exp([0.0, 800.0])


class TestOneCochains:
    """Test one-cochain construction and evaluation."""

    def test_polynomial_evaluation(self):
        """Test polynomial one-cochain values."""
        beta = PolynomialOneCochain({(2, 0): 1.0, (0, 1): 2j}, 2)
        assert beta([3.0, 1.0]) == pytest.approx(9.0 + 2j)
        assert beta([0.0, 0.0]) == 0
        assert beta.max_degree == 2

    def test_polynomial_rejects_constant(self):
        """Test a constant term violates vanishing at the origin."""
        with pytest.raises(UnitalityError):
            PolynomialOneCochain({(0, 0): 1.0}, 2)

        with pytest.raises(DimensionMismatchError):
            PolynomialOneCochain({(1,): 1.0}, 2)

        with pytest.raises(ValueError):
            PolynomialOneCochain({(-1, 2): 1.0}, 2)

    def test_function_cochain_checked_at_origin(self):
        """Test callables must vanish at the origin."""
        with pytest.raises(UnitalityError):
            FunctionOneCochain(lambda p: 1.0 + 0.0 * p[..., 0], 1)

        beta = FunctionOneCochain(lambda p: np.sin(p[..., 0]), 1)
        assert beta(np.pi / 2) == pytest.approx(1.0)

    def test_quadratic_form(self):
        """Test quadratic-form one-cochain."""
        beta = QuadraticOneCochain([[1.0, 0.0], [0.0, 2.0]])
        assert beta([1.0, 1.0]) == pytest.approx(3.0)
        assert beta.dim == 2

    def test_linear_combinations(self):
        """Test arithmetic on one-cochains."""
        b1 = PolynomialOneCochain({(1,): 1.0}, 1)
        b2 = PolynomialOneCochain({(2,): 1.0}, 1)
        combo = 2 * b1 - b2
        assert combo(3.0) == pytest.approx(6.0 - 9.0)
        assert (-b1)(2.0) == pytest.approx(-2.0)
        assert b1.reflected()(2.0) == pytest.approx(-2.0)

        with pytest.raises(DimensionMismatchError):
            LinearOneCochain([(1.0, b1), (1.0, QuadraticOneCochain(np.eye(2)))])

    def test_tabulated(self):
        """Test lattice-tabulated one-cochains."""
        grid = GridSpec(dim=1, points=5, step=0.5)
        beta = TabulatedOneCochain(grid, [4.0, 1.0, 0.0, 1.0, 4.0])
        assert beta(1.0) == pytest.approx(4.0)
        assert beta(-0.5) == pytest.approx(1.0)

        with pytest.raises(OffLatticeError):
            beta(0.25)

        with pytest.raises(OffLatticeError):
            beta(1.5)

        with pytest.raises(UnitalityError):
            TabulatedOneCochain(grid, [0.0, 0.0, 1.0, 0.0, 0.0])


class TestGenerators:
    """Test generator construction and coboundaries."""

    def test_unitality_enforced(self):
        """Test callables violating alpha(p, p) = 0 are rejected."""
        with pytest.raises(UnitalityError):
            FunctionGenerator(lambda p, q: q[..., 0], 1)

    def test_quadratic_values(self):
        """Test the quadratic family formula."""
        alpha = make_wick_voros(THETA_A, THETA_S)
        p = np.array([1.0, 2.0])
        q = np.array([0.5, -1.0])
        expected = 1j * q @ np.asarray(THETA_A) @ p + q @ np.asarray(THETA_S) @ (p - q)
        assert alpha(p, q) == pytest.approx(expected)
        assert alpha(p, np.zeros(2)) == 0
        assert abs(alpha(p, p)) < 1e-15

    def test_arithmetic(self):
        """Test sums and scalar multiples of generators."""
        moyal = make_moyal(THETA_A)
        p, q = [1.0, 2.0], [0.3, -0.7]
        assert (moyal + moyal)(p, q) == pytest.approx(2 * moyal(p, q))
        assert (moyal - moyal)(p, q) == 0
        assert (0.5 * moyal)(p, q) == pytest.approx(0.5 * moyal(p, q))

    def test_coboundary_of_quadratic_form(self):
        """Test d(-1/2 p^T S p) is the symmetric part of Wick-Voros."""
        s = np.asarray(THETA_S)
        d_beta = coboundary1(QuadraticOneCochain(-0.5 * s))
        samples = SampleSet.random(2, 50)
        p, q = samples.column(0), samples.column(1)
        expected = np.einsum("ni,ij,nj->n", q, s, p - q)
        assert np.allclose(d_beta.evaluate(p, q), expected, atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(momentum, min_size=6, max_size=6))
    def test_coboundary_squared_vanishes(self, coords):
        """Test d(d beta) = 0 for a dense random polynomial."""
        rng = np.random.default_rng(11)
        beta = PolynomialOneCochain.random(2, 3, rng)
        p0, p1, p2 = np.asarray(coords).reshape(3, 2)
        value = coboundary2(coboundary1(beta))(p0, p1, p2)
        assert abs(value) < 1e-9

    def test_zero_slice(self):
        """Test alpha_0(p) = alpha(0, p)."""
        alpha = make_wick_voros(THETA_A, THETA_S)
        p = np.array([1.0, -2.0])
        assert zero_slice(alpha)(p) == pytest.approx(-p @ np.asarray(THETA_S) @ p)

    def test_conjugate_generator(self):
        """Test the conjugate Moyal generator is its negative."""
        moyal = make_moyal(THETA_A)
        conj = conjugate_generator(moyal)
        p, q = [1.0, 2.0], [-0.4, 0.9]
        assert conj(p, q) == pytest.approx(-moyal(p, q))


class TestGeneratorSpecs:
    """Test building generators from specs and serializing them back."""

    def test_make_coboundary(self):
        """Test d beta(p, q) = beta(q) - beta(p) + beta(p - q)."""
        beta = PolynomialOneCochain({(2,): 0.5}, 1)
        d_beta = make_coboundary(beta)
        assert d_beta([3.0], [1.0]) == pytest.approx(0.5 - 4.5 + 2.0)

    def test_parse_moyal_mapping(self):
        """Test a mapping spec parses into the Moyal generator."""
        alpha = parse_generator({"kind": "moyal", "dim": 2, "theta_A": THETA_A})
        p, q = [1.0, 2.0], [0.5, -1.0]
        assert alpha(p, q) == pytest.approx(make_moyal(THETA_A)(p, q))

    def test_parse_sum(self):
        """Test a sum spec adds its terms."""
        spec = {
            "kind": "sum",
            "dim": 2,
            "terms": [
                {"kind": "moyal", "dim": 2, "theta_A": THETA_A},
                {"kind": "coboundary", "dim": 2, "beta": [[[2, 0], 0.1, 0.0]]},
            ],
        }
        alpha = parse_generator(spec)
        expected = make_sum(
            make_moyal(THETA_A), make_coboundary(PolynomialOneCochain({(2, 0): 0.1}, 2))
        )
        p, q = [1.0, 2.0], [0.5, -1.0]
        assert alpha(p, q) == pytest.approx(expected(p, q))

    @pytest.mark.parametrize(
        "spec",
        [
            {"kind": "moyal", "dim": 2, "theta_A": [[0.0, 0.3], [0.3, 0.0]]},
            {"kind": "wick_voros", "dim": 2, "theta_A": THETA_A},
            {"kind": "moyal", "dim": 3, "theta_A": THETA_A},
            "moyal",
        ],
    )
    def test_parse_rejects(self, spec):
        """Test malformed specs raise SpecParseError."""
        with pytest.raises(SpecParseError):
            parse_generator(spec)

    def test_to_spec_quadratic(self):
        """Test Wick-Voros serializes with both matrices."""
        spec = generator_to_spec(make_wick_voros(THETA_A, THETA_S))
        assert spec.kind == "wick_voros"
        assert spec.theta_A == THETA_A
        assert spec.theta_S == THETA_S
        assert generator_to_spec(make_zero(2)).theta_A is None

    def test_to_spec_coboundary_of_quadratic_form(self):
        """Test a quadratic-form coboundary serializes as polynomial terms."""
        d_beta = make_coboundary(QuadraticOneCochain(-0.5 * np.asarray(THETA_S)))
        spec = generator_to_spec(d_beta)
        assert spec.kind == "coboundary"
        rebuilt = parse_generator(spec)
        p, q = [1.0, 2.0], [0.5, -1.0]
        assert rebuilt(p, q) == pytest.approx(d_beta(p, q))

    def test_to_spec_rejects_callables(self):
        """Test generators without a spec form are refused."""
        with pytest.raises(SpecParseError):
            generator_to_spec(_broken_generator())


class TestSampleSet:
    """Test seeded momentum samples."""

    def test_random_is_seeded(self):
        """Test identical seeds give identical samples."""
        a = SampleSet.random(2, 10, arity=3, seed=5)
        b = SampleSet.random(2, 10, arity=3, seed=5)
        c = SampleSet.random(2, 10, arity=3, seed=6)
        assert np.array_equal(a.points, b.points)
        assert not np.array_equal(a.points, c.points)
        assert a.points.shape == (10, 3, 2)
        assert np.max(np.abs(a.points)) <= 3.0

    def test_points_are_read_only(self):
        """Test sample arrays cannot be mutated."""
        samples = SampleSet.random(1, 4)
        with pytest.raises(ValueError):
            samples.points[0, 0, 0] = 1.0

    def test_lattice(self):
        """Test lattice samples are multiples of the step."""
        samples = SampleSet.lattice(2, 40, radius=2, step=0.5)
        scaled = samples.points / 0.5
        assert np.allclose(scaled, np.rint(scaled))
        assert np.max(np.abs(samples.points)) <= 1.0
        assert samples.kind == "lattice"

    def test_from_points(self):
        """Test explicit points get a box radius from their extent."""
        samples = SampleSet.from_points([[1.0, -2.0], [0.5, 0.5]], 2)
        assert samples.arity == 1
        assert samples.dim == 2
        assert samples.box_radius == 2.0
        assert samples.seed is None

    def test_require(self):
        """Test sample shape checks."""
        with pytest.raises(EmptySampleError):
            SampleSet.random(2, 0).require(2, 2)

        with pytest.raises(DimensionMismatchError):
            SampleSet.random(2, 5).require(3, 2)

        with pytest.raises(ValidationFailure):
            SampleSet.random(2, 5, arity=2).require(2, 3)

        with pytest.raises(ValidationFailure):
            SampleSet.random(2, 5, arity=2).column(2)


class TestPredicateReport:
    """Test predicate report reduction."""

    def test_worst_point_ties_resolve_low(self):
        """Test the first maximal residual is reported."""
        points = np.arange(6, dtype=float).reshape(3, 1, 2)
        report = PredicateReport.from_residuals("demo", [0.5, 0.5, 0.1], points, 1.0)
        assert report.max_residual == 0.5
        assert report.worst_point == [[0.0, 1.0]]
        assert report.passed is True
        assert report.samples == 3

    def test_nan_fails(self):
        """Test NaN residuals count as infinite."""
        points = np.zeros((2, 1, 1))
        report = PredicateReport.from_residuals("demo", [0.0, np.nan], points, 1e-9)
        assert report.passed is False
        assert report.max_residual == float("inf")

    def test_empty_raises(self):
        """Test empty residuals raise."""
        with pytest.raises(EmptySampleError):
            PredicateReport.from_residuals("demo", [], np.zeros((0, 1, 1)), 1e-9)

    def test_combine(self):
        """Test combined reports pass only when every part passes."""
        points = np.zeros((1, 1, 1))
        good = PredicateReport.from_residuals("good", [1e-12], points, 1e-9)
        bad = PredicateReport.from_residuals("bad", [1e-3], points, 1e-9)
        combined = PredicateReport.combine("both", {"good": good, "bad": bad})
        assert combined.passed is False
        assert combined.max_residual == 1e-3
        assert combined.samples == 2
        assert set(combined.parts) == {"good", "bad"}

    def test_to_dict_uses_pass_key(self):
        """Test serialized reports use the 'pass' key."""
        report = PredicateReport.from_residuals("demo", [0.0], np.zeros((1, 1, 1)), 1e-9)
        data = report.to_dict()
        assert data["pass"] is True
        assert "passed" not in data


class TestPredicates:
    """Test sampled structural predicates."""

    def setup_method(self):
        """Set up samples."""
        self.pairs = SampleSet.random(2, 500, arity=2)
        self.triples = SampleSet.random(2, 200, arity=3)

    def test_cocycle(self):
        """Test the cyclic condition on known cocycles and a broken generator."""
        for alpha in (
            make_moyal(THETA_A),
            make_wick_voros(THETA_A, THETA_S),
            coboundary1(PolynomialOneCochain.random(2, 3, np.random.default_rng(3))),
        ):
            assert is_cocycle(alpha, self.triples).passed

        report = is_cocycle(_broken_generator(), self.triples)
        assert report.passed is False
        assert report.max_residual > 1e-6

    def test_unital(self):
        """Test unitality of the quadratic family."""
        assert is_unital(make_wick_voros(THETA_A, THETA_S), self.pairs).passed

    def test_commutative(self):
        """Test only symmetric generators give commutative products."""
        assert is_commutative(make_zero(2), self.pairs).passed
        assert is_commutative(make_quadratic(np.zeros((2, 2)), THETA_S), self.pairs).passed
        assert not is_commutative(make_moyal(THETA_A), self.pairs).passed

    def test_involutive(self):
        """Test involution holds for real-form generators and fails for an imaginary coboundary."""
        assert is_involutive(make_moyal(THETA_A), self.pairs).passed
        assert is_involutive(make_wick_voros(THETA_A, THETA_S), self.pairs).passed

        imaginary = coboundary1(PolynomialOneCochain({(2, 0): 1j}, 2))
        assert not is_involutive(imaginary, self.pairs).passed

    def test_membership(self):
        """Test cochain membership and the starred condition."""
        even = PolynomialOneCochain({(2, 0): 1.0, (0, 2): 0.5}, 2)
        assert cochain_membership(even, 1, self.pairs).passed
        assert cochain_membership(even, 1, self.pairs, starred=True).passed

        imaginary = PolynomialOneCochain({(2, 0): 1j}, 2)
        report = cochain_membership(imaginary, 1, self.pairs, starred=True)
        assert report.passed is False
        assert report.parts["vanishing"].passed
        assert not report.parts["starred"].passed

        moyal = make_moyal(THETA_A)
        assert cochain_membership(moyal, 2, self.pairs, starred=True).passed

        shifted = lambda p, q: 1.0 + 0.0 * p[..., 0]  # noqa: E731
        assert not cochain_membership(shifted, 2, self.pairs).passed

        with pytest.raises(UnsupportedLevelError):
            cochain_membership(moyal, 3, self.triples)

    def test_cocycle_identities(self):
        """Test consequences of the cyclic condition."""
        report = check_cocycle_identities(make_wick_voros(THETA_A, THETA_S), self.pairs)
        assert report.passed
        assert set(report.parts) == {
            "even_zero_slice",
            "swap",
            "zero_slice_relation",
            "reconstruction",
        }

        assert not check_cocycle_identities(_broken_generator(), self.pairs).passed

    def test_tolerance_must_be_positive(self):
        """Test nonsense tolerances are refused."""
        with pytest.raises(ValueError):
            is_unital(make_zero(2), self.pairs, tol=-1.0)
