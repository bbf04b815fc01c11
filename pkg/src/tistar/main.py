#!/usr/bin/env python3
"""
Main CLI entry point for tistar.

This module provides the Click-based command-line interface: predicate
checks on generator specs, Hodge decomposition, the lattice star engine,
equivalence witnesses, loop amplitude scans, the acceptance suite, and
configuration management.
"""

import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, NoReturn, Optional

import click
import numpy as np
import yaml
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from . import __version__
from .core.cochains import (
    Generator,
    PredicateReport,
    SampleSet,
    check_cocycle_identities,
    cochain_membership,
    is_cocycle,
    is_commutative,
    is_involutive,
    is_unital,
    scaled_residual,
)
from .core.config import Config, ConfigManager, get_config, reload_config
from .core.equivalence import (
    decide_equivalence,
    intertwining_residual,
    mode_commutator_criterion,
    quantum_identities,
)
from .core.errors import DimensionMismatchError, SpecParseError, TistarError
from .core.generators import make_zero
from .core.hodge import (
    check_harmonic_relations,
    check_omega_properties,
    commutator_matrix,
    decompose,
    is_harmonic,
    omega,
)
from .core.lattice import GridSpec
from .core.qft import LoopConfig, graph_amplitude, nonplanar_selfenergy
from .core.reports import RunReport, write_csv
from .core.star import (
    BandlimitedField,
    associativity_residual,
    integrate,
    star,
    trace_cyclicity,
)
from .core.suite import GROUPS, AcceptanceSuite, GroupResult
from .loaders import get_field_loader
from .loaders.specs import SpecLoader
from .utils.logging import (
    get_logger,
    log_error_with_context,
    log_performance,
    setup_logging,
    timed,
)
from .utils.parallel import configure_workers
from .utils.validation import (
    is_safe_prefix,
    parse_grid_option,
    validate_file_path,
    validate_threads,
    validate_tolerance,
)

console = Console()
logger = get_logger(__name__)


@click.group(invoke_without_command=True)
@click.option("--version", is_flag=True, help="Show version and exit")
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose output")
@click.pass_context
def cli(ctx: click.Context, version: bool, verbose: bool) -> None:
    """
    tistar - translation-invariant star products and their cohomology.

    Check generators, split them into harmonic and exact parts, multiply
    band-limited fields, decide equivalence of products and compare
    non-commutative loop amplitudes.
    """
    if version:
        console.print(f"tistar v{__version__}")
        sys.exit(0)

    if ctx.invoked_subcommand is None:
        console.print(
            Panel.fit(
                Text.from_markup(
                    f"[bold blue]tistar v{__version__}[/bold blue]\n"
                    "[dim]Translation-invariant star products at desk scale[/dim]\n\n"
                    "Quick start:\n"
                    "  [bold]tistar check --spec moyal.yaml[/bold]             Predicates\n"
                    "  [bold]tistar hodge --spec wv.yaml[/bold]                Harmonic part\n"
                    "  [bold]tistar equiv --spec a.yaml --spec2 b.yaml[/bold]  Equivalence\n"
                    "  [bold]tistar demo[/bold]                                Acceptance suite\n\n"
                    "Use [bold]--help[/bold] with any command for more information."
                ),
                title="⭐ Welcome to tistar",
                border_style="blue",
            )
        )
        return

    if ctx.invoked_subcommand == "config":
        setup_logging(verbose)
        return

    try:
        config = get_config()
    except Exception as e:
        console.print(f"[red]Configuration error: {escape(str(e))}[/red]")
        console.print("Run [bold]tistar config reset[/bold] to restore defaults")
        sys.exit(1)

    setup_logging(
        verbose,
        log_file=config.logging.file,
        level=config.logging.level,
        fmt=config.logging.format,
        backup_count=config.logging.backup_count,
    )


# ---------------------------------------------------------------------------
# Shared plumbing
# ---------------------------------------------------------------------------


@dataclass
class RunSettings:
    """Per-run values after CLI flags override the config file."""

    config: Config
    seed: int
    tol: Optional[float]
    started: float

    def tolerance(self, default: float) -> float:
        return self.tol if self.tol is not None else default

    def pairs(self, dim: int) -> SampleSet:
        s = self.config.sampling
        return SampleSet.random(dim, s.pairs, 2, self.seed, s.box_radius)

    def triples(self, dim: int) -> SampleSet:
        s = self.config.sampling
        return SampleSet.random(dim, s.triples, 3, self.seed, s.box_radius)


def run_options(f: Callable[..., Any]) -> Callable[..., Any]:
    """Flags shared by every computing command."""
    f = click.option("--timing", is_flag=True, help="Include wall-clock timing in the report")(f)
    f = click.option(
        "--out",
        "out_path",
        type=click.Path(dir_okay=False, path_type=Path),
        help="Write the JSON report to this file",
    )(f)
    f = click.option("--threads", type=int, help="Cap on worker threads")(f)
    f = click.option("--tol", type=float, help="Override the residual tolerance")(f)
    f = click.option("--seed", type=int, help="Sampling seed (default from config)")(f)
    return f


def _settings(seed: Optional[int], tol: Optional[float], threads: Optional[int]) -> RunSettings:
    config = get_config()
    if tol is not None:
        ok, error = validate_tolerance(tol)
        if not ok:
            raise SpecParseError(error, tol=tol)
    n_threads = threads if threads is not None else config.execution.threads
    ok, error = validate_threads(n_threads)
    if not ok:
        raise SpecParseError(error, threads=n_threads)
    configure_workers(n_threads)
    if seed is not None and seed < 0:
        raise SpecParseError("Seed must be non-negative", seed=seed)
    return RunSettings(
        config=config,
        seed=seed if seed is not None else config.sampling.seed,
        tol=tol,
        started=time.perf_counter(),
    )


def _resolve_grid(option: Optional[str], dim: int, points: int, step: float) -> GridSpec:
    ok, parsed, error = parse_grid_option(option)
    if not ok:
        raise SpecParseError(error, grid=option)
    if parsed is None:
        return GridSpec(dim=dim, points=points, step=step)
    grid = GridSpec(dim=parsed[0], points=parsed[1], step=parsed[2])
    if grid.dim != dim:
        raise DimensionMismatchError(
            "Grid dimension differs from the generator", grid=grid.dim, generator=dim
        )
    return grid


def _load_generator(report: RunReport, name: str, path: Path) -> Generator:
    alpha = SpecLoader().load_generator(path)
    report.add_input(name, path)
    logger.info(f"Loaded {alpha.kind} generator (dim {alpha.dim}) from {path}")
    return alpha


def _new_report(command: str, settings: RunSettings) -> RunReport:
    return RunReport(command=command, version=__version__, seed=settings.seed)


def _predicate_table(title: str, reports: dict[str, PredicateReport], notes: dict[str, str]) -> Table:
    table = Table(title=title)
    table.add_column("Check", style="cyan", no_wrap=True)
    table.add_column("Max residual", style="magenta", justify="right")
    table.add_column("Tolerance", justify="right")
    table.add_column("Result")
    for name, report in reports.items():
        if report.passed:
            verdict = "[green]pass[/green]"
        elif name in notes:
            verdict = f"[yellow]{notes[name]}[/yellow]"
        else:
            verdict = "[red]fail[/red]"
        table.add_row(name, f"{report.max_residual:.3e}", f"{report.tolerance:.1e}", verdict)
    return table


def _finish(report: RunReport, settings: RunSettings, out_path: Optional[Path], timing: bool) -> NoReturn:
    elapsed = time.perf_counter() - settings.started
    log_performance(report.command, elapsed, seed=settings.seed)
    if timing:
        report.timing = {"total_seconds": elapsed}
    if out_path is not None:
        report.write(out_path)
        console.print(f"📄 Report written to [bold]{escape(str(out_path))}[/bold]")
    if report.passed:
        console.print(f"✅ [bold green]{report.command} passed[/bold green]")
        sys.exit(0)
    console.print(f"❌ [bold red]{report.command} reported failing checks[/bold red]")
    sys.exit(1)


def _abort(action: str, error: Exception) -> NoReturn:
    if isinstance(error, TistarError):
        logger.debug(f"{action} failed: {error}")
        console.print(f"❌ [red]{action} failed: {escape(str(error))}[/red]")
        sys.exit(error.exit_code)
    log_error_with_context(logger, error, {"action": action})
    console.print(f"❌ [red]{action} failed: {escape(str(error))}[/red]")
    sys.exit(1)


def _csv_path(prefix: str, name: str) -> Path:
    if not is_safe_prefix(prefix):
        raise SpecParseError("Unsafe CSV prefix", prefix=prefix)
    return Path(f"{prefix}_{name}.csv")


def _format_residual(value: Any) -> str:
    return value if isinstance(value, str) else f"{value:.3e}"


def _momentum_columns(prefix: str, dim: int) -> list[str]:
    return [f"{prefix}{mu}" for mu in range(dim)]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


@cli.command()
@click.option("--spec", "spec_path", required=True, type=click.Path(path_type=Path), help="Generator spec file")
@run_options
def check(
    spec_path: Path,
    seed: Optional[int],
    tol: Optional[float],
    threads: Optional[int],
    out_path: Optional[Path],
    timing: bool,
) -> None:
    """Run the structural predicates on a generator spec."""
    try:
        settings = _settings(seed, tol, threads)
        report = _new_report("check", settings)
        alpha = _load_generator(report, "spec", spec_path)
        predicate_tol = settings.tolerance(settings.config.tolerances.predicate)
        report.parameters = {"tolerance": predicate_tol, "kind": alpha.kind, "dim": alpha.dim}

        pairs = settings.pairs(alpha.dim)
        triples = settings.triples(alpha.dim)
        with console.status("[bold blue]Sampling predicates..."):
            reports = {
                "cocycle": is_cocycle(alpha, triples, predicate_tol),
                "unital": is_unital(alpha, pairs, predicate_tol),
                "commutative": is_commutative(alpha, pairs, predicate_tol),
                "involutive": is_involutive(alpha, pairs, predicate_tol),
                "cocycle_identities": check_cocycle_identities(alpha, pairs, predicate_tol),
                "starred_membership": cochain_membership(alpha, 2, pairs, predicate_tol, starred=True),
            }

        # Commutativity and involution describe the product; they do not fail the run
        informational = {"commutative", "involutive", "starred_membership"}
        for name, value in reports.items():
            report.add_result(name, value, counts=name not in informational)

        notes = {
            "commutative": "noncommutative",
            "involutive": "not involutive",
            "starred_membership": "not starred",
        }
        console.print(_predicate_table(f"Predicates for {alpha.kind} generator", reports, notes))
        _finish(report, settings, out_path, timing)

    except KeyboardInterrupt:
        console.print("\n🛑 [yellow]Operation cancelled by user[/yellow]")
        sys.exit(1)
    except Exception as e:
        _abort("Check", e)


@cli.command()
@click.option("--spec", "spec_path", required=True, type=click.Path(path_type=Path), help="Generator spec file")
@click.option("--grid", "grid_option", help="Witness lattice as m,N,dp")
@click.option("--csv", "csv_prefix", help="Write omega samples and the commutator matrix as CSV")
@run_options
def hodge(
    spec_path: Path,
    grid_option: Optional[str],
    csv_prefix: Optional[str],
    seed: Optional[int],
    tol: Optional[float],
    threads: Optional[int],
    out_path: Optional[Path],
    timing: bool,
) -> None:
    """Split a generator into its harmonic part and a coboundary."""
    try:
        settings = _settings(seed, tol, threads)
        cfg = settings.config
        report = _new_report("hodge", settings)
        alpha = _load_generator(report, "spec", spec_path)
        grid = _resolve_grid(grid_option, alpha.dim, cfg.grid.points, cfg.grid.step)
        witness_tol = settings.tolerance(cfg.tolerances.witness)
        harmonic_tol = settings.tolerance(cfg.tolerances.harmonic)
        report.parameters = {
            "grid": grid.describe(),
            "witness_tolerance": witness_tol,
            "harmonic_tolerance": harmonic_tol,
        }

        pairs = settings.pairs(alpha.dim)
        with console.status("[bold blue]Decomposing generator..."):
            decomposition = decompose(alpha, grid, settings.triples(alpha.dim), witness_tol, settings.seed)
        alpha_h = decomposition.harmonic
        report.add_result("decomposition", decomposition)

        p, q = pairs.column(0), pairs.column(1)
        a, h = alpha.evaluate(p, q), alpha_h.evaluate(p, q)
        report.add_result(
            "harmonic_equals_input",
            PredicateReport.from_residuals(
                "harmonic_equals_input", scaled_residual(a - h, a, h), pairs.points, harmonic_tol
            ),
            counts=False,
        )
        reports = {
            "laplacian": is_harmonic(alpha_h, pairs, harmonic_tol),
            "harmonic_relations": check_harmonic_relations(alpha_h, pairs, harmonic_tol),
            "omega_properties": check_omega_properties(alpha, pairs, tol=harmonic_tol),
        }
        for name, value in reports.items():
            report.add_result(name, value)

        fd = cfg.finite_difference
        theta = commutator_matrix(alpha, fd.step, fd.richardson)
        report.add_result("commutator_matrix", theta)

        console.print(
            f"🧮 Harmonic part: [bold]{alpha_h.kind}[/bold]   "
            f"witness residual {decomposition.residual:.3e} on {escape(grid.describe())}"
        )
        console.print(_predicate_table("Harmonic checks", reports, {}))

        matrix = Table(title="Space-time commutator [x^mu, x^nu]")
        matrix.add_column("mu \\ nu", style="cyan")
        for nu in range(alpha.dim):
            matrix.add_column(str(nu), justify="right")
        for mu in range(alpha.dim):
            matrix.add_row(str(mu), *(f"{z.real:+.6g}{z.imag:+.6g}i" for z in theta[mu]))
        console.print(matrix)

        if csv_prefix:
            w = omega(alpha).evaluate(p, q)
            write_csv(
                _csv_path(csv_prefix, "omega"),
                [*_momentum_columns("p", alpha.dim), *_momentum_columns("q", alpha.dim), "omega_re", "omega_im"],
                ([*pi, *qi, wi.real, wi.imag] for pi, qi, wi in zip(p, q, w)),
            )
            write_csv(
                _csv_path(csv_prefix, "commutator"),
                ["mu", "nu", "re", "im"],
                ([mu, nu, theta[mu, nu].real, theta[mu, nu].imag] for mu in range(alpha.dim) for nu in range(alpha.dim)),
            )

        _finish(report, settings, out_path, timing)

    except KeyboardInterrupt:
        console.print("\n🛑 [yellow]Operation cancelled by user[/yellow]")
        sys.exit(1)
    except Exception as e:
        _abort("Hodge decomposition", e)


def _load_field(report: RunReport, name: str, path: Path) -> BandlimitedField:
    ok, error = validate_file_path(str(path))
    if not ok:
        raise SpecParseError(error)
    loader_class = get_field_loader(path.suffix)
    if loader_class is None:
        raise SpecParseError(f"Unsupported field file type: {path.suffix or '(none)'}")
    field = loader_class().load_data(path)
    report.add_input(name, path)
    return field


@cli.command("star")
@click.option("--spec", "spec_path", required=True, type=click.Path(path_type=Path), help="Generator spec file")
@click.option("--grid", "grid_option", help="Field lattice as m,N,dp (random fields only)")
@click.option("--field", "field_path", type=click.Path(path_type=Path), help="Left factor (.tisp or .json)")
@click.option("--field2", "field2_path", type=click.Path(path_type=Path), help="Right factor (.tisp or .json)")
@click.option("--radius", type=int, help="Support radius of random factors")
@click.option("--product", "product_path", type=click.Path(dir_okay=False, path_type=Path), help="Save the product field")
@click.option("--csv", "csv_prefix", help="Write the product coefficients as CSV")
@run_options
def star_command(
    spec_path: Path,
    grid_option: Optional[str],
    field_path: Optional[Path],
    field2_path: Optional[Path],
    radius: Optional[int],
    product_path: Optional[Path],
    csv_prefix: Optional[str],
    seed: Optional[int],
    tol: Optional[float],
    threads: Optional[int],
    out_path: Optional[Path],
    timing: bool,
) -> None:
    """Multiply two band-limited fields with the star product of a generator."""
    try:
        settings = _settings(seed, tol, threads)
        cfg = settings.config
        report = _new_report("star", settings)
        alpha = _load_generator(report, "spec", spec_path)
        star_tol = settings.tolerance(cfg.tolerances.star)
        rng = np.random.default_rng(settings.seed)

        if field_path is not None:
            f = _load_field(report, "field", field_path)
            grid = f.grid
            if grid.dim != alpha.dim:
                raise DimensionMismatchError(
                    "Field dimension differs from the generator", field=grid.dim, generator=alpha.dim
                )
        else:
            grid = _resolve_grid(grid_option, alpha.dim, cfg.grid.points, cfg.grid.step)
            f = BandlimitedField.random(grid, radius or max(1, grid.half // 3), rng)
        if field2_path is not None:
            g = _load_field(report, "field2", field2_path)
        else:
            g = BandlimitedField.random(grid, radius or max(1, grid.half // 3), rng)

        report.parameters = {"grid": grid.describe(), "tolerance": star_tol}
        with console.status("[bold blue]Computing star product..."), timed(
            "star", grid=grid.describe()
        ):
            product = star(f, g, alpha, cfg.execution.chunk_size)

        integral = integrate(product)
        report.add_result("integral", integral)
        report.add_result("product_max_abs", product.max_abs())
        report.add_result("product_support_radius", product.support_radius)
        report.add_result("trace_cyclicity", trace_cyclicity([f, g], alpha, star_tol))

        spare = grid.half - f.support_radius - g.support_radius
        if spare >= 1:
            h = BandlimitedField.random(grid, spare, rng)
            residual = associativity_residual(f, g, h, alpha)
            report.add_result(
                "associativity",
                PredicateReport.from_residuals(
                    "associativity", [residual], np.zeros((1, 1, grid.dim)), star_tol
                ),
            )
        else:
            logger.info("No lattice room left for an associativity probe")

        summary = Table(title=f"Star product on {grid.describe()}")
        summary.add_column("Quantity", style="cyan")
        summary.add_column("Value", style="green", justify="right")
        summary.add_row("Support radius", str(product.support_radius))
        summary.add_row("max |coefficient|", f"{product.max_abs():.6g}")
        summary.add_row("Integral", f"{integral.real:+.6g}{integral.imag:+.6g}i")
        for name in ("trace_cyclicity", "associativity"):
            if name in report.results:
                summary.add_row(name, _format_residual(report.results[name]["max_residual"]))
        console.print(summary)

        if product_path is not None:
            loader_class = get_field_loader(product_path.suffix)
            if loader_class is None:
                raise SpecParseError(f"Unsupported field file type: {product_path.suffix or '(none)'}")
            loader_class().save(product, product_path)
            console.print(f"💾 Product saved to [bold]{escape(str(product_path))}[/bold]")

        if csv_prefix:
            support = product.support_momenta()
            write_csv(
                _csv_path(csv_prefix, "product"),
                [*_momentum_columns("k", grid.dim), "re", "im"],
                ([*k, product.coefficient(k).real, product.coefficient(k).imag] for k in support),
            )

        _finish(report, settings, out_path, timing)

    except KeyboardInterrupt:
        console.print("\n🛑 [yellow]Operation cancelled by user[/yellow]")
        sys.exit(1)
    except Exception as e:
        _abort("Star product", e)


@cli.command()
@click.option("--spec", "spec_path", required=True, type=click.Path(path_type=Path), help="First generator spec")
@click.option("--spec2", "spec2_path", required=True, type=click.Path(path_type=Path), help="Second generator spec")
@click.option("--grid", "grid_option", help="Witness lattice as m,N,dp")
@click.option("--csv", "csv_prefix", help="Write the witness table as CSV")
@run_options
def equiv(
    spec_path: Path,
    spec2_path: Path,
    grid_option: Optional[str],
    csv_prefix: Optional[str],
    seed: Optional[int],
    tol: Optional[float],
    threads: Optional[int],
    out_path: Optional[Path],
    timing: bool,
) -> None:
    """Decide whether two generators give isomorphic products.

    Exits 0 when they are equivalent and every witness check holds.
    """
    try:
        settings = _settings(seed, tol, threads)
        cfg = settings.config
        report = _new_report("equiv", settings)
        alpha1 = _load_generator(report, "spec", spec_path)
        alpha2 = _load_generator(report, "spec2", spec2_path)
        if alpha1.dim != alpha2.dim:
            raise DimensionMismatchError(
                "Generators have different dimensions", first=alpha1.dim, second=alpha2.dim
            )
        grid = _resolve_grid(grid_option, alpha1.dim, cfg.grid.points, cfg.grid.step)
        eq_tol = settings.tolerance(cfg.tolerances.equivalence)
        report.parameters = {"grid": grid.describe(), "tolerance": eq_tol}

        pairs = settings.pairs(alpha1.dim)
        with console.status("[bold blue]Comparing harmonic parts..."):
            verdict = decide_equivalence(alpha1, alpha2, pairs, grid, eq_tol)
            criterion = mode_commutator_criterion(alpha1, alpha2, pairs, eq_tol)
        report.add_result("verdict", verdict)
        report.add_result("mode_commutator_criterion", criterion, counts=False)
        report.add_result("criterion_agrees", criterion.passed == verdict.equivalent)
        if criterion.passed != verdict.equivalent:
            logger.warning("Mode-commutator criterion disagrees with the harmonic decision")
            report.fail()

        if verdict.equivalent and verdict.witness is not None:
            witness = verdict.witness
            lattice = SampleSet.lattice(
                alpha1.dim, cfg.sampling.pairs, 2, settings.seed, max(1, grid.half // 2), grid.step
            )
            identity_tol = settings.tolerance(cfg.tolerances.identity)
            report.add_result(
                "quantum_identities", quantum_identities(alpha1, alpha2, witness, lattice, identity_tol)
            )

            rng = np.random.default_rng(settings.seed)
            factor_radius = max(1, grid.half // 2)
            f = BandlimitedField.random(grid, factor_radius, rng)
            g = BandlimitedField.random(grid, grid.half - factor_radius, rng)
            residual = intertwining_residual(witness, alpha2, alpha1, f, g)
            report.add_result(
                "intertwining",
                PredicateReport.from_residuals(
                    "intertwining",
                    [residual],
                    np.zeros((1, 1, grid.dim)),
                    settings.tolerance(cfg.tolerances.star),
                ),
            )
        else:
            report.fail()

        status = "[green]equivalent[/green]" if verdict.equivalent else "[red]not equivalent[/red]"
        console.print(f"⚖️  Verdict: {status}   harmonic gap {verdict.harmonic_gap:.3e}")
        evidence = Table(title="Evidence")
        evidence.add_column("Quantity", style="cyan")
        evidence.add_column("Value", style="magenta", justify="right")
        for name, value in sorted(verdict.evidence.items()):
            evidence.add_row(name, f"{value:.3e}")
        for name in ("quantum_identities", "intertwining"):
            if name in report.results:
                evidence.add_row(name, _format_residual(report.results[name]["max_residual"]))
        console.print(evidence)

        if verdict.witness is not None:
            momenta = grid.integer_momenta()
            values = verdict.witness.evaluate(momenta * grid.step)
            preview = Table(title="Witness beta (first lattice points)")
            preview.add_column("k", style="cyan")
            preview.add_column("beta", style="green", justify="right")
            for k, v in list(zip(momenta, values))[:8]:
                preview.add_row(str(k.tolist()), f"{v.real:+.6g}{v.imag:+.6g}i")
            console.print(preview)
            if csv_prefix:
                write_csv(
                    _csv_path(csv_prefix, "witness"),
                    [*_momentum_columns("k", grid.dim), "re", "im"],
                    ([*k, v.real, v.imag] for k, v in zip(momenta, values)),
                )

        _finish(report, settings, out_path, timing)

    except KeyboardInterrupt:
        console.print("\n🛑 [yellow]Operation cancelled by user[/yellow]")
        sys.exit(1)
    except Exception as e:
        _abort("Equivalence check", e)


@cli.command()
@click.option("--spec", "spec_path", required=True, type=click.Path(path_type=Path), help="Generator spec")
@click.option("--spec2", "spec2_path", type=click.Path(path_type=Path), help="Comparison generator (default: zero)")
@click.option("--graph", "graph_path", type=click.Path(path_type=Path), help="Graph spec to evaluate for both generators")
@click.option("--grid", "grid_option", help="Loop-momentum lattice as m,N,dp")
@click.option("--mass2", type=float, help="Euclidean mass squared")
@click.option("--pmax", type=float, default=3.0, show_default=True, help="Largest external momentum of the scan")
@click.option("--points", type=int, default=13, show_default=True, help="Momenta in the scan")
@click.option("--csv", "csv_prefix", help="Write the amplitude scan as CSV")
@run_options
def loop(
    spec_path: Path,
    spec2_path: Optional[Path],
    graph_path: Optional[Path],
    grid_option: Optional[str],
    mass2: Optional[float],
    pmax: float,
    points: int,
    csv_prefix: Optional[str],
    seed: Optional[int],
    tol: Optional[float],
    threads: Optional[int],
    out_path: Optional[Path],
    timing: bool,
) -> None:
    """Scan the non-planar self-energy over external momentum for two generators."""
    try:
        settings = _settings(seed, tol, threads)
        cfg = settings.config
        report = _new_report("loop", settings)
        alpha1 = _load_generator(report, "spec", spec_path)
        alpha2 = _load_generator(report, "spec2", spec2_path) if spec2_path else make_zero(alpha1.dim)
        if alpha1.dim != alpha2.dim:
            raise DimensionMismatchError(
                "Generators have different dimensions", first=alpha1.dim, second=alpha2.dim
            )
        if points < 1:
            raise SpecParseError("Scan needs at least one momentum", points=points)

        grid = _resolve_grid(grid_option, alpha1.dim, cfg.loop.points, cfg.loop.step)
        loop_cfg = LoopConfig(
            grid=grid,
            mass2=mass2 if mass2 is not None else cfg.loop.mass2,
            max_terms=cfg.loop.max_terms,
        )
        report.parameters = {
            "grid": grid.describe(),
            "mass2": loop_cfg.mass2,
            "pmax": pmax,
            "points": points,
            "second": alpha2.kind,
        }

        direction = np.zeros(alpha1.dim)
        direction[0] = 1.0
        scan = np.linspace(-pmax, pmax, points) if points > 1 else np.array([pmax])
        rows = []
        with console.status("[bold blue]Summing loop momenta..."), timed(
            "selfenergy scan", points=len(scan)
        ):
            for t in scan:
                p = t * direction
                s1 = nonplanar_selfenergy(alpha1, p, loop_cfg)
                s2 = nonplanar_selfenergy(alpha2, p, loop_cfg)
                rows.append([float(t), *p, s1.real, s1.imag, s2.real, s2.imag])
        report.add_result(
            "selfenergy",
            {
                "columns": ["t", *_momentum_columns("p", alpha1.dim), "a1_re", "a1_im", "a2_re", "a2_im"],
                "rows": rows,
            },
        )

        table = Table(title=f"Non-planar self-energy on {grid.describe()}")
        table.add_column("p", style="cyan", justify="right")
        table.add_column(alpha1.kind, style="green", justify="right")
        table.add_column(alpha2.kind, style="magenta", justify="right")
        for row in rows:
            table.add_row(
                f"{row[0]:+.3f}",
                f"{row[-4]:+.6g}{row[-3]:+.6g}i",
                f"{row[-2]:+.6g}{row[-1]:+.6g}i",
            )
        console.print(table)

        if graph_path is not None:
            graph = SpecLoader().load_graph(graph_path)
            report.add_input("graph", graph_path)
            with timed("graph amplitude", loops=graph.loop_count):
                a1 = graph_amplitude(graph, alpha1, loop_cfg)
                a2 = graph_amplitude(graph, alpha2, loop_cfg)
            report.add_result(
                "graph",
                {
                    "loops": graph.loop_count,
                    "first": a1,
                    "second": a2,
                    "log_ratio": a1.log_ratio(a2),
                },
            )
            console.print(
                f"🔁 Graph amplitude ratio: log(A1/A2) = {a1.log_ratio(a2).real:+.6g}"
                f"{a1.log_ratio(a2).imag:+.6g}i"
            )

        if csv_prefix:
            write_csv(
                _csv_path(csv_prefix, "selfenergy"),
                report.results["selfenergy"]["columns"],
                rows,
            )

        _finish(report, settings, out_path, timing)

    except KeyboardInterrupt:
        console.print("\n🛑 [yellow]Operation cancelled by user[/yellow]")
        sys.exit(1)
    except Exception as e:
        _abort("Loop scan", e)


@cli.command()
@click.option("--groups", help=f"Comma-separated subset of: {', '.join(GROUPS)}")
@run_options
def demo(
    groups: Optional[str],
    seed: Optional[int],
    tol: Optional[float],
    threads: Optional[int],
    out_path: Optional[Path],
    timing: bool,
) -> None:
    """Run the acceptance suite and print a summary."""
    try:
        settings = _settings(seed, tol, threads)
        report = _new_report("demo", settings)
        selected = [g.strip() for g in groups.split(",") if g.strip()] if groups else None
        try:
            suite = AcceptanceSuite(settings.seed, selected)
        except ValueError as e:
            raise SpecParseError(str(e)) from e
        report.parameters = {"groups": suite.groups}

        def progress(result: GroupResult) -> None:
            mark = "✅" if result.passed else "❌"
            console.print(f"{mark} {result.name} ({len(result.checks)} checks)")

        result = suite.run(progress)
        report.results = result.to_dict(timing)
        if not result.passed:
            report.fail()

        summary = Table(title="Acceptance suite")
        summary.add_column("Group", style="cyan")
        summary.add_column("Checks", justify="right")
        summary.add_column("Worst check", style="magenta")
        summary.add_column("Result")
        for group in result.groups:
            worst = max(
                group.checks.items(),
                key=lambda item: item[1].max_residual / item[1].tolerance,
                default=None,
            )
            summary.add_row(
                group.name,
                str(len(group.checks)),
                worst[0] if worst else escape(group.error or "-"),
                "[green]pass[/green]" if group.passed else "[red]fail[/red]",
            )
        console.print(summary)
        _finish(report, settings, out_path, timing)

    except KeyboardInterrupt:
        console.print("\n🛑 [yellow]Operation cancelled by user[/yellow]")
        sys.exit(1)
    except Exception as e:
        _abort("Demo", e)


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@cli.group()
def config() -> None:
    """Manage configuration settings."""
    pass


@config.command("show")
@click.option("--section", help="Show specific config section")
@click.option(
    "--format",
    "output_format",
    type=click.Choice(["yaml", "json", "table"]),
    default="table",
    help="Output format",
)
def config_show(section: Optional[str], output_format: str) -> None:
    """Show current configuration."""
    try:
        manager = ConfigManager()

        if section:
            value = manager.get_value(section)
            if output_format == "json":
                console.print_json(data={section: value})
            else:
                console.print(f"[bold]{section}:[/bold] {value}")
            return

        config_dict = manager.load_config().model_dump(exclude={"config_path"})
        if output_format == "json":
            console.print_json(data=config_dict)
        elif output_format == "yaml":
            console.print(yaml.dump(config_dict, default_flow_style=False, indent=2))
        else:
            table = Table(title="tistar Configuration")
            table.add_column("Section", style="cyan", no_wrap=True)
            table.add_column("Setting", style="magenta")
            table.add_column("Value", style="green")

            for section_name, section_data in config_dict.items():
                for key, value in section_data.items():
                    table.add_row(section_name, key, str(value))

            console.print(table)

    except Exception as e:
        console.print(f"❌ [red]Failed to show config: {escape(str(e))}[/red]")
        sys.exit(1)


@config.command("set")
@click.argument("key")
@click.argument("value")
def config_set(key: str, value: str) -> None:
    """Set a configuration value."""
    try:
        manager = ConfigManager()
        manager.set_value(key, value)
        reload_config()
        console.print(f"✅ [green]Set {key} = {escape(value)}[/green]")

    except Exception as e:
        console.print(f"❌ [red]Failed to set config: {escape(str(e))}[/red]")
        sys.exit(1)


@config.command("reset")
def config_reset() -> None:
    """Reset configuration to defaults."""
    try:
        manager = ConfigManager()
        manager.reset_to_defaults()
        reload_config()
        console.print("✅ [green]Configuration reset to defaults[/green]")

    except Exception as e:
        console.print(f"❌ [red]Failed to reset config: {escape(str(e))}[/red]")
        sys.exit(1)


@config.command("validate")
def config_validate() -> None:
    """Validate current configuration."""
    try:
        manager = ConfigManager()
        is_valid, issues = manager.validate_config()

        if is_valid:
            console.print("✅ [green]Configuration is valid![/green]")
        else:
            console.print("❌ [red]Configuration issues found:[/red]")
            for issue in issues:
                console.print(f"   • {escape(issue)}")
            sys.exit(1)

    except Exception as e:
        console.print(f"❌ [red]Failed to validate config: {escape(str(e))}[/red]")
        sys.exit(1)


@config.command("path")
def config_path() -> None:
    """Show configuration file path."""
    try:
        manager = ConfigManager()
        console.print(f"📄 Configuration file: [bold]{escape(str(manager.config_file))}[/bold]")

    except Exception as e:
        console.print(f"❌ [red]Failed to get config path: {escape(str(e))}[/red]")
        sys.exit(1)


def main() -> None:
    """Main entry point with global exception handling."""
    try:
        cli()
    except Exception as e:
        console.print(f"❌ [red]Unexpected error: {escape(str(e))}[/red]")
        logger.error(f"Unexpected error: {e}", exc_info=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
