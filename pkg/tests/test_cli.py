"""Tests for CLI functionality."""

import json
import tempfile
from pathlib import Path
from unittest.mock import patch

from click.testing import CliRunner
from tistar.core.equivalence import quantum_identities
from tistar.core.errors import LoopBudgetError
from tistar.main import cli

MOYAL = """\
kind: moyal
dim: 2
theta_A: [[0.0, 0.3], [-0.3, 0.0]]
"""

WICK_VOROS = """\
kind: wick_voros
dim: 2
theta_A: [[0.0, 0.3], [-0.3, 0.0]]
theta_S: [[0.02, 0.01], [0.01, 0.03]]
"""

ZERO = "kind: zero\ndim: 2\n"


class TestCLI:
    """Test CLI commands."""

    def setup_method(self):
        """Set up test environment."""
        self.runner = CliRunner()
        self.temp_dir = tempfile.TemporaryDirectory()
        self.root = Path(self.temp_dir.name)
        self.moyal = self._spec("moyal.yaml", MOYAL)
        self.wv = self._spec("wv.yaml", WICK_VOROS)
        self.zero = self._spec("zero.yaml", ZERO)

    def teardown_method(self):
        """Clean up temp directory."""
        self.temp_dir.cleanup()

    def _spec(self, name: str, content: str) -> str:
        path = self.root / name
        path.write_text(content)
        return str(path)

    def test_version_command(self):
        """Test version display."""
        result = self.runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert "tistar v" in result.output

    def test_help_command(self):
        """Test help display."""
        result = self.runner.invoke(cli, ["--help"])
        assert result.exit_code == 0
        assert "translation-invariant star products" in result.output
        for command in ("check", "hodge", "star", "equiv", "loop", "demo", "config"):
            assert command in result.output

    def test_check_moyal(self):
        """Test check passes for a cocycle and writes a report."""
        out = self.root / "check.json"
        result = self.runner.invoke(cli, ["check", "--spec", self.moyal, "--out", str(out)])
        assert result.exit_code == 0

        report = json.loads(out.read_text())
        assert report["pass"] is True
        assert report["command"] == "check"
        assert report["results"]["cocycle"]["pass"] is True
        assert report["results"]["commutative"]["pass"] is False
        assert report["inputs"]["spec"].startswith("sha256:")
        assert "timing" not in report

    def test_check_is_reproducible(self):
        """Test identical runs write identical reports."""
        first, second = self.root / "a.json", self.root / "b.json"
        for out in (first, second):
            result = self.runner.invoke(cli, ["check", "--spec", self.wv, "--seed", "3", "--out", str(out)])
            assert result.exit_code == 0
        assert first.read_bytes() == second.read_bytes()

    def test_malformed_spec(self):
        """Test parse errors exit with code 2."""
        broken = self._spec("broken.yaml", "kind: moyal\ndim: 2\n")
        result = self.runner.invoke(cli, ["check", "--spec", broken])
        assert result.exit_code == 2

        result = self.runner.invoke(cli, ["check", "--spec", str(self.root / "absent.yaml")])
        assert result.exit_code == 2

    def test_invalid_options(self):
        """Test bad tolerances and grids exit with code 2."""
        result = self.runner.invoke(cli, ["check", "--spec", self.moyal, "--tol", "-1"])
        assert result.exit_code == 2

        result = self.runner.invoke(cli, ["hodge", "--spec", self.moyal, "--grid", "2,8,1.0"])
        assert result.exit_code == 2

    def test_hodge(self):
        """Test the decomposition of Wick-Voros with CSV tables."""
        prefix = str(self.root / "wv")
        out = self.root / "hodge.json"
        result = self.runner.invoke(
            cli,
            ["hodge", "--spec", self.wv, "--grid", "2,9,1.0", "--csv", prefix, "--out", str(out)],
        )
        assert result.exit_code == 0
        assert (self.root / "wv_omega.csv").exists()
        assert (self.root / "wv_commutator.csv").exists()

        report = json.loads(out.read_text())
        assert report["parameters"]["grid"] == "2,9,1.0"
        assert "commutator_matrix" in report["results"]

    def test_star(self):
        """Test the star command on random fields and saves the product."""
        product = self.root / "product.tisp"
        result = self.runner.invoke(
            cli,
            ["star", "--spec", self.moyal, "--grid", "2,9,0.5", "--radius", "2", "--product", str(product)],
        )
        assert result.exit_code == 0
        assert product.exists()

        again = self.runner.invoke(
            cli, ["star", "--spec", self.wv, "--field", str(product), "--field2", str(product)]
        )
        # Two radius-4 factors overflow a 9-point lattice
        assert again.exit_code == 3

    def test_equiv_moyal_wick_voros(self):
        """Test Moyal and Wick-Voros are reported equivalent with a witness."""
        out = self.root / "equiv.json"
        prefix = str(self.root / "eq")
        result = self.runner.invoke(
            cli,
            [
                "equiv",
                "--spec", self.moyal,
                "--spec2", self.wv,
                "--grid", "2,11,1.0",
                "--csv", prefix,
                "--out", str(out),
            ],
        )
        assert result.exit_code == 0
        assert (self.root / "eq_witness.csv").exists()

        report = json.loads(out.read_text())
        assert report["results"]["verdict"]["equivalent"] is True
        assert report["results"]["criterion_agrees"] is True

    def test_equiv_not_equivalent(self):
        """Test inequivalent generators exit with code 1."""
        result = self.runner.invoke(
            cli, ["equiv", "--spec", self.moyal, "--spec2", self.zero, "--grid", "2,9,1.0"]
        )
        assert result.exit_code == 1
        assert "not equivalent" in result.output

    def test_loop(self):
        """Test the self-energy scan on a small lattice."""
        out = self.root / "loop.json"
        prefix = str(self.root / "se")
        result = self.runner.invoke(
            cli,
            [
                "loop",
                "--spec", self.moyal,
                "--grid", "2,7,1.0",
                "--points", "3",
                "--csv", prefix,
                "--out", str(out),
            ],
        )
        assert result.exit_code == 0
        report = json.loads(out.read_text())
        assert len(report["results"]["selfenergy"]["rows"]) == 3
        assert (self.root / "se_selfenergy.csv").exists()

    def test_loop_budget_exit_code(self):
        """Test budget errors exit with code 3."""
        with patch(
            "tistar.main.nonplanar_selfenergy",
            side_effect=LoopBudgetError("too many terms", terms=10, max_terms=1),
        ):
            result = self.runner.invoke(cli, ["loop", "--spec", self.moyal, "--grid", "2,5,1.0"])
        assert result.exit_code == 3

    def test_demo_subset(self):
        """Test the acceptance suite on one group."""
        result = self.runner.invoke(cli, ["demo", "--groups", "oracle"])
        assert result.exit_code == 0
        assert "oracle" in result.output

        result = self.runner.invoke(cli, ["demo", "--groups", "bogus"])
        assert result.exit_code == 2

    def test_config_commands(self):
        """Test config show, set, validate, path and reset."""
        result = self.runner.invoke(cli, ["config", "path"])
        assert result.exit_code == 0
        assert "Configuration file" in result.output

        result = self.runner.invoke(cli, ["config", "set", "sampling.seed", "7"])
        assert result.exit_code == 0

        result = self.runner.invoke(cli, ["config", "show", "--section", "sampling.seed"])
        assert result.exit_code == 0
        assert "7" in result.output

        result = self.runner.invoke(cli, ["config", "set", "grid.points", "8"])
        assert result.exit_code == 1

        result = self.runner.invoke(cli, ["config", "validate"])
        assert result.exit_code == 0

        result = self.runner.invoke(cli, ["config", "show", "--format", "json"])
        assert result.exit_code == 0
        assert "tolerances" in result.output

        result = self.runner.invoke(cli, ["config", "reset"])
        assert result.exit_code == 0

    def test_config_set_reaches_next_run(self):
        """Test a value set after a run is used by the following run."""
        first, second = self.root / "a.json", self.root / "b.json"
        result = self.runner.invoke(cli, ["check", "--spec", self.moyal, "--out", str(first)])
        assert result.exit_code == 0

        result = self.runner.invoke(cli, ["config", "set", "sampling.seed", "11"])
        assert result.exit_code == 0

        result = self.runner.invoke(cli, ["check", "--spec", self.moyal, "--out", str(second)])
        assert result.exit_code == 0
        assert json.loads(first.read_text())["seed"] != 11
        assert json.loads(second.read_text())["seed"] == 11

    def test_logging_settings_reach_setup(self):
        """Test the configured file format and backup count are applied."""
        self.runner.invoke(cli, ["config", "set", "logging.backup_count", "5"])
        self.runner.invoke(cli, ["config", "set", "logging.format", "%(levelname)s %(message)s"])

        with patch("tistar.main.setup_logging") as setup:
            result = self.runner.invoke(cli, ["check", "--spec", self.moyal])
        assert result.exit_code == 0
        assert setup.call_args.kwargs["backup_count"] == 5
        assert setup.call_args.kwargs["fmt"] == "%(levelname)s %(message)s"

    def test_identity_tolerance_setting(self):
        """Test tolerances.identity drives the quantum identity checks."""
        result = self.runner.invoke(cli, ["config", "set", "tolerances.identity", "1e-7"])
        assert result.exit_code == 0

        with patch("tistar.main.quantum_identities", wraps=quantum_identities) as identities:
            result = self.runner.invoke(
                cli, ["equiv", "--spec", self.moyal, "--spec2", self.wv, "--grid", "2,11,1.0"]
            )
        assert result.exit_code == 0
        assert identities.call_args.args[4] == 1e-7

    def test_unexpected_error_is_logged_with_context(self):
        """Test non-library errors exit 1 and are logged with the failing action."""
        with patch(
            "tistar.main.nonplanar_selfenergy", side_effect=RuntimeError("boom")
        ), patch("tistar.main.log_error_with_context") as log_error:
            result = self.runner.invoke(cli, ["loop", "--spec", self.moyal, "--grid", "2,5,1.0"])
        assert result.exit_code == 1
        log_error.assert_called_once()
        assert log_error.call_args.args[2] == {"action": "Loop scan"}
