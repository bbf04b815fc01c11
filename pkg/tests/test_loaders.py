"""Tests for spec and field loaders."""

import json
import tempfile
from pathlib import Path

import numpy as np
import pytest
from tistar.core.errors import SpecParseError
from tistar.core.generators import make_wick_voros
from tistar.core.lattice import GridSpec
from tistar.core.star import BandlimitedField
from tistar.loaders import (
    FIELD_LOADER_MAPPING,
    get_field_loader,
    get_spec_loader,
    get_supported_extensions,
)
from tistar.loaders.fields import HEADER, MAGIC, FieldLoader
from tistar.loaders.specs import SpecLoader

MOYAL_YAML = """\
kind: moyal
dim: 2
theta_A:
  - [0.0, 0.5]
  - [-0.5, 0.0]
"""


class TestLoaderMapping:
    """Test loader lookup by extension."""

    def test_get_spec_loader(self):
        """Test getting spec loaders for extensions."""
        assert get_spec_loader(".yaml") is SpecLoader
        assert get_spec_loader(".YML") is SpecLoader
        assert get_spec_loader(".json") is SpecLoader
        assert get_spec_loader(".tisp") is None

    def test_get_field_loader(self):
        """Test getting field loaders for extensions."""
        assert get_field_loader(".tisp") is FieldLoader
        assert get_field_loader(".json") is FieldLoader
        assert get_field_loader(".yaml") is None

    def test_supported_extensions(self):
        """Test getting supported extensions."""
        extensions = get_supported_extensions()
        assert extensions == sorted(extensions)
        assert set(FIELD_LOADER_MAPPING) <= set(extensions)
        assert ".yaml" in extensions


class TestSpecLoader:
    """Test generator and graph spec loading."""

    def setup_method(self):
        """Set up loader and temp directory."""
        self.loader = SpecLoader()
        self.temp_dir = tempfile.TemporaryDirectory()
        self.root = Path(self.temp_dir.name)

    def teardown_method(self):
        """Clean up temp directory."""
        self.temp_dir.cleanup()

    def test_load_yaml_generator(self):
        """Test loading a Moyal generator from YAML."""
        path = self.root / "moyal.yaml"
        path.write_text(MOYAL_YAML)

        alpha = self.loader.load_generator(path)
        assert alpha.dim == 2
        assert alpha([1.0, 0.0], [0.0, 1.0]) == pytest.approx(-0.5j)

    def test_load_json_coboundary(self):
        """Test loading a coboundary generator from JSON."""
        path = self.root / "cob.json"
        path.write_text(json.dumps({"kind": "coboundary", "dim": 1, "beta": [[[2], 0.5, 0.0]]}))

        alpha = self.loader.load_generator(path)
        # d beta(p, q) = beta(q) - beta(p) + beta(p - q) with beta(p) = p^2 / 2
        assert alpha([3.0], [1.0]) == pytest.approx(0.5 - 4.5 + 2.0)

    def test_dump_and_reload(self):
        """Test a dumped generator reloads to the same function."""
        theta_a = [[0.0, 0.3], [-0.3, 0.0]]
        theta_s = [[0.02, 0.01], [0.01, 0.03]]
        original = make_wick_voros(theta_a, theta_s)
        p = np.array([[1.0, -0.5], [0.25, 2.0]])
        q = np.array([[0.5, 0.5], [-1.0, 0.0]])

        for name in ("wv.yaml", "wv.json"):
            path = self.root / name
            self.loader.dump(original, path)
            reloaded = self.loader.load_generator(path)
            assert np.allclose(reloaded(p, q), original(p, q))

    def test_json_dump_is_sorted(self):
        """Test JSON dumps are key-sorted."""
        path = self.root / "moyal.json"
        self.loader.dump(make_wick_voros([[0.0, 1.0], [-1.0, 0.0]], np.eye(2)), path)
        data = json.loads(path.read_text())
        assert list(data) == sorted(data)

    @pytest.mark.parametrize(
        "name, content",
        [
            ("empty.yaml", "   \n"),
            ("broken.yaml", "kind: [moyal\n"),
            ("broken.json", "{not json"),
            ("list.yaml", "- 1\n- 2\n"),
            ("unknown.yaml", "kind: lorentz\ndim: 2\n"),
            ("missing.yaml", "kind: moyal\ndim: 2\n"),
            ("nonsquare.yaml", "kind: moyal\ndim: 2\ntheta_A: [[0.0, 1.0]]\n"),
            ("symmetric.yaml", "kind: moyal\ndim: 2\ntheta_A: [[0.0, 1.0], [1.0, 0.0]]\n"),
            ("version.yaml", MOYAL_YAML + "version: 7\n"),
        ],
    )
    def test_malformed_specs(self, name, content):
        """Test malformed spec files raise SpecParseError."""
        path = self.root / name
        path.write_text(content)
        with pytest.raises(SpecParseError):
            self.loader.load_generator(path)

    def test_missing_file(self):
        """Test missing files raise SpecParseError."""
        with pytest.raises(SpecParseError):
            self.loader.load_data(self.root / "absent.yaml")

    def test_load_graph(self):
        """Test loading a graph spec."""
        path = self.root / "graph.yaml"
        path.write_text(
            "dim: 1\n"
            "lines:\n"
            "  - {id: a, kind: external, momentum: [1.0]}\n"
            "  - {id: b, kind: external, momentum: [-1.0]}\n"
            "  - {id: k, kind: internal}\n"
            "vertices:\n"
            "  - lines: [a, k, b, k]\n"
        )
        graph = self.loader.load_graph(path)
        assert graph.loop_count == 1


class TestFieldLoader:
    """Test field payload loading."""

    def setup_method(self):
        """Set up a field and temp directory."""
        self.loader = FieldLoader()
        self.grid = GridSpec(dim=2, points=5, step=0.5)
        self.field = BandlimitedField.random(self.grid, 2, np.random.default_rng(11))
        self.temp_dir = tempfile.TemporaryDirectory()
        self.root = Path(self.temp_dir.name)

    def teardown_method(self):
        """Clean up temp directory."""
        self.temp_dir.cleanup()

    def test_binary_layout(self):
        """Test the binary header and coefficient block."""
        path = self.root / "f.tisp"
        self.loader.save(self.field, path)

        raw = path.read_bytes()
        assert raw.startswith(MAGIC)
        assert HEADER.unpack_from(raw, len(MAGIC)) == (2, 5, 0.5)
        assert len(raw) == len(MAGIC) + HEADER.size + 25 * 16

        loaded = self.loader.load_data(path)
        assert loaded.grid == self.grid
        assert np.array_equal(loaded.coeffs, self.field.coeffs)

    def test_json_layout(self):
        """Test the JSON form."""
        path = self.root / "f.json"
        self.loader.save(self.field, path)

        payload = json.loads(path.read_text())
        assert payload["dim"] == 2
        assert len(payload["coeffs"]) == 25

        loaded = self.loader.load_data(path)
        assert np.array_equal(loaded.coeffs, self.field.coeffs)

    def test_bad_magic(self):
        """Test files without the magic are refused."""
        path = self.root / "bad.tisp"
        path.write_bytes(b"NOPE1" + HEADER.pack(2, 5, 0.5))
        with pytest.raises(SpecParseError, match="magic"):
            self.loader.load_data(path)

    def test_truncated_header(self):
        """Test short headers are refused."""
        path = self.root / "short.tisp"
        path.write_bytes(MAGIC + b"\x02\x00")
        with pytest.raises(SpecParseError, match="truncated"):
            self.loader.load_data(path)

    def test_wrong_body_size(self):
        """Test coefficient blocks of the wrong length are refused."""
        path = self.root / "f.tisp"
        self.loader.save(self.field, path)
        path.write_bytes(path.read_bytes()[:-16])
        with pytest.raises(SpecParseError, match="expected"):
            self.loader.load_data(path)

    def test_invalid_grid_header(self):
        """Test even point counts in the header are refused."""
        path = self.root / "even.tisp"
        path.write_bytes(MAGIC + HEADER.pack(1, 4, 1.0) + bytes(4 * 16))
        with pytest.raises(SpecParseError):
            self.loader.load_data(path)

    @pytest.mark.parametrize(
        "payload",
        [
            "{broken",
            json.dumps({"dim": 1, "points": 3, "step": 1.0}),
            json.dumps({"dim": 1, "points": 3, "step": 1.0, "coeffs": [[1.0, 0.0]]}),
            json.dumps({"dim": 1, "points": 3, "step": 1.0, "coeffs": [[1.0], [2.0], [3.0]]}),
        ],
    )
    def test_malformed_json(self, payload):
        """Test malformed JSON payloads are refused."""
        path = self.root / "f.json"
        path.write_text(payload)
        with pytest.raises(SpecParseError):
            self.loader.load_data(path)
