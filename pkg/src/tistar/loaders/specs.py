"""
Structured spec loader for tistar.

Reads generator and graph descriptions from YAML or JSON files and
validates them into domain objects.
"""

import json
from pathlib import Path
from typing import Any, Union

import yaml

from ..core.cochains import Generator
from ..core.errors import SpecParseError
from ..core.generators import GeneratorSpec, generator_to_spec, load_generator_spec, parse_generator
from ..core.qft import FeynmanGraph, load_graph_spec
from ..utils.logging import get_logger

logger = get_logger(__name__)


class SpecLoader:
    """Loader for generator and graph specs."""

    def __init__(self) -> None:
        self.encoding_fallbacks = ["utf-8", "utf-16", "iso-8859-1"]

    def load_data(self, file_path: Path) -> dict[str, Any]:
        """Read a spec file into a plain mapping."""
        file_path = Path(file_path)
        if not file_path.is_file():
            raise SpecParseError(f"Spec file not found: {file_path}")

        content = self._read_file_content(file_path)
        if not content.strip():
            raise SpecParseError(f"Spec file is empty: {file_path}")

        try:
            if file_path.suffix.lower() == ".json":
                data = json.loads(content)
            else:
                data = yaml.safe_load(content)
        except (json.JSONDecodeError, yaml.YAMLError) as e:
            logger.error(f"Failed to parse spec {file_path}: {e}")
            raise SpecParseError(f"Malformed spec file {file_path.name}: {e}") from e

        if not isinstance(data, dict):
            raise SpecParseError(f"Spec file {file_path.name} must contain a mapping")

        logger.debug(f"Loaded spec: {file_path}")
        return data

    def load_generator(self, file_path: Path) -> Generator:
        """Parse a generator spec file."""
        return parse_generator(load_generator_spec(self.load_data(file_path)))

    def load_graph(self, file_path: Path) -> FeynmanGraph:
        """Parse a graph spec file."""
        return load_graph_spec(self.load_data(file_path))

    def dump(self, obj: Union[Generator, GeneratorSpec, FeynmanGraph], file_path: Path) -> None:
        """Write a generator or graph in the format implied by the suffix."""
        file_path = Path(file_path)
        if isinstance(obj, Generator):
            obj = generator_to_spec(obj)
        data = obj.model_dump(mode="json", exclude_none=True)

        file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, "w", encoding="utf-8") as f:
            if file_path.suffix.lower() == ".json":
                json.dump(data, f, indent=2, sort_keys=True)
                f.write("\n")
            else:
                yaml.safe_dump(data, f, default_flow_style=None, sort_keys=False)
        logger.debug(f"Wrote spec: {file_path}")

    def _read_file_content(self, file_path: Path) -> str:
        """Read file content with encoding detection."""
        for encoding in self.encoding_fallbacks:
            try:
                with open(file_path, encoding=encoding) as f:
                    return f.read()
            except UnicodeDecodeError:
                continue
        raise SpecParseError(f"Cannot decode spec file {file_path}")
