"""
Run reports and plot-ready tables.

Every CLI command produces a :class:`RunReport`. Serialization is
canonical (sorted keys, fixed float formatting through ``json``) so two
runs with the same seed, inputs and build write identical bytes.
Wall-clock timing is only present when explicitly requested.
"""

import csv
import hashlib
import json
import math
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..utils.logging import get_logger
from .cochains import PredicateReport

logger = get_logger(__name__)

SCHEMA_VERSION = 1


def digest_file(file_path: Path) -> str:
    """``sha256:<hex>`` of a file's bytes."""
    h = hashlib.sha256()
    with open(file_path, "rb") as f:
        for block in iter(lambda: f.read(65536), b""):
            h.update(block)
    return f"sha256:{h.hexdigest()}"


def digest_text(text: str) -> str:
    return f"sha256:{hashlib.sha256(text.encode('utf-8')).hexdigest()}"


def to_jsonable(value: Any) -> Any:
    """Convert numpy, complex and report values into plain JSON data.

    Complex numbers become ``[re, im]``; non-finite floats become the
    strings ``"inf"``, ``"-inf"`` and ``"nan"``.
    """
    if isinstance(value, PredicateReport):
        return to_jsonable(value.to_dict())
    if isinstance(value, BaseModel):
        return to_jsonable(value.model_dump(mode="json", by_alias=True))
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(float(value.real)), to_jsonable(float(value.imag))]
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(value, Path):
        return str(value)
    return value


class RunReport(BaseModel):
    """Structured outcome of one CLI command."""

    model_config = ConfigDict(populate_by_name=True)

    command: str
    version: str
    schema_version: int = SCHEMA_VERSION
    seed: int
    inputs: dict[str, str] = Field(default_factory=dict)
    parameters: dict[str, Any] = Field(default_factory=dict)
    results: dict[str, Any] = Field(default_factory=dict)
    passed: bool = Field(True, alias="pass")
    timing: Optional[dict[str, float]] = None

    def add_input(self, name: str, file_path: Path) -> None:
        self.inputs[name] = digest_file(file_path)

    def add_result(self, name: str, value: Any, counts: bool = True) -> None:
        """Record a result; failing predicate reports fail the run when ``counts``."""
        self.results[name] = to_jsonable(value)
        if counts and isinstance(value, PredicateReport) and not value.passed:
            self.passed = False

    def fail(self) -> None:
        self.passed = False

    def to_dict(self) -> dict[str, Any]:
        data = self.model_dump(by_alias=True, exclude_none=True)
        return to_jsonable(data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    def write(self, file_path: Path) -> None:
        file_path = Path(file_path)
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.to_json())
        logger.info(f"Report written to {file_path}")


def write_csv(
    file_path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]
) -> int:
    """Write a plain numeric table; floats use ``repr`` precision."""
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(file_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
            count += 1
    logger.info(f"Wrote {count} rows to {file_path}")
    return count
