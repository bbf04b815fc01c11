"""
Loaders for generator specs, graph specs and field payloads.

Structured specs are YAML or JSON; field coefficients use either the
``.tisp`` binary layout or a JSON form.
"""

from typing import Optional

from .fields import FieldLoader
from .specs import SpecLoader

# Mapping of file extensions to spec loader classes
LOADER_MAPPING = {
    ".yaml": SpecLoader,
    ".yml": SpecLoader,
    ".json": SpecLoader,
}

# Mapping of file extensions to field loader classes
FIELD_LOADER_MAPPING = {
    ".tisp": FieldLoader,
    ".json": FieldLoader,
}


def get_spec_loader(file_extension: str) -> Optional[type]:
    """Get spec loader for file extension."""
    return LOADER_MAPPING.get(file_extension.lower())


def get_field_loader(file_extension: str) -> Optional[type]:
    """Get field loader for file extension."""
    return FIELD_LOADER_MAPPING.get(file_extension.lower())


def get_supported_extensions() -> list[str]:
    """Get list of all supported file extensions."""
    return sorted(set(LOADER_MAPPING) | set(FIELD_LOADER_MAPPING))


__all__ = [
    "SpecLoader",
    "FieldLoader",
    "get_spec_loader",
    "get_field_loader",
    "get_supported_extensions",
    "LOADER_MAPPING",
    "FIELD_LOADER_MAPPING",
]
