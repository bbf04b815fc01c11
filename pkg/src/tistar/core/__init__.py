"""
Core functionality for tistar.

Cochains and predicates, generator families, the Hodge decomposition,
the lattice star engine, equivalence, Feynman amplitudes, run reports
and configuration.
"""

from .cochains import Generator, OneCochain, PredicateReport, SampleSet
from .config import Config, ConfigManager, get_config
from .errors import TistarError
from .lattice import GridSpec
from .reports import RunReport

__all__ = [
    "Config",
    "ConfigManager",
    "get_config",
    "Generator",
    "OneCochain",
    "PredicateReport",
    "SampleSet",
    "GridSpec",
    "RunReport",
    "TistarError",
]
