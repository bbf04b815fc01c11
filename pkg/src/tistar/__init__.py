"""
tistar - translation-invariant star products and their cohomology.

A library and CLI for star products generated by a function of momenta:
coboundaries and cocycle checks, the Hodge decomposition into harmonic
forms, a lattice star-product engine for band-limited fields,
equivalence witnesses between products, and non-commutative vertex and
loop amplitudes.
"""

__version__ = "1.0.0"
__author__ = "tistar developers"
__description__ = "Translation-invariant star products at desk scale"

from .core.cochains import Generator, OneCochain, SampleSet
from .core.config import Config, get_config
from .core.equivalence import decide_equivalence
from .core.generators import make_moyal, make_wick_voros, parse_generator
from .core.hodge import decompose, harmonic_part
from .core.star import BandlimitedField, star

__all__ = [
    "__version__",
    "__author__",
    "__description__",
    "Config",
    "get_config",
    "Generator",
    "OneCochain",
    "SampleSet",
    "make_moyal",
    "make_wick_voros",
    "parse_generator",
    "harmonic_part",
    "decompose",
    "BandlimitedField",
    "star",
    "decide_equivalence",
]
