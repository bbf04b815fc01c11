"""
Utility modules for tistar.

Provides logging, input validation and the thread-pool helpers used
throughout the application.
"""

from .logging import get_logger, setup_logging
from .parallel import chunked_map, configure_workers
from .validation import parse_grid_option, validate_file_path, validate_tolerance

__all__ = [
    "get_logger",
    "setup_logging",
    "chunked_map",
    "configure_workers",
    "parse_grid_option",
    "validate_file_path",
    "validate_tolerance",
]
