"""
Environment Settings

Configuration via environment variables (a local .env file is honoured):
- HEATSYM_LOG_LEVEL: logging level for library diagnostics (default WARNING)
- HEATSYM_OUTPUT_DIR: default directory for CSV output (default "output")
- HEATSYM_TRUNCATION_TOL: far-field tolerance in K for the truncation check (default 0.1)
"""

import logging
import os

from dotenv import load_dotenv

load_dotenv()


LOG_LEVEL = os.getenv("HEATSYM_LOG_LEVEL", "WARNING").upper()
DEFAULT_OUTPUT_DIR = os.getenv("HEATSYM_OUTPUT_DIR", "output")
TRUNCATION_TOL = float(os.getenv("HEATSYM_TRUNCATION_TOL", "0.1"))


def configure_logging(level: str | None = None) -> None:
    """Set up root logging once for CLI and server entry points."""
    logging.basicConfig(
        level=getattr(logging, (level or LOG_LEVEL), logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )
