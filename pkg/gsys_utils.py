"""
Shared configuration and logging utilities - graded gauge system toolkit
"""
import logging
import os
import sys
from typing import Optional

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

DEFAULT_MAX_DEG = 3
DEFAULT_MAX_RES = 3


class GsysError(Exception):
    """Base class for every error raised by the toolkit."""


def _read_int(name: str, default: Optional[int]) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")
    if value < 0:
        raise ValueError(f"{name} must be non-negative, got {value}")
    return value


class GsysConfig:
    def __init__(self, max_deg: Optional[int] = None, max_res: Optional[int] = None,
                 log_level: Optional[str] = None, log_file: Optional[str] = None):
        """
        Resolve solver bounds and logging options.

        Args:
            max_deg: coefficient degree bound; GSYS_MAX_DEG overrides it when set
            max_res: resolution cap; falls back to GSYS_MAX_RES then 3
            log_level: logging level name; falls back to GSYS_LOG_LEVEL then INFO
            log_file: optional log file; falls back to GSYS_LOG_FILE
        """
        self.deg_override = _read_int('GSYS_MAX_DEG', None)
        self.max_deg = self.deg_override if self.deg_override is not None else (
            max_deg if max_deg is not None else DEFAULT_MAX_DEG)
        self.max_res = max_res if max_res is not None else _read_int('GSYS_MAX_RES', DEFAULT_MAX_RES)
        self.log_level = (log_level or os.getenv('GSYS_LOG_LEVEL') or 'INFO').upper()
        if not isinstance(logging.getLevelName(self.log_level), int):
            raise ValueError(f"GSYS_LOG_LEVEL is not a logging level: {self.log_level!r}")
        self.log_file = log_file or os.getenv('GSYS_LOG_FILE') or None

    def degree_bound(self, requested: Optional[int] = None) -> int:
        """Degree bound for one computation; the environment override always wins."""
        if self.deg_override is not None:
            return self.deg_override
        return requested if requested is not None else self.max_deg

    def __repr__(self):
        return (f"GsysConfig(max_deg={self.max_deg}, max_res={self.max_res}, "
                f"log_level={self.log_level!r}, log_file={self.log_file!r})")


def setup_logging(level: str = 'INFO', log_file: Optional[str] = None) -> None:
    """Configure the root logger once; diagnostics go to stderr."""
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO),
                        format=LOG_FORMAT, handlers=handlers, force=True)


def fraction_text(value) -> str:
    """Exact rational as 'p' or 'p/q'."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
