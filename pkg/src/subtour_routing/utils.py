"""Utility functions for the subtour routing toolkit."""
import datetime
import logging
import math
import sys
import threading
from typing import Optional

# Thread-safe counter for batch id uniqueness
_id_lock = threading.Lock()
_last_timestamp = 0
_counter = 0

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
LOG_DATEFMT = "%Y-%m-%d %H:%M:%S"

def setup_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    """Configure the root logger for the command line.

    Reports own stdout, so logs go to stderr unless a log file is given.
    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Optional path to a log file, appended to
    """
    numeric_level = logging.getLevelName(level.upper())
    if not isinstance(numeric_level, int):
        numeric_level = logging.INFO

    if log_file:
        handler: logging.Handler = logging.FileHandler(log_file, mode="a", encoding="utf-8")
    else:
        handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=LOG_DATEFMT))
    logging.basicConfig(level=numeric_level, handlers=[handler])

def generate_batch_id() -> str:
    """Generate an ISO 8601 timestamp-based ID for a benchmark batch.

    Returns:
        A string in format "YYYYMMDDTHHMMSSssssssccc" where:
        - YYYYMMDD is the date
        - T is the ISO 8601 date/time separator
        - HHMMSS is the time (hours, minutes, seconds)
        - ssssss is the 6-digit microsecond component
        - ccc is a 3-digit counter for uniqueness within the same microsecond
    """
    global _last_timestamp, _counter

    with _id_lock:
        now = datetime.datetime.now()
        current_timestamp = int(now.timestamp() * 1_000_000)

        # If multiple IDs generated in same microsecond, increment counter
        if current_timestamp == _last_timestamp:
            _counter += 1
        else:
            _last_timestamp = current_timestamp
            _counter = 0
        _counter %= 1000

        date_time = now.strftime('%Y%m%dT%H%M%S')
        return f"{date_time}{now.microsecond:06d}{_counter:03d}"

def leq_tol(value: float, bound: float, tolerance: float) -> bool:
    """Check value <= bound up to a relative tolerance.
    Args:
        value: Left-hand side
        bound: Right-hand side
        tolerance: Relative tolerance, applied to max(|value|, |bound|, 1)
    Returns:
        True if value does not exceed bound beyond the tolerance
    """
    scale = max(abs(value), abs(bound), 1.0)
    return value <= bound + tolerance * scale

def safe_ratio(numerator: float, denominator: float) -> float:
    """Ratio with 0/0 defined as 0 and x/0 as infinity."""
    if denominator > 0:
        return numerator / denominator
    if numerator <= 0:
        return 0.0
    return math.inf

def format_float(value: float, digits: int = 17) -> str:
    """Format a float with a fixed number of significant digits."""
    return format(value, f".{digits}g")
