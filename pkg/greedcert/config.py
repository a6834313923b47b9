"""
Configuration constants for greedcert.

Every tolerance the library compares against lives here so that tests of
exact equalities can state their slack explicitly. Functions take these as
keyword defaults; nothing reads a configuration file.

Environment:
- GREEDCERT_THREADS caps the worker pool used by the experiments module
- GREEDCERT_STORE overrides the SQLite run-store location
"""

import logging
import os
from pathlib import Path
from typing import Optional

logger = logging.getLogger(__name__)

TOOL_VERSION = "0.3.0"

# core linear algebra
UNIT_NORM_TOL = 1e-12
ZERO_COLUMN_TOL = 1e-14
ORTHOGONALITY_TOL = 1e-10
RANK_TOL = 1e-10

# solvers
TIE_TOL = 1e-9
ZERO_RESIDUAL_TOL = 1e-12

# certificates: relative slack under which both sides count as equal
BOUNDARY_RTOL = 1e-13

# adversarial construction
LEMMA5_TOL = 1e-9
TIE_CHECK_TOL = 1e-9
DEFAULT_SLACK = 1.5

# experiments
DEFAULT_K = 5
DEFAULT_TRIALS = 2000
DEFAULT_GRID_POINTS = 50
DEFAULT_RATIO_RANGE = (1.0, 8.0)
GENERATION_BUDGET = 1000
MAX_RANDOM_ROWS = 32
MAX_RANDOM_COLUMNS = 64

DEFAULT_STORE = Path(__file__).parent.parent / "greedcert_runs.db"


def get_store_path(path: Optional[str] = None) -> Path:
    if path:
        return Path(path)
    env = os.environ.get("GREEDCERT_STORE")
    if env:
        return Path(env)
    return DEFAULT_STORE


def get_thread_cap(default: Optional[int] = None) -> Optional[int]:
    """Worker cap from GREEDCERT_THREADS, or `default` when unset/invalid."""
    raw = os.environ.get("GREEDCERT_THREADS")
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning("Ignoring GREEDCERT_THREADS=%r: not an integer", raw)
        return default
    if value < 1:
        logger.warning("Ignoring GREEDCERT_THREADS=%r: must be positive", raw)
        return default
    return value
