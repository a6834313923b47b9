"""
SQLite run store for probability experiments.

Provides:
- init_store(path=None) to create the database file and its tables
- context manager connect_store(path=None) yielding a connection (commits on success)
- save_experiment(result, manifest) -> run id, list_runs(), load_run(run_id)

Usage:
    from greedcert import store
    store.init_store()
    run_id = store.save_experiment(result, manifest)
    store.load_run(run_id).to_frame()

Notes:
- Every operation opens its own connection through the context manager. The
  explorer may run several pages at once, hence check_same_thread=False.
- The location comes from `config.get_store_path`, so GREEDCERT_STORE applies.
"""

import json
import logging
import sqlite3
from contextlib import contextmanager
from typing import Any, Dict, List, Optional

from greedcert import config
from greedcert.errors import InvalidParameters, ResultIOError
from greedcert.experiments import ExperimentResult, ExperimentRow

logger = logging.getLogger(__name__)


@contextmanager
def connect_store(path: Optional[str] = None):
    """Context manager yielding a sqlite3.Connection.

    Commits on successful exit, rolls back on exception.
    Rows come back as sqlite3.Row.
    """
    db_path = config.get_store_path(path)
    try:
        db_path.parent.mkdir(parents=True, exist_ok=True)
        conn = sqlite3.connect(str(db_path), check_same_thread=False)
    except (OSError, sqlite3.OperationalError) as exc:
        raise ResultIOError(f"cannot open run store {db_path}: {exc}") from exc
    conn.row_factory = sqlite3.Row
    try:
        yield conn
        conn.commit()
    except Exception:
        conn.rollback()
        raise
    finally:
        conn.close()


def init_store(path: Optional[str] = None) -> None:
    """Create the database file and both tables if they don't exist."""
    with connect_store(path) as conn:
        conn.executescript(_create_schema_sql())


def _create_schema_sql() -> str:
    return """
    -- one row per experiment run; manifest is the JSON written next to the CSV
    CREATE TABLE IF NOT EXISTS runs (
        id INTEGER PRIMARY KEY AUTOINCREMENT,
        k INTEGER NOT NULL,
        manifest TEXT NOT NULL,
        created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
    );

    -- probability rows of a run
    CREATE TABLE IF NOT EXISTS run_rows (
        id INTEGER PRIMARY KEY AUTOINCREMENT,
        run_id INTEGER NOT NULL,
        k_mu REAL NOT NULL,
        distribution TEXT NOT NULL,
        successes INTEGER NOT NULL,
        trials INTEGER NOT NULL,
        seed INTEGER NOT NULL,
        FOREIGN KEY(run_id) REFERENCES runs(id)
    );
    """


def save_experiment(result: ExperimentResult, manifest: Dict[str, Any], path: Optional[str] = None) -> int:
    """Insert a run and its rows. Returns the new run id."""
    init_store(path)
    with connect_store(path) as conn:
        cur = conn.cursor()
        cur.execute("INSERT INTO runs(k, manifest) VALUES (?, ?)", (result.k, json.dumps(manifest)))
        run_id = cur.lastrowid
        cur.executemany(
            "INSERT INTO run_rows(run_id, k_mu, distribution, successes, trials, seed) VALUES (?, ?, ?, ?, ?, ?)",
            [(run_id, r.k_mu, r.distribution, r.successes, r.trials, r.seed) for r in result.rows],
        )
    logger.info("stored run %d (%d rows)", run_id, len(result.rows))
    return run_id


def list_runs(limit: int = 50, path: Optional[str] = None) -> List[Dict[str, Any]]:
    """Newest runs first, with the manifest decoded and a row count."""
    init_store(path)
    with connect_store(path) as conn:
        cur = conn.cursor()
        cur.execute(
            """
            SELECT r.id, r.k, r.manifest, r.created_at,
                   (SELECT COUNT(*) FROM run_rows w WHERE w.run_id = r.id) AS row_count
            FROM runs r
            ORDER BY r.id DESC
            LIMIT ?
            """,
            (limit,),
        )
        runs = [dict(r) for r in cur.fetchall()]
    for run in runs:
        run["manifest"] = json.loads(run["manifest"])
    return runs


def load_run(run_id: int, path: Optional[str] = None) -> ExperimentResult:
    init_store(path)
    with connect_store(path) as conn:
        cur = conn.cursor()
        cur.execute("SELECT k FROM runs WHERE id = ?", (run_id,))
        run = cur.fetchone()
        if run is None:
            raise InvalidParameters(f"no stored run with id {run_id}")
        cur.execute(
            "SELECT k_mu, distribution, successes, trials, seed FROM run_rows WHERE run_id = ? ORDER BY id",
            (run_id,),
        )
        rows = [ExperimentRow(r["k_mu"], r["distribution"], r["successes"], r["trials"], r["seed"])
                for r in cur.fetchall()]
    return ExperimentResult(k=run["k"], rows=rows)
