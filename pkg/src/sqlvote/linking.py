"""Question-relevant cell value selection for prompt construction.

Scans text-typed columns of the question's database and keeps the values
whose longest-common-substring overlap with the question clears a threshold,
so prompts carry only content the question actually mentions.
"""

from __future__ import annotations

import sqlite3
from dataclasses import dataclass
from difflib import SequenceMatcher

from .catalog import ColumnType, DatabaseCatalog
from .errors import DbUnreadable

MATCH_THRESHOLD = 0.85
DEFAULT_MAX_PER_COLUMN = 3
SCAN_CAP = 100_000


@dataclass(frozen=True)
class ValueMatch:
    table_name: str
    column_name: str
    value: str
    score: float


def score_match(question: str, value: str) -> float:
    """Longest common contiguous substring of the lowercased pair, over len(value)."""
    q = question.lower()
    v = value.lower()
    if not q or not v:
        return 0.0
    block = SequenceMatcher(None, q, v, autojunk=False).find_longest_match(0, len(q), 0, len(v))
    return block.size / len(v)


def _distinct_column_values(conn: sqlite3.Connection, table: str, column: str, cap: int) -> list[str]:
    """First `cap` distinct non-empty values in row order, rendered as text."""
    seen: dict[str, None] = {}
    cursor = conn.execute(f'SELECT "{column}" FROM "{table}"')
    for (raw,) in cursor:
        if raw is None:
            continue
        value = raw if isinstance(raw, str) else str(raw)
        if not value or value in seen:
            continue
        seen[value] = None
        if len(seen) >= cap:
            break
    return list(seen)


def link_values(
    question: str,
    catalog: DatabaseCatalog,
    max_per_column: int = DEFAULT_MAX_PER_COLUMN,
    threshold: float = MATCH_THRESHOLD,
    scan_cap: int = SCAN_CAP,
) -> list[ValueMatch]:
    """Top matching distinct values per text column, in schema order.

    Per column, matches are ordered by descending score then value; at most
    `max_per_column` are kept and only scores >= `threshold` qualify.
    """
    try:
        conn = sqlite3.connect(f"file:{catalog.db_path}?mode=ro", uri=True)
    except sqlite3.Error as exc:
        raise DbUnreadable(str(catalog.db_path), str(exc)) from exc
    conn.text_factory = lambda b: b.decode("utf-8", "replace")

    matches: list[ValueMatch] = []
    try:
        for table in catalog.tables:
            for column in table.columns:
                if column.data_type is not ColumnType.TEXT:
                    continue
                try:
                    values = _distinct_column_values(conn, table.name, column.name, scan_cap)
                except sqlite3.Error:
                    continue  # schema drift between manifest and file; validator reports it
                scored = [
                    (score_match(question, value), value)
                    for value in values
                ]
                kept = sorted(
                    ((s, v) for s, v in scored if s >= threshold),
                    key=lambda pair: (-pair[0], pair[1]),
                )[:max_per_column]
                matches.extend(
                    ValueMatch(table.name, column.name, value, score) for score, value in kept
                )
    finally:
        conn.close()
    return matches
