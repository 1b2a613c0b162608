"""Candidate pooling across arms and majority voting over execution outcomes.

For each question every arm renders its prompt, samples completions, and
executes them; the pool concatenates all candidates in configuration order.
Error outcomes are filtered, survivors are grouped by canonical execution
outcome, and the largest group's earliest candidate wins.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

from .catalog import DatabaseCatalog, ExampleItem
from .execution import ErrorKind, ExecutionOutcome, OutcomeKey, canonical_key, execute, extract_sql
from .gateway import Gateway, ModelArm
from .linking import DEFAULT_MAX_PER_COLUMN, link_values
from .prompts import EMPTY_DEMOS, DemoSet, PromptDesignId, render

FALLBACK_SQL = "SELECT NULL"


@dataclass(frozen=True)
class Candidate:
    sql: str
    arm: ModelArm
    sample_index: int
    outcome: ExecutionOutcome
    pool_position: int


@dataclass(frozen=True)
class CandidatePool:
    question_id: str
    candidates: tuple[Candidate, ...]
    arms: tuple[ModelArm, ...]


@dataclass(frozen=True)
class SelectionResult:
    selected_sql: str | None
    winning_key: OutcomeKey | None
    tallies: dict[OutcomeKey, int]
    filtered_error_count: int
    total_candidates: int
    tie_broken: bool


def build_pool(
    question: ExampleItem,
    catalog: DatabaseCatalog,
    arms: list[ModelArm],
    seed: int,
    gateway: Gateway,
    timeout: float = 5.0,
    max_per_column: int = DEFAULT_MAX_PER_COLUMN,
    demos_for: Callable[[ModelArm], DemoSet] | None = None,
) -> CandidatePool:
    """Sample and execute every arm's candidates, in configuration order."""
    matches = link_values(question.question, catalog, max_per_column) if arms else []
    candidates: list[Candidate] = []
    for arm in arms:
        demos = demos_for(arm) if demos_for is not None else EMPTY_DEMOS
        prompt = render(arm.design, question, catalog, matches, demos)
        for completion in gateway.sample(arm, prompt, seed):
            if completion.failed:
                sql = ""
                outcome = ExecutionOutcome.error(
                    ErrorKind.RUNTIME, detail=f"backend failure: {completion.text}"
                )
            else:
                sql = extract_sql(
                    completion.text,
                    prefix_select=arm.design is PromptDesignId.BASELINE_DEFAULT,
                )
                outcome = execute(sql, catalog, timeout)
            candidates.append(
                Candidate(sql, arm, completion.sample_index, outcome, len(candidates))
            )
    return CandidatePool(question.example_id, tuple(candidates), tuple(arms))


def filter_errors(pool: CandidatePool) -> CandidatePool:
    """Drop error-outcome candidates; order and pool positions are preserved."""
    kept = tuple(c for c in pool.candidates if c.outcome.is_success)
    return replace(pool, candidates=kept)


def select_by_consistency(pool: CandidatePool) -> SelectionResult:
    """Majority vote over order-insensitive outcome keys.

    Ties go to the group holding the smallest pool position, and the winning
    group's earliest candidate supplies the SQL. Unfiltered pools are
    filtered here first, so the error count reflects the whole pool.
    """
    total = len(pool.candidates)
    survivors = filter_errors(pool).candidates
    filtered = total - len(survivors)

    groups: dict[OutcomeKey, list[Candidate]] = {}
    for candidate in survivors:
        key = canonical_key(candidate.outcome, order_sensitive=False)
        groups.setdefault(key, []).append(candidate)

    tallies = {key: len(members) for key, members in groups.items()}
    if not groups:
        return SelectionResult(None, None, {}, filtered, total, False)

    top = max(tallies.values())
    leaders = [key for key, count in tallies.items() if count == top]
    winning_key = min(
        leaders, key=lambda key: min(c.pool_position for c in groups[key])
    )
    winner = min(groups[winning_key], key=lambda c: c.pool_position)
    return SelectionResult(
        selected_sql=winner.sql,
        winning_key=winning_key,
        tallies=tallies,
        filtered_error_count=filtered,
        total_candidates=total,
        tie_broken=len(leaders) > 1,
    )


def run_question(
    question: ExampleItem,
    catalog: DatabaseCatalog,
    arms: list[ModelArm],
    seed: int,
    gateway: Gateway,
    timeout: float = 5.0,
    max_per_column: int = DEFAULT_MAX_PER_COLUMN,
    demos_for: Callable[[ModelArm], DemoSet] | None = None,
) -> tuple[SelectionResult, CandidatePool]:
    """Full per-question pipeline; the unfiltered pool comes back for audit."""
    pool = build_pool(question, catalog, arms, seed, gateway, timeout, max_per_column, demos_for)
    return select_by_consistency(pool), pool


def audit_records(pool: CandidatePool, result: SelectionResult) -> list[dict]:
    """One record per candidate, suitable for line-delimited audit output."""
    records = []
    winner_position = None
    if result.selected_sql is not None and result.winning_key is not None:
        for candidate in pool.candidates:
            if (
                candidate.outcome.is_success
                and canonical_key(candidate.outcome, order_sensitive=False) == result.winning_key
            ):
                winner_position = candidate.pool_position
                break
    for candidate in pool.candidates:
        key = canonical_key(candidate.outcome, order_sensitive=False)
        records.append(
            {
                "pool_position": candidate.pool_position,
                "sql": candidate.sql,
                "arm": candidate.arm.describe(),
                "sample_index": candidate.sample_index,
                "outcome_kind": candidate.outcome.kind,
                "error_kind": candidate.outcome.error_kind.value if candidate.outcome.error_kind else None,
                "outcome_key": key.key if key else None,
                "selected": candidate.pool_position == winner_position,
            }
        )
    return records
