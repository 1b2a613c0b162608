"""Command-line entry point: predict, evaluate, show-prompt, cache."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import yaml

from .catalog import DatabaseCatalog, ExampleItem, load_catalogs, load_examples
from .errors import ConfigError, SqlVoteError, UnknownDesign
from .evaluation import SuiteSpec, evaluate_file
from .gateway import (
    DEFAULT_SAMPLES,
    DEFAULT_TEMPERATURE,
    Gateway,
    ModelArm,
    ScriptedBackend,
    cache_clear,
    cache_stats,
    remote_backend,
)
from .linking import DEFAULT_MAX_PER_COLUMN, link_values
from .prompts import EMPTY_DEMOS, DemoSet, PromptDesignId, render
from .voting import FALLBACK_SQL, audit_records, run_question


@dataclass
class RunConfig:
    arms: list[ModelArm]
    seed: int
    manifest: Path
    db_dir: Path
    dataset: Path
    output: Path
    timeout: float
    fan_out: int
    audit: bool
    demo_source: Path | None
    cache_dir: Path | None
    max_per_column: int
    backends: dict[str, dict]


def load_config(path: Path | str) -> RunConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")

    base = path.parent

    def _path(key: str, required: bool = True) -> Path | None:
        value = raw.get(key)
        if value is None:
            if required:
                raise ConfigError(f"config missing '{key}'")
            return None
        candidate = Path(value)
        return candidate if candidate.is_absolute() else base / candidate

    raw_arms = raw.get("arms") or []
    if not raw_arms:
        raise ConfigError("no arms configured")
    explicit_weights = [arm.get("weight") for arm in raw_arms]
    if any(w is not None for w in explicit_weights):
        if any(w is None for w in explicit_weights):
            raise ConfigError("either all arms or no arms may set weight")
        if abs(sum(explicit_weights) - 1.0) > 1e-9:
            raise ConfigError("arm weights must sum to 1")
    arms = []
    for i, arm in enumerate(raw_arms):
        try:
            design = PromptDesignId.parse(str(arm.get("design", "concise")))
            arms.append(
                ModelArm(
                    model_id=str(arm["model"]),
                    design=design,
                    shots=int(arm.get("shots", 0)),
                    samples=int(arm.get("samples", DEFAULT_SAMPLES)),
                    temperature=float(arm.get("temperature", DEFAULT_TEMPERATURE)),
                    weight=float(explicit_weights[i] if explicit_weights[i] is not None else 1.0 / len(raw_arms)),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad arm entry {arm!r}: {exc}") from exc

    backends = raw.get("backends") or {}
    for spec in backends.values():
        directory = spec.get("dir") if isinstance(spec, dict) else None
        if directory is not None and not Path(directory).is_absolute():
            spec["dir"] = str(base / directory)
    for arm in arms:
        if arm.model_id not in backends:
            raise ConfigError(f"arm model '{arm.model_id}' has no backend entry")

    return RunConfig(
        arms=arms,
        seed=int(raw.get("seed", 0)),
        manifest=_path("manifest"),
        db_dir=_path("db_dir"),
        dataset=_path("dataset"),
        output=_path("output", required=False) or (base / "predictions.jsonl"),
        timeout=float(raw.get("timeout", 5.0)),
        fan_out=int(raw.get("fan_out", 8)),
        audit=bool(raw.get("audit", False)),
        demo_source=_path("demo_source", required=False),
        cache_dir=_path("cache_dir", required=False),
        max_per_column=int(raw.get("max_per_column", DEFAULT_MAX_PER_COLUMN)),
        backends=backends,
    )


def build_gateway(config: RunConfig) -> Gateway:
    gateway = Gateway(cache_dir=config.cache_dir)
    for model_id, spec in config.backends.items():
        kind = str(spec.get("type", "scripted"))
        if kind == "scripted":
            directory = spec.get("dir")
            if not directory:
                raise ConfigError(f"scripted backend '{model_id}' missing 'dir'")
            backend = ScriptedBackend.from_dir(Path(directory))
        elif kind == "remote":
            try:
                backend = remote_backend(
                    endpoint=str(spec["endpoint"]),
                    auth_token_env=str(spec.get("auth_token_env", "")),
                    request_timeout=float(spec.get("request_timeout", 60.0)),
                    model=model_id,
                )
            except KeyError as exc:
                raise ConfigError(f"remote backend '{model_id}' missing {exc}") from exc
        else:
            raise ConfigError(f"unknown backend type '{kind}' for '{model_id}'")
        gateway.register_backend(model_id, backend)
    return gateway


def _demo_sets(
    config: RunConfig,
    catalog_index: dict[str, DatabaseCatalog],
    shot_counts: list[int] | None = None,
) -> dict[int, DemoSet]:
    """One DemoSet per distinct shot count, built from the demo source file."""
    if shot_counts is None:
        shot_counts = sorted({arm.shots for arm in config.arms if arm.shots > 0})
    if not shot_counts:
        return {0: EMPTY_DEMOS}
    if config.demo_source is None:
        raise ConfigError("arms request shots > 0 but no demo_source configured")
    candidates = [
        item
        for item in load_examples(config.demo_source)
        if item.gold_sql and item.db_id in catalog_index
    ]
    sets: dict[int, DemoSet] = {0: EMPTY_DEMOS}
    for shots in shot_counts:
        if len(candidates) < shots:
            raise ConfigError(f"demo_source has only {len(candidates)} usable demos, need {shots}")
        chosen = candidates[:shots]
        matches = tuple(
            tuple(link_values(item.question, catalog_index[item.db_id], config.max_per_column))
            for item in chosen
        )
        sets[shots] = DemoSet(
            demos=tuple((item, item.gold_sql) for item in chosen),
            catalogs={item.db_id: catalog_index[item.db_id] for item in chosen},
            matches=matches,
        )
    return sets


def cmd_predict(config: RunConfig) -> int:
    catalogs = load_catalogs(config.manifest, config.db_dir)
    catalog_index = {c.db_id: c for c in catalogs}
    examples = load_examples(config.dataset, catalogs)
    gateway = build_gateway(config)
    demo_sets = _demo_sets(config, catalog_index)

    def demos_for(arm: ModelArm) -> DemoSet:
        return demo_sets.get(arm.shots, EMPTY_DEMOS)

    def process(example: ExampleItem):
        try:
            result, pool = run_question(
                example,
                catalog_index[example.db_id],
                config.arms,
                config.seed,
                gateway,
                timeout=config.timeout,
                max_per_column=config.max_per_column,
                demos_for=demos_for,
            )
            return example, result, pool, None
        except SqlVoteError as exc:
            return example, None, None, exc

    config.output.parent.mkdir(parents=True, exist_ok=True)
    ties = 0
    all_filtered = 0
    failures = 0
    audit_path = config.output.with_name(config.output.name + ".audit.jsonl")
    audit_handle = open(audit_path, "w", encoding="utf-8") if config.audit else None
    with open(config.output, "w", encoding="utf-8") as out:
        with ThreadPoolExecutor(max_workers=max(1, config.fan_out)) as pool_exec:
            for example, result, pool, error in pool_exec.map(process, examples):
                if error is not None:
                    failures += 1
                    sql = FALLBACK_SQL
                    print(f"{example.example_id}: FAILED ({error})", file=sys.stderr)
                else:
                    if result.tie_broken:
                        ties += 1
                    if result.selected_sql is None:
                        all_filtered += 1
                        sql = FALLBACK_SQL
                    else:
                        sql = result.selected_sql
                    if audit_handle is not None:
                        for record in audit_records(pool, result):
                            record["example_id"] = example.example_id
                            audit_handle.write(json.dumps(record, ensure_ascii=False) + "\n")
                out.write(json.dumps({"example_id": example.example_id, "sql": sql}, ensure_ascii=False) + "\n")
                print(f"{example.example_id}: done", file=sys.stderr)
    if audit_handle is not None:
        audit_handle.close()
    print(
        f"predicted {len(examples)} questions: {ties} tie-breaks, "
        f"{all_filtered} all-filtered, {failures} failures"
    )
    return 0


def cmd_evaluate(
    pred: Path,
    dataset: Path,
    db_dir: Path,
    ts: bool = False,
    suites: int = 10,
    rows: int = 50,
    seed: int = 0,
    report_path: Path | None = None,
    suite_dir: Path | None = None,
) -> int:
    spec = SuiteSpec(suite_count=suites, rows_per_table=rows, seed=seed) if ts else None
    report = evaluate_file(pred, dataset, db_dir, spec, suite_dir)
    for line in report.summary_lines():
        print(line)
    if report_path is None:
        report_path = Path(str(pred) + ".report.jsonl")
    with open(report_path, "w", encoding="utf-8") as handle:
        for score in report.per_question:
            handle.write(
                json.dumps(
                    {
                        "example_id": score.example_id,
                        "ex": score.ex,
                        "ts": score.ts,
                        "gold_error": score.gold_error,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    return 0


def cmd_show_prompt(config: RunConfig, example_id: str, design_name: str, shots: int) -> int:
    design = PromptDesignId.parse(design_name)
    catalogs = load_catalogs(config.manifest, config.db_dir)
    catalog_index = {c.db_id: c for c in catalogs}
    examples = load_examples(config.dataset, catalogs)
    by_id = {e.example_id: e for e in examples}
    if example_id not in by_id:
        raise SqlVoteError(f"unknown example '{example_id}'")
    example = by_id[example_id]
    catalog = catalog_index[example.db_id]
    matches = link_values(example.question, catalog, config.max_per_column)
    demos = EMPTY_DEMOS
    if shots > 0:
        demos = _demo_sets(config, catalog_index, [shots])[shots]
    prompt = render(design, example, catalog, matches, demos)
    sys.stdout.write(prompt.text)
    return 0


def cmd_cache(action: str, cache_dir: Path) -> int:
    if action == "stats":
        entries, total = cache_stats(cache_dir)
        print(f"entries: {entries}")
        print(f"bytes: {total}")
        return 0
    removed = cache_clear(cache_dir)
    print(f"cleared {removed} entries")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sqlvote", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_predict = sub.add_parser("predict", help="run the pipeline over a dataset")
    p_predict.add_argument("--config", required=True, type=Path)
    p_predict.add_argument("--audit", action="store_true")

    p_eval = sub.add_parser("evaluate", help="score a prediction file")
    p_eval.add_argument("--pred", required=True, type=Path)
    p_eval.add_argument("--dataset", required=True, type=Path)
    p_eval.add_argument("--db-dir", required=True, type=Path)
    p_eval.add_argument("--ts", action="store_true")
    p_eval.add_argument("--suites", type=int, default=10)
    p_eval.add_argument("--rows", type=int, default=50)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--report", type=Path, default=None)
    p_eval.add_argument("--suite-dir", type=Path, default=None)

    p_show = sub.add_parser("show-prompt", help="print one rendered prompt")
    p_show.add_argument("--config", required=True, type=Path)
    p_show.add_argument("--example", required=True)
    p_show.add_argument("--design", required=True)
    p_show.add_argument("--shots", type=int, default=0)

    p_cache = sub.add_parser("cache", help="inspect or clear the completion cache")
    p_cache.add_argument("action", choices=["stats", "clear"])
    p_cache.add_argument("--dir", required=True, type=Path)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "predict":
            config = load_config(args.config)
            if args.audit:
                config.audit = True
            return cmd_predict(config)
        if args.command == "evaluate":
            return cmd_evaluate(
                args.pred, args.dataset, args.db_dir,
                ts=args.ts, suites=args.suites, rows=args.rows, seed=args.seed,
                report_path=args.report, suite_dir=args.suite_dir,
            )
        if args.command == "show-prompt":
            config = load_config(args.config)
            return cmd_show_prompt(config, args.example, args.design, args.shots)
        if args.command == "cache":
            return cmd_cache(args.action, args.dir)
    except (SqlVoteError, UnknownDesign, OSError) as exc:
        print(str(exc), file=sys.stderr)
        return 1
    return 2


def entrypoint() -> None:
    sys.exit(main())
