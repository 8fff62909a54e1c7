"""Command-line surface: prepare, infer, evaluate, tools.

Configuration is a key=value text file with flag overrides; the remote
credential comes only from the environment. Exit codes: 0 success, 1 usage
error, 2 data error, 3 transport error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import datasets, evalkit, lm_backend, pipeline
from .calculator import calc
from .errors import ToolqaError, TransportError
from .sql_engine import run_script

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_TRANSPORT = 3

_SPLITS = ("train", "dev", "test")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def read_config(path: str) -> dict[str, str]:
    """key=value lines; '#' starts a comment; later keys win."""
    config = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value")
                key, _, value = line.partition("=")
                config[key.strip()] = value.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    return config


def _settings(args) -> dict[str, str]:
    config = read_config(args.config) if args.config else {}
    for key in ("seed", "out_dir", "backend", "max_in_flight", "fixture",
                "budget", "budget_order", "base_url", "model_name", "timeout_s"):
        value = getattr(args, key, None)
        if value is not None:
            config[key] = str(value)
    if getattr(args, "no_backoff", False):
        config["backoff"] = "false"
    return config


def _out_dir(config) -> str:
    out = config.get("out_dir", "out")
    os.makedirs(out, exist_ok=True)
    return out


def _build_backend(config, records):
    kind = config.get("backend", "echo-gold")
    if kind == "echo-gold":
        return lm_backend.EchoGoldBackend(records)
    if kind == "replay":
        fixture_path = config.get("fixture")
        if not fixture_path:
            raise UsageError("replay backend needs fixture=<path>")
        return lm_backend.ReplayBackend(lm_backend.load_fixture(fixture_path))
    if kind == "remote":
        base_url = config.get("base_url")
        model_name = config.get("model_name")
        if not base_url or not model_name:
            raise UsageError("remote backend needs base_url= and model_name=")
        return lm_backend.RemoteBackend(
            base_url, model_name,
            timeout_s=float(config.get("timeout_s", "60")),
            max_in_flight=int(config.get("max_in_flight", "4")),
        )
    raise UsageError(f"unknown backend {kind!r}")


# -- prepare -------------------------------------------------------------------

def _dataset_sources(config) -> list[tuple[str, str, str | None, str | None]]:
    """(tag, path, tables_path, fixed_split) tuples from the configuration."""
    sources = []
    for tag in ("tatqa", "fpb", "ottqa"):
        if config.get(tag):
            sources.append((tag, config[tag], None, None))
    for split in _SPLITS:
        data_key = f"wikisql_{split}_data"
        if config.get(data_key):
            sources.append(("wikisql", config[data_key],
                            config.get(f"wikisql_{split}_tables"), split))
    return sources


def cmd_prepare(args) -> int:
    config = _settings(args)
    sources = _dataset_sources(config)
    if not sources:
        raise UsageError("no dataset paths configured")
    seed = int(config.get("seed", "13"))
    budget = datasets.BudgetSpec(max_units=int(config.get("budget", "4816")))
    budget_order = config.get("budget_order", "after")
    if budget_order not in ("before", "after", "off"):
        raise UsageError("budget_order must be before, after or off")

    per_tag_splits: dict[str, dict[str, list]] = {}
    active_splits: dict[str, set[str]] = {}
    for tag, path, tables_path, fixed_split in sources:
        records = datasets.load_dataset(tag, path, tables_path=tables_path)
        if budget_order == "before":
            records = datasets.filter_by_budget(records, budget)
        if fixed_split is not None:
            splits = per_tag_splits.setdefault(
                tag, {"train": [], "dev": [], "test": []})
            splits[fixed_split].extend(records)
            active_splits.setdefault(tag, set()).add(fixed_split)
        else:
            if records:
                train, dev, test = datasets.split_80_10_10(
                    records, datasets.SplitSpec(seed=seed))
            else:
                train, dev, test = [], [], []
            per_tag_splits[tag] = {"train": train, "dev": dev, "test": test}
            active_splits[tag] = set(_SPLITS)

    if budget_order == "after":
        for splits in per_tag_splits.values():
            for name in _SPLITS:
                splits[name] = datasets.filter_by_budget(splits[name], budget)

    out = _out_dir(config)
    manifest_path = os.path.join(out, "manifest.jsonl")
    with open(manifest_path, "w", encoding="utf-8") as manifest:
        for tag in sorted(per_tag_splits):
            splits = per_tag_splits[tag]
            for name in _SPLITS:
                if name not in active_splits[tag]:
                    continue
                records = splits[name]
                datasets.save_records(
                    records, os.path.join(out, f"records_{tag}_{name}.jsonl"))
                for i in range(len(records)):
                    manifest.write(json.dumps(
                        {"dataset": tag, "split": name, "index": i}) + "\n")
            print(f"{tag}: " + ", ".join(
                f"{name}={len(splits[name])}" for name in _SPLITS))

    if args.emit_corpora:
        train_records = []
        for tag in sorted(per_tag_splits):
            train_records.extend(per_tag_splits[tag]["train"])
        if train_records:
            from .templates import build_router_corpus, build_solver_corpus

            solver = build_solver_corpus(train_records)
            router = build_router_corpus(train_records)
            lm_backend.save_fixture_lines(
                ((e.prompt, e.completion) for e in solver),
                os.path.join(out, "solver_corpus.jsonl"))
            lm_backend.save_fixture_lines(
                ((e.prompt, e.completion) for e in router),
                os.path.join(out, "router_corpus.jsonl"))
            print(f"corpora: solver={len(solver)}, router={len(router)}")
    return EXIT_OK


# -- infer ---------------------------------------------------------------------

def cmd_infer(args) -> int:
    config = _settings(args)
    records = datasets.load_records(args.records)
    backend = _build_backend(config, records)
    batch = pipeline.BatchConfig(
        max_in_flight=int(config.get("max_in_flight", "1")),
        backoff_enabled=config.get("backoff", "true").lower() != "false",
    )
    outcomes = pipeline.run_batch(records, backend, batch)
    out = _out_dir(config)
    outcome_path = args.out or os.path.join(out, "outcomes.jsonl")
    with open(outcome_path, "w", encoding="utf-8") as fh:
        for outcome in outcomes:
            fh.write(json.dumps(outcome.to_obj(), ensure_ascii=False) + "\n")
    errors = sum(1 for o in outcomes if o.error is not None)
    print(f"{len(outcomes)} outcomes ({errors} with errors) -> {outcome_path}")
    if any(o.error and o.error.startswith("TransportError") for o in outcomes):
        print("transport errors occurred; see the outcome file", file=sys.stderr)
        return EXIT_TRANSPORT
    return EXIT_OK


# -- evaluate ------------------------------------------------------------------

def cmd_evaluate(args) -> int:
    config = _settings(args)
    records = datasets.load_records(args.records)
    outcomes = []
    for obj in _read_outcome_file(args.outcomes):
        outcomes.append(pipeline.DispatchOutcome.from_obj(obj))
    report = evalkit.score_run(outcomes, records)
    out = _out_dir(config)
    text = evalkit.render_report(report)
    with open(os.path.join(out, "report.txt"), "w", encoding="utf-8") as fh:
        fh.write(text)
    with open(os.path.join(out, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(report.to_obj(), fh, indent=2)
        fh.write("\n")
    print(text, end="")
    return EXIT_OK


def _read_outcome_file(path: str) -> list[dict]:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ToolqaError(f"cannot read outcomes {path}: {exc}") from exc
    objs = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            objs.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise ToolqaError(f"{path}:{lineno}: not a JSON object") from exc
    return objs


# -- tools ---------------------------------------------------------------------

def cmd_tools(args) -> int:
    if args.tool == "calc":
        print(calc(args.expression))
        return EXIT_OK
    table_text = None
    try:
        with open(args.table, encoding="utf-8") as fh:
            table_text = fh.read()
    except OSError as exc:
        raise ToolqaError(f"cannot read table {args.table}: {exc}") from exc
    print(run_script(args.query, table_text))
    return EXIT_OK


# -- entry point ---------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="toolqa",
                     description="tool-augmented question answering harness")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_shared(p):
        p.add_argument("--config", help="key=value configuration file")
        p.add_argument("--seed", type=int, help="split seed")
        p.add_argument("--out-dir", dest="out_dir", help="output directory")
        p.add_argument("--backend", choices=("remote", "replay", "echo-gold"))
        p.add_argument("--fixture", help="replay fixture path")
        p.add_argument("--no-backoff", action="store_true",
                       help="disable the tool-failure fallback")
        p.add_argument("--max-in-flight", dest="max_in_flight", type=int)

    prepare = sub.add_parser("prepare", help="load, split and normalize datasets")
    add_shared(prepare)
    prepare.add_argument("--budget", type=int, help="prompt budget in characters")
    prepare.add_argument("--budget-order", dest="budget_order",
                         choices=("before", "after", "off"),
                         help="apply the budget filter before or after splitting")
    prepare.add_argument("--emit-corpora", action="store_true",
                         help="also write solver and router corpus files")
    prepare.set_defaults(func=cmd_prepare)

    infer = sub.add_parser("infer", help="run routing, solving and tools")
    add_shared(infer)
    infer.add_argument("--records", required=True, help="normalized record file")
    infer.add_argument("--out", help="outcome file path")
    infer.set_defaults(func=cmd_infer)

    evaluate = sub.add_parser("evaluate", help="score an outcome file")
    add_shared(evaluate)
    evaluate.add_argument("--outcomes", required=True, help="outcome file")
    evaluate.add_argument("--records", required=True, help="normalized record file")
    evaluate.set_defaults(func=cmd_evaluate)

    tools = sub.add_parser("tools", help="invoke a tool directly")
    tool_sub = tools.add_subparsers(dest="tool", required=True)
    calc_p = tool_sub.add_parser("calc", help="evaluate an arithmetic expression")
    calc_p.add_argument("expression")
    calc_p.set_defaults(func=cmd_tools)
    sql_p = tool_sub.add_parser("sql", help="run a SQL script on a table file")
    sql_p.add_argument("--table", required=True, help="serialized table file")
    sql_p.add_argument("--query", required=True, help="SQL script")
    sql_p.set_defaults(func=cmd_tools)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TransportError as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except ToolqaError as exc:
        print(f"{exc.tag()}: {exc.message}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
