"""Dataset ingestion into Records, deterministic splits, and budget filtering.

Accepted source formats:

* TAT-QA: a JSON array of report blocks, each with a ``table`` (grid of
  cells, first row is the header), ``paragraphs`` and ``questions``; a
  question's ``derivation`` becomes the record derivation when non-empty.
* Wiki-SQL: line-delimited question objects carrying ``table_id`` and a
  structured ``sql`` (``sel``/``agg``/``conds``) next to a tables file
  (``<name>.tables.jsonl``) mapping ids to header/types/rows; the
  structured query is rendered into the restricted SELECT dialect.
* FPB: ``sentence@label`` lines; records get the fixed sentiment
  instruction and the label as response.
* OTT-QA: a JSON array of self-contained items with ``question``,
  ``answer-text`` (or ``answer``), an inline ``table`` object and optional
  ``passage`` text folded into the input.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import EmptyInput, SchemaMismatch, ToolqaError, UnreadableFile
from .numfmt import format_number
from .tabular import Table, infer_types, table_from_obj, table_to_obj
from .templates import Record, direct_kind, gold_template, render_prompt

FPB_INSTRUCTION = "Determine the sentiment of the following."
FPB_LABELS = ("positive", "negative", "neutral")

# Wiki-SQL structured-query vocabularies, by annotation index.
WIKISQL_AGG_OPS = ("", "MAX", "MIN", "COUNT", "SUM", "AVG")
WIKISQL_COND_OPS = ("=", ">", "<")


@dataclass(frozen=True)
class SplitSpec:
    seed: int = 13
    fractions: tuple[float, float, float] = (0.8, 0.1, 0.1)

    def __post_init__(self):
        if abs(sum(self.fractions) - 1.0) > 1e-9:
            raise ValueError("split fractions must sum to 1.0")


@dataclass(frozen=True)
class BudgetSpec:
    """Prompt-size bound in proxy units (characters of the rendered prompt)."""

    max_units: int = 4816

    def __post_init__(self):
        if self.max_units <= 0:
            raise ValueError("max_units must be positive")


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UnreadableFile(f"cannot read {path}: {exc}") from exc


def _read_json(path: str):
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"{path}: not valid JSON: {exc}") from exc


def _read_jsonl(path: str) -> list:
    objs = []
    for lineno, line in enumerate(_read_text(path).splitlines(), start=1):
        if not line.strip():
            continue
        try:
            objs.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise SchemaMismatch(f"{path}:{lineno}: not a JSON object") from exc
    return objs


def _answer_text(answer) -> str | None:
    if answer is None:
        return None
    if isinstance(answer, str):
        return answer
    if isinstance(answer, bool):
        return str(answer).lower()
    if isinstance(answer, (int, float)):
        return format_number(answer)
    if isinstance(answer, list):
        parts = [_answer_text(a) for a in answer]
        if not parts:
            return None
        return ", ".join(parts)
    raise SchemaMismatch(f"unsupported answer value {answer!r}")


def _grid_table(grid) -> Table:
    if not isinstance(grid, list) or not grid or not all(isinstance(r, list) for r in grid):
        raise SchemaMismatch("table grid must be a non-empty array of rows")
    header = [str(c) for c in grid[0]]
    rows = [[c if isinstance(c, str) else format_number(c) for c in row]
            for row in grid[1:]]
    return Table(header=header, rows=rows, col_types=infer_types(header, rows))


def _load_tatqa(path: str) -> list[Record]:
    blocks = _read_json(path)
    if not isinstance(blocks, list):
        raise SchemaMismatch(f"{path}: expected a JSON array of report blocks")
    records = []
    for block in blocks:
        try:
            table = _grid_table(block["table"]["table"])
            paragraphs = sorted(block.get("paragraphs", []),
                                key=lambda p: p.get("order", 0))
            passage = " ".join(p["text"].strip() for p in paragraphs) or None
            for q in block["questions"]:
                derivation = (q.get("derivation") or "").strip() or None
                response = _answer_text(q.get("answer"))
                records.append(Record(
                    instruction=q["question"],
                    input=passage,
                    data=table,
                    derivation=derivation,
                    response=response,
                    dataset_tag="tatqa",
                ))
        except (KeyError, TypeError, ValueError, ToolqaError) as exc:
            raise SchemaMismatch(f"{path}: bad TAT-QA block: {exc}") from exc
    if not records:
        raise SchemaMismatch(f"{path}: no records found")
    return records


def _quote_sql_string(value: str) -> str:
    return "'" + value.replace("'", "''") + "'"


def wikisql_query_text(sql_obj: dict, header: list[str]) -> str:
    """Render a Wiki-SQL structured query into the SELECT dialect."""
    try:
        sel = sql_obj["sel"]
        agg = WIKISQL_AGG_OPS[sql_obj["agg"]]
        conds = sql_obj.get("conds", [])
        projection = f"[{header[sel]}]"
    except (KeyError, IndexError, TypeError) as exc:
        raise SchemaMismatch(f"bad Wiki-SQL sql object: {exc}") from exc
    select = f"{agg}({projection})" if agg else projection
    text = f"SELECT {select} FROM data_table"
    rendered = []
    for cond in conds:
        try:
            col_idx, op_idx, value = cond
            column = f"[{header[col_idx]}]"
            op = WIKISQL_COND_OPS[op_idx]
        except (ValueError, IndexError, TypeError) as exc:
            raise SchemaMismatch(f"bad Wiki-SQL condition {cond!r}: {exc}") from exc
        if isinstance(value, str):
            if op == "=":
                rendered.append(f"LOWER({column}) = LOWER({_quote_sql_string(value)})")
            else:
                rendered.append(f"{column} {op} {_quote_sql_string(value)}")
        elif isinstance(value, (int, float)) and not isinstance(value, bool):
            rendered.append(f"{column} {op} {format_number(value)}")
        else:
            raise SchemaMismatch(f"bad Wiki-SQL condition value {value!r}")
    if rendered:
        text += " WHERE " + " AND ".join(rendered)
    return text


def default_wikisql_tables_path(path: str) -> str:
    if path.endswith(".jsonl"):
        return path[: -len(".jsonl")] + ".tables.jsonl"
    return path + ".tables.jsonl"


def _load_wikisql(path: str, tables_path: str | None) -> list[Record]:
    tables_path = tables_path or default_wikisql_tables_path(path)
    tables = {}
    for obj in _read_jsonl(tables_path):
        try:
            tables[obj["id"]] = table_from_obj({
                "header": [str(h) for h in obj["header"]],
                "rows": obj["rows"],
                "types": obj.get("types"),
                "caption": obj.get("caption"),
            })
        except (KeyError, TypeError, ToolqaError) as exc:
            raise SchemaMismatch(f"{tables_path}: bad table object: {exc}") from exc
    records = []
    for obj in _read_jsonl(path):
        try:
            table = tables[obj["table_id"]]
            derivation = wikisql_query_text(obj["sql"], list(table.header))
            records.append(Record(
                instruction=obj["question"],
                data=table,
                derivation=derivation,
                dataset_tag="wikisql",
            ))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaMismatch(f"{path}: bad Wiki-SQL item: {exc}") from exc
    if not records:
        raise SchemaMismatch(f"{path}: no records found")
    return records


def _load_fpb(path: str) -> list[Record]:
    records = []
    for lineno, line in enumerate(_read_text(path).splitlines(), start=1):
        if not line.strip():
            continue
        sentence, sep, label = line.rpartition("@")
        label = label.strip().casefold()
        if not sep or not sentence.strip() or label not in FPB_LABELS:
            raise SchemaMismatch(f"{path}:{lineno}: expected 'sentence@label'")
        records.append(Record(
            instruction=FPB_INSTRUCTION,
            input=sentence.strip(),
            response=label,
            dataset_tag="fpb",
        ))
    if not records:
        raise SchemaMismatch(f"{path}: no records found")
    return records


def _load_ottqa(path: str) -> list[Record]:
    items = _read_json(path)
    if not isinstance(items, list):
        raise SchemaMismatch(f"{path}: expected a JSON array of items")
    records = []
    for item in items:
        try:
            answer = item.get("answer-text", item.get("answer"))
            passage = item.get("passage", item.get("context"))
            records.append(Record(
                instruction=item["question"],
                input=passage,
                data=table_from_obj(item["table"]),
                response=_answer_text(answer),
                dataset_tag="ottqa",
            ))
        except (KeyError, TypeError, ValueError, ToolqaError) as exc:
            raise SchemaMismatch(f"{path}: bad OTT-QA item: {exc}") from exc
    if not records:
        raise SchemaMismatch(f"{path}: no records found")
    return records


_LOADERS = {"tatqa": _load_tatqa, "fpb": _load_fpb, "ottqa": _load_ottqa}


def load_dataset(tag: str, path: str, *, tables_path: str | None = None) -> list[Record]:
    """Load one source file (plus the tables file for wikisql) into Records."""
    if tag == "wikisql":
        return _load_wikisql(path, tables_path)
    loader = _LOADERS.get(tag)
    if loader is None:
        raise ValueError(f"unknown dataset tag {tag!r}")
    return loader(path)


def split_80_10_10(records: list[Record],
                   spec: SplitSpec = SplitSpec()) -> tuple[list[Record], list[Record], list[Record]]:
    """Deterministic disjoint train/dev/test partition.

    Dev and test get floor(n * fraction) records each; the remainder goes
    to train. Same records and seed always give the same partition.
    """
    if not records:
        raise EmptyInput("cannot split an empty record list")
    order = list(records)
    random.Random(spec.seed).shuffle(order)
    n = len(order)
    _, f_dev, f_test = (Fraction(str(f)) for f in spec.fractions)
    n_dev = int(n * f_dev)
    n_test = int(n * f_test)
    n_train = n - n_dev - n_test
    return (order[:n_train],
            order[n_train:n_train + n_dev],
            order[n_train + n_dev:])


def prompt_units(r: Record) -> int:
    """Size of the rendered gold-template prompt, in proxy units."""
    try:
        kind = gold_template(r)
    except ToolqaError:
        kind = direct_kind(r)
    return len(render_prompt(kind, r))


def filter_by_budget(records: list[Record],
                     b: BudgetSpec = BudgetSpec()) -> list[Record]:
    """Keep records whose rendered gold prompt fits the budget, in order."""
    return [r for r in records if prompt_units(r) <= b.max_units]


# -- normalized record files ---------------------------------------------------

def record_to_obj(r: Record) -> dict:
    return {
        "instruction": r.instruction,
        "input": r.input,
        "data": table_to_obj(r.data) if r.data is not None else None,
        "derivation": r.derivation,
        "response": r.response,
        "dataset_tag": r.dataset_tag,
    }


def record_from_obj(obj: dict) -> Record:
    try:
        data = obj.get("data")
        return Record(
            instruction=obj["instruction"],
            input=obj.get("input"),
            data=table_from_obj(data) if data is not None else None,
            derivation=obj.get("derivation"),
            response=obj.get("response"),
            dataset_tag=obj.get("dataset_tag"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaMismatch(f"bad record object: {exc}") from exc


def save_records(records: list[Record], path: str):
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(record_to_obj(r), ensure_ascii=False) + "\n")


def load_records(path: str) -> list[Record]:
    return [record_from_obj(obj) for obj in _read_jsonl(path)]
