"""Acceptance suite.

Each test covers one acceptance criterion at its stated tolerance and
prints one pass/fail line; run with ``pytest tests/test_acceptance.py -v -s``
to see the lines inline.
"""

import random
import time
from contextlib import contextmanager
from fractions import Fraction

from toolqa.calculator import calc, evaluate_expression
from toolqa.datasets import SplitSpec, load_dataset, split_80_10_10
from toolqa.errors import NoRows, TypeMismatch, UnknownColumn
from toolqa.evalkit import exact_match, gold_answer, score_run
from toolqa.lm_backend import (
    EchoGoldBackend,
    GenerationRequest,
    ReplayBackend,
    ReplayFixture,
    load_fixture,
    save_fixture_lines,
)
from toolqa.pipeline import BatchConfig, run_batch
from toolqa.sql_engine import execute_query, run_script
from toolqa.templates import (
    Record,
    TemplateKind,
    build_router_corpus,
    gold_template,
    render_prompt,
)

from datagen import make_fpb_file, make_ottqa_file, make_tatqa_file, make_wikisql_files
from oracles import oracle_eval, oracle_execute, random_ast, random_query, random_table, render_ast
from sample_data import (
    DENSITY_RECORD,
    HEDGE_RECORD,
    VENUE_SQL,
    VENUE_TABLE_TEXT,
)


@contextmanager
def criterion(number: int, name: str):
    try:
        yield
    except BaseException:
        print(f"[criterion {number}] {name}: FAIL")
        raise
    print(f"[criterion {number}] {name}: PASS")


def test_criterion_1_sql_oracle_equivalence():
    with criterion(1, "SQL engine matches naive row-scan oracle on 200 random tables"):
        rng = random.Random(20240901)
        start = time.perf_counter()
        mismatches = 0
        for _ in range(200):
            table = random_table(rng, max_cols=10, max_rows=50)
            query = random_query(rng, table)
            expected = oracle_execute(query, table)
            try:
                result = execute_query(query, table)
                if result.kind == "number":
                    got = ("ok", ("number", Fraction(result.number)))
                elif result.kind == "text":
                    got = ("ok", ("text", result.text))
                else:
                    got = ("ok", ("list", result.values))
            except (NoRows, TypeMismatch, UnknownColumn) as exc:
                got = ("error", type(exc).__name__)
            if got != expected:
                mismatches += 1
        elapsed = time.perf_counter() - start
        assert mismatches == 0
        assert elapsed < 5.0, f"took {elapsed:.2f}s"


def test_criterion_2_calculator_oracle_equivalence():
    with criterion(2, "calculator matches exact rational oracle on 1,000 expressions"):
        rng = random.Random(20240902)
        tolerance = Fraction(1, 10**9)
        start = time.perf_counter()
        for _ in range(1000):
            ast = random_ast(rng, depth=4)
            expected = oracle_eval(ast)
            got = evaluate_expression(render_ast(ast, rng))
            assert abs(got - expected) <= tolerance * max(1, abs(expected))
        elapsed = time.perf_counter() - start
        assert elapsed < 1.0, f"took {elapsed:.2f}s"


def test_criterion_3_anchored_tool_cases():
    with criterion(3, "anchored calculator and SQL cases"):
        assert run_script(VENUE_SQL, VENUE_TABLE_TEXT) == "5000"
        assert calc("0.74-2.06") == "-1.32"
        got = Fraction(calc("578,806/24,500"))
        expected = Fraction("23.6247346939")
        assert abs(got - expected) <= Fraction(1, 10**9) * expected


def _load_fixture_records(tmp_path, per_dataset=55):
    tatqa = tmp_path / "tatqa.json"
    fpb = tmp_path / "fpb.txt"
    ottqa = tmp_path / "ottqa.json"
    ws_data = tmp_path / "ws.jsonl"
    make_tatqa_file(tatqa, per_dataset, seed=11)
    make_fpb_file(fpb, per_dataset, seed=12)
    make_ottqa_file(ottqa, per_dataset, seed=13)
    make_wikisql_files(ws_data, tmp_path / "ws.tables.jsonl", per_dataset, seed=14)
    records = []
    records += load_dataset("tatqa", str(tatqa))
    records += load_dataset("fpb", str(fpb))
    records += load_dataset("ottqa", str(ottqa))
    records += load_dataset("wikisql", str(ws_data))
    return records


def test_criterion_4_end_to_end_echo_gold(tmp_path):
    with criterion(4, "end-to-end echo-gold run scores 100% with zero backoffs"):
        records = _load_fixture_records(tmp_path)
        per_tag = {}
        for r in records:
            per_tag[r.dataset_tag] = per_tag.get(r.dataset_tag, 0) + 1
        assert all(count >= 50 for count in per_tag.values())
        assert set(per_tag) == {"tatqa", "fpb", "ottqa", "wikisql"}

        start = time.perf_counter()
        backend = EchoGoldBackend(records)
        outcomes = run_batch(records, backend, BatchConfig(max_in_flight=4))
        report = score_run(outcomes, records)
        elapsed = time.perf_counter() - start

        for tag in ("tatqa", "fpb", "ottqa", "wikisql"):
            assert report.per_dataset_accuracy[tag] == 1.0, tag
            assert report.router_accuracy[tag] == 1.0, tag
        assert report.backoff_usage == 0.0
        assert all(not o.used_backoff for o in outcomes)
        assert elapsed < 10.0, f"took {elapsed:.2f}s"


def test_criterion_5_backoff_monotonicity(tmp_path):
    with criterion(5, "injecting k malformed tool completions flips exactly k "
                      "outcomes to backoff and never lowers accuracy"):
        records = _load_fixture_records(tmp_path, per_dataset=25)
        gold_backend = EchoGoldBackend(records)

        tool_records = [r for r in records if gold_template(r) in
                        (TemplateKind.ARITHMETIC, TemplateKind.SCRIPT)]
        k = 9
        corrupted = tool_records[:k]
        assert len(corrupted) == k

        fixture = ReplayFixture()
        fixture.entries.update(gold_backend.fixture.entries)
        for r in corrupted:
            kind = gold_template(r)
            bad = "1/0" if kind is TemplateKind.ARITHMETIC else "SELEKT"
            fixture.put(render_prompt(kind, r), bad)
            fallback = (TemplateKind.INFORMATION_EXTRACTION if r.data is not None
                        else TemplateKind.CLASSIFICATION)
            fixture.put(render_prompt(fallback, r), gold_answer(r))
        backend = ReplayBackend(fixture)

        with_backoff = run_batch(records, backend, BatchConfig(backoff_enabled=True))
        without_backoff = run_batch(records, backend, BatchConfig(backoff_enabled=False))

        assert sum(o.used_backoff for o in with_backoff) == k
        flipped = [i for i, (a, b) in enumerate(zip(with_backoff, without_backoff))
                   if a.used_backoff and not b.used_backoff]
        assert len(flipped) == k

        report_with = score_run(with_backoff, records)
        report_without = score_run(without_backoff, records)
        for tag in report_with.per_dataset_accuracy:
            assert report_with.per_dataset_accuracy[tag] >= \
                report_without.per_dataset_accuracy[tag]

        def correct_indexes(outcomes):
            marked = set()
            for i, (outcome, record) in enumerate(zip(outcomes, records)):
                gold = gold_answer(record)
                if outcome.final_answer is not None and gold is not None \
                        and exact_match(outcome.final_answer, gold):
                    marked.add(i)
            return marked

        assert correct_indexes(without_backoff) <= correct_indexes(with_backoff)
        # the injected failures actually lowered the no-backoff score
        assert len(correct_indexes(without_backoff)) == len(records) - k
        assert len(correct_indexes(with_backoff)) == len(records)


def test_criterion_6_normalization_fixtures():
    with criterion(6, "prescribed normalization equivalences"):
        assert exact_match("$4 million", "$4,000,000")
        assert exact_match("0.24", "24%")
        assert not exact_match("$480 million", "$480")


def test_criterion_7_data_statistics(tmp_path):
    with criterion(7, "official-format test split loads 1,536 records; "
                      "100 records split 80/10/10 deterministically"):
        data = tmp_path / "test.jsonl"
        make_wikisql_files(data, tmp_path / "test.tables.jsonl", 1536, seed=15)
        records = load_dataset("wikisql", str(data))
        assert len(records) == 1536

        synthetic = [Record(instruction=f"q{i}", response=f"a{i}", dataset_tag="fpb")
                     for i in range(100)]
        first = split_80_10_10(synthetic, SplitSpec(seed=13))
        second = split_80_10_10(synthetic, SplitSpec(seed=13))
        assert tuple(len(part) for part in first) == (80, 10, 10)
        assert first == second


def test_criterion_8_router_corpus_fidelity(tmp_path):
    with criterion(8, "router corpus emits the exact choice preambles and "
                      "replays by prompt digest"):
        examples = build_router_corpus([HEDGE_RECORD, DENSITY_RECORD])
        assert [e.completion for e in examples] == ["arithmetic", "script"]
        assert examples[0].prompt.startswith(
            "Here is a instruction, input and data detailing a task. "
            "Which template is best suited to fulfil this inquiry.\n\n")
        assert examples[1].prompt.startswith(
            "Here is a instruction and data detailing a task. "
            "Which template is best suited to fulfil this inquiry.\n\n")
        assert examples[0].prompt.endswith("### Template:\n")

        fixture_path = tmp_path / "router_fixture.jsonl"
        save_fixture_lines([(e.prompt, e.completion) for e in examples],
                           str(fixture_path))
        backend = ReplayBackend(load_fixture(str(fixture_path)))
        for record, expected in ((HEDGE_RECORD, "arithmetic"),
                                 (DENSITY_RECORD, "script")):
            prompt = render_prompt(TemplateKind.TEMPLATE_CHOICE, record)
            assert backend.generate(GenerationRequest(prompt=prompt)) == expected
