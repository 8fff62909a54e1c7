"""Tool-augmented question answering harness.

A task router picks one of four prompt templates for each question, a task
solver generates under that template, and deterministic tools (an
arithmetic evaluator and a SQL engine over in-memory tables) turn tool
templates' generations into final answers, with a direct-answer backoff
when a tool call cannot be served. Includes instruction-corpus builders,
dataset loaders with deterministic splits, replayable generation backends,
and an exact-match evaluator with numeric normalization.
"""

from .calculator import calc, evaluate_expression, expression_complexity
from .datasets import (
    BudgetSpec,
    SplitSpec,
    filter_by_budget,
    load_dataset,
    split_80_10_10,
)
from .errors import ToolqaError
from .evalkit import EvalReport, exact_match, normalize_answer, render_report, score_run
from .lm_backend import (
    EchoGoldBackend,
    GenerationRequest,
    RemoteBackend,
    ReplayBackend,
    ReplayFixture,
    load_fixture,
)
from .pipeline import (
    BatchConfig,
    DispatchOutcome,
    answer_with_backoff,
    route,
    run_batch,
    solve,
)
from .sql_engine import Predicate, Query, QueryResult, execute_query, parse_sql, run_script
from .tabular import Table, coerce_numeric, parse_table, render_table
from .templates import (
    CorpusExample,
    Record,
    TemplateKind,
    build_router_corpus,
    build_solver_corpus,
    gold_template,
    parse_template_choice,
    render_prompt,
)

__version__ = "0.1.0"

__all__ = [
    "BatchConfig",
    "BudgetSpec",
    "CorpusExample",
    "DispatchOutcome",
    "EchoGoldBackend",
    "EvalReport",
    "GenerationRequest",
    "Predicate",
    "Query",
    "QueryResult",
    "Record",
    "RemoteBackend",
    "ReplayBackend",
    "ReplayFixture",
    "SplitSpec",
    "Table",
    "TemplateKind",
    "ToolqaError",
    "answer_with_backoff",
    "build_router_corpus",
    "build_solver_corpus",
    "calc",
    "coerce_numeric",
    "evaluate_expression",
    "exact_match",
    "execute_query",
    "expression_complexity",
    "filter_by_budget",
    "gold_template",
    "load_dataset",
    "load_fixture",
    "normalize_answer",
    "parse_sql",
    "parse_table",
    "parse_template_choice",
    "render_prompt",
    "render_report",
    "render_table",
    "route",
    "run_batch",
    "run_script",
    "score_run",
    "solve",
    "split_80_10_10",
]
