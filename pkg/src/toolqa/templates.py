"""Prompt templates, gold template labeling, and instruction-corpus building.

Five templates exist: four task templates (arithmetic, classification,
script, information extraction) plus the template-choice prompt that the
router answers with one of the four task names. Preambles adapt to which
record attributes are present; section markers are fixed byte-for-byte so
that prompt digests are stable across runs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from . import calculator, sql_engine
from .errors import (
    AmbiguousDerivation,
    MissingAttribute,
    ToolqaError,
    UnknownTemplate,
)
from .tabular import Table, render_table


class TemplateKind(Enum):
    ARITHMETIC = "arithmetic"
    CLASSIFICATION = "classification"
    SCRIPT = "script"
    INFORMATION_EXTRACTION = "information extraction"
    TEMPLATE_CHOICE = "template choice"

    @property
    def label(self) -> str:
        return self.value


ROUTABLE_KINDS = (
    TemplateKind.ARITHMETIC,
    TemplateKind.CLASSIFICATION,
    TemplateKind.SCRIPT,
    TemplateKind.INFORMATION_EXTRACTION,
)

DATASET_TAGS = ("tatqa", "fpb", "wikisql", "ottqa")


@dataclass(frozen=True)
class Record:
    """Normalized dataset example.

    The instruction and at least one of derivation or response are
    mandatory; input, data and the other of derivation/response are
    included when the source dataset provides them.
    """

    instruction: str
    input: str | None = None
    data: Table | None = None
    derivation: str | None = None
    response: str | None = None
    dataset_tag: str | None = None

    def __post_init__(self):
        if self.derivation is None and self.response is None:
            raise ValueError("record needs a derivation or a response")
        if self.dataset_tag is not None and self.dataset_tag not in DATASET_TAGS:
            raise ValueError(f"unknown dataset tag {self.dataset_tag!r}")


@dataclass(frozen=True)
class CorpusExample:
    prompt: str
    completion: str

    def __post_init__(self):
        if not self.completion:
            raise ValueError("corpus completions must be non-empty")


# Task sentences, one per template kind.
_TASK_SENTENCE = {
    TemplateKind.ARITHMETIC: "Formulate an arithmetic equation to generate the answer.",
    TemplateKind.CLASSIFICATION: "Write a response that appropriately completes the request.",
    TemplateKind.SCRIPT: "Compose an SQL script capable of being run on the data to generate the solution.",
    TemplateKind.INFORMATION_EXTRACTION: "Provide a suitable reply that effectively fulfills the inquiry.",
    TemplateKind.TEMPLATE_CHOICE: "Which template is best suited to fulfil this inquiry.",
}

# Context clauses for the "Below is an instruction ..." openers, keyed by
# (has_input, has_data).
_DESCRIBES_CONTEXT = {
    (True, True): ", coupled with input and data providing additional context",
    (True, False): ", paired with an input that provides further context",
    (False, True): ", coupled with contextual data",
    (False, False): "",
}

# Context clauses for the "Here is a instruction ..." openers. The odd
# article is intentional: prompts must match the trained distribution.
_DETAILING_CONTEXT = {
    (True, True): ", accompanied by input and data providing additional context",
    (True, False): ", accompanied by input providing additional context",
    (False, True): ", accompanied by data providing additional context",
    (False, False): "",
}

_CHOICE_SUBJECT = {
    (True, True): "a instruction, input and data",
    (True, False): "a instruction and input",
    (False, True): "a instruction and data",
    (False, False): "a instruction",
}

_TERMINAL_HEADER = {
    TemplateKind.ARITHMETIC: "### Equation:",
    TemplateKind.CLASSIFICATION: "### Response:",
    TemplateKind.SCRIPT: "### SQL:",
    TemplateKind.INFORMATION_EXTRACTION: "### Response:",
    TemplateKind.TEMPLATE_CHOICE: "### Template:",
}

_DATA_BEARING = (TemplateKind.SCRIPT, TemplateKind.INFORMATION_EXTRACTION)


def preamble(kind: TemplateKind, has_input: bool, has_data: bool) -> str:
    """The exact first paragraph for a template and attribute combination."""
    key = (has_input, has_data)
    task = _TASK_SENTENCE[kind]
    if kind in (TemplateKind.ARITHMETIC, TemplateKind.CLASSIFICATION, TemplateKind.SCRIPT):
        return f"Below is an instruction that describes a task{_DESCRIBES_CONTEXT[key]}. {task}"
    if kind is TemplateKind.INFORMATION_EXTRACTION:
        return f"Here is a instruction detailing a task{_DETAILING_CONTEXT[key]}. {task}"
    return f"Here is {_CHOICE_SUBJECT[key]} detailing a task. {task}"


def render_prompt(kind: TemplateKind, r: Record) -> str:
    """Render the full prompt for a record, ending at the completion header."""
    if kind in _DATA_BEARING and r.data is None:
        raise MissingAttribute(f"{kind.label} template requires a data table")
    parts = [preamble(kind, r.input is not None, r.data is not None)]
    parts.append(f"### Instruction:\n{r.instruction}")
    if r.input is not None:
        parts.append(f"### Input:\n{r.input}")
    if r.data is not None:
        parts.append(f"### Data:\n{render_table(r.data)}")
    parts.append(_TERMINAL_HEADER[kind] + "\n")
    return "\n\n".join(parts)


def _parses_as_sql(text: str) -> bool:
    try:
        sql_engine.parse_sql(text)
        return True
    except ToolqaError:
        return False


def _parses_as_arithmetic(text: str) -> bool:
    try:
        calculator.parse_expression(text)
        return True
    except ToolqaError:
        return False


_TAG_FALLBACK = {"wikisql": TemplateKind.SCRIPT, "tatqa": TemplateKind.ARITHMETIC}


def gold_template(r: Record) -> TemplateKind:
    """Gold task template for a record.

    Grammar probing decides: a derivation that parses as SQL labels Script,
    one that parses as arithmetic labels Arithmetic. When probing is
    inconclusive the dataset tag breaks the tie; records without a
    derivation label by whether structured data is present.
    """
    if r.derivation is not None:
        is_sql = _parses_as_sql(r.derivation)
        is_arith = _parses_as_arithmetic(r.derivation)
        if is_sql and not is_arith:
            return TemplateKind.SCRIPT
        if is_arith and not is_sql:
            return TemplateKind.ARITHMETIC
        fallback = _TAG_FALLBACK.get(r.dataset_tag or "")
        if fallback is not None:
            return fallback
        raise AmbiguousDerivation(
            f"derivation fits {'both grammars' if is_sql else 'neither grammar'}: "
            f"{r.derivation!r}"
        )
    if r.data is not None:
        return TemplateKind.INFORMATION_EXTRACTION
    return TemplateKind.CLASSIFICATION


def direct_kind(r: Record) -> TemplateKind:
    """The direct-answer template for a record: information extraction when
    structured data is present, classification otherwise."""
    if r.data is not None:
        return TemplateKind.INFORMATION_EXTRACTION
    return TemplateKind.CLASSIFICATION


def gold_completion(r: Record, kind: TemplateKind | None = None) -> str:
    """The solver-side gold output: the derivation for tool templates,
    otherwise the response."""
    kind = kind or gold_template(r)
    if kind in (TemplateKind.ARITHMETIC, TemplateKind.SCRIPT):
        return r.derivation
    return r.response


def build_solver_corpus(records: list[Record]) -> list[CorpusExample]:
    """One prompt/completion pair per record, under its gold template."""
    examples = []
    for r in records:
        kind = gold_template(r)
        examples.append(CorpusExample(
            prompt=render_prompt(kind, r),
            completion=gold_completion(r, kind),
        ))
    return examples


def build_router_corpus(records: list[Record]) -> list[CorpusExample]:
    """Template-choice prompt per record; completion is the template name."""
    examples = []
    for r in records:
        kind = gold_template(r)
        examples.append(CorpusExample(
            prompt=render_prompt(TemplateKind.TEMPLATE_CHOICE, r),
            completion=kind.label,
        ))
    return examples


_BY_LABEL = {k.label: k for k in ROUTABLE_KINDS}


def parse_template_choice(model_output: str) -> TemplateKind:
    """Map router output to a template kind; exact normalized match only."""
    normalized = re.sub(r"\s+", " ", model_output.strip())
    normalized = normalized.rstrip(".!?,;:").rstrip().casefold()
    kind = _BY_LABEL.get(normalized)
    if kind is None:
        raise UnknownTemplate(f"not a template name: {model_output!r}")
    return kind
