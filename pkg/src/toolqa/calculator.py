"""Arithmetic expression tool: a closed grammar, parsed and evaluated exactly.

Grammar (standard precedence, left associativity):

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | primary
    primary := NUMBER | '(' expr ')'
    NUMBER  := digits with optional 3-digit comma grouping in the integer
               part and an optional decimal fraction

Model output is untrusted text, so nothing outside this grammar evaluates;
arithmetic is exact rational and the tool surface renders the result as a
decimal string with up to ten fractional digits.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import DivisionByZero, ParseError
from .numfmt import format_number, strip_grouping

ADD, SUB, MUL, DIV = "add", "sub", "mul", "div"

_OP_CHARS = {"+": ADD, "-": SUB, "*": MUL, "/": DIV}

_NUMBER_RE = re.compile(r"(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?|\.\d+")
_TOKEN_RE = re.compile(rf"\s*(?:(?P<num>{_NUMBER_RE.pattern})|(?P<op>[-+*/()]))")


@dataclass(frozen=True)
class NumberLiteral:
    value: Fraction


@dataclass(frozen=True)
class Negate:
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


Expr = NumberLiteral | Negate | Binary


def tokenize(text: str) -> list[str | Fraction]:
    tokens: list[str | Fraction] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            rest = text[pos:].strip()
            if not rest:
                break
            raise ParseError(f"unexpected character {rest[0]!r} at position {pos}")
        if m.group("num") is not None:
            tokens.append(Fraction(strip_grouping(m.group("num"))))
        else:
            tokens.append(m.group("op"))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str | Fraction]):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def advance(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def parse(self) -> Expr:
        if not self.tokens:
            raise ParseError("empty expression")
        node = self.expr()
        if self.pos != len(self.tokens):
            raise ParseError(f"trailing input at token {self.peek()!r}")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.peek() in ("+", "-"):
            op = _OP_CHARS[self.advance()]
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek() in ("*", "/"):
            op = _OP_CHARS[self.advance()]
            node = Binary(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.peek() == "-":
            self.advance()
            return Negate(self.unary())
        return self.primary()

    def primary(self) -> Expr:
        tok = self.advance()
        if isinstance(tok, Fraction):
            return NumberLiteral(tok)
        if tok == "(":
            node = self.expr()
            if self.advance() != ")":
                raise ParseError("missing closing parenthesis")
            return node
        raise ParseError(f"unexpected token {tok!r}")


def parse_expression(text: str) -> Expr:
    """Parse expression text into an AST; ParseError outside the grammar."""
    return _Parser(tokenize(text)).parse()


def evaluate_ast(node: Expr) -> Fraction:
    if isinstance(node, NumberLiteral):
        return node.value
    if isinstance(node, Negate):
        return -evaluate_ast(node.operand)
    if node.op == ADD:
        return evaluate_ast(node.left) + evaluate_ast(node.right)
    if node.op == SUB:
        return evaluate_ast(node.left) - evaluate_ast(node.right)
    if node.op == MUL:
        return evaluate_ast(node.left) * evaluate_ast(node.right)
    right = evaluate_ast(node.right)
    if right == 0:
        raise DivisionByZero("division by zero")
    return evaluate_ast(node.left) / right


def evaluate_expression(text: str) -> Fraction:
    """Evaluate expression text to an exact rational value."""
    return evaluate_ast(parse_expression(text))


def calc(text: str) -> str:
    """Tool API surface: one expression string in, one decimal string out."""
    return format_number(evaluate_expression(text))


def expression_complexity(text: str) -> int:
    """Number of binary operators in the parsed expression."""
    return _count_binary(parse_expression(text))


def _count_binary(node: Expr) -> int:
    if isinstance(node, NumberLiteral):
        return 0
    if isinstance(node, Negate):
        return _count_binary(node.operand)
    return 1 + _count_binary(node.left) + _count_binary(node.right)
