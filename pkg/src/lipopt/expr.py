"""Arithmetic expressions in one variable ``x``.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-'? power
    power  := atom ('^' factor)?
    atom   := number | 'x' | 'pi' | 'e' | ident '(' expr ')' | '(' expr ')'

``^`` is right-associative and binds tighter than unary minus, so ``-x^2``
is ``-(x^2)``. There is no implicit multiplication. Error offsets are byte
offsets into the UTF-8 encoding of the input.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

from .errors import ExpressionSyntaxError, NonFiniteValue, UnknownIdentifier

FUNCTIONS: dict[str, Callable[[float], float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "exp": math.exp,
    "log": math.log,
    "abs": abs,
    "sqrt": math.sqrt,
}
CONSTANTS = {"pi": math.pi, "e": math.e}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE | re.ASCII,
)


@dataclass(frozen=True)
class Const:
    value: float

    def evaluate(self, x: float) -> float:
        return self.value


@dataclass(frozen=True)
class Var:
    def evaluate(self, x: float) -> float:
        return x


@dataclass(frozen=True)
class Neg:
    operand: "Node"

    def evaluate(self, x: float) -> float:
        return -self.operand.evaluate(x)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"

    def evaluate(self, x: float) -> float:
        a = self.left.evaluate(x)
        b = self.right.evaluate(x)
        op = self.op
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if b == 0.0:
                raise NonFiniteValue(x, reason="division by zero")
            return a / b
        try:
            return math.pow(a, b)
        except (ValueError, OverflowError) as exc:
            raise NonFiniteValue(x, reason=f"{a!r}^{b!r}: {exc}") from None


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Node"

    def evaluate(self, x: float) -> float:
        a = self.arg.evaluate(x)
        try:
            return FUNCTIONS[self.name](a)
        except (ValueError, OverflowError) as exc:
            raise NonFiniteValue(x, reason=f"{self.name}({a!r}): {exc}") from None


Node = Union[Const, Var, Neg, BinOp, Call]


@dataclass(frozen=True)
class ExprAst:
    root: Node
    source: str

    def evaluate(self, x: float) -> float:
        return self.root.evaluate(float(x))

    __call__ = evaluate


@dataclass(frozen=True)
class _Tok:
    kind: str  # num, ident, op, end
    text: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    # byte offset tracked alongside the character index
    byte_pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", byte_pos,
                                        ("number", "x", "identifier", "operator", "'('"))
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), byte_pos))
        byte_pos += len(m.group().encode("utf-8", "surrogatepass"))
        pos = m.end()
    toks.append(_Tok("end", "", byte_pos))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, expected: tuple[str, ...]):
        tok = self.peek()
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ExpressionSyntaxError(f"unexpected {found}", tok.offset, expected)

    def expect_op(self, op: str) -> None:
        tok = self.peek()
        if tok.kind == "op" and tok.text == op:
            self.advance()
        else:
            self.fail((f"'{op}'",))

    def parse(self) -> Node:
        node = self.expr()
        if self.peek().kind != "end":
            self.fail(("'+'", "'-'", "'*'", "'/'", "'^'", "end of input"))
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return Neg(self.power())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            return BinOp("^", base, self.factor())
        return base

    def atom(self) -> Node:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return Const(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            name = tok.text
            if name == "x":
                return Var()
            if name in CONSTANTS:
                return Const(CONSTANTS[name])
            if name in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(name, arg)
            raise UnknownIdentifier(
                f"unknown identifier {name!r}", tok.offset,
                ("x", *CONSTANTS, *FUNCTIONS),
            )
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        self.fail(("number", "'x'", "constant", "function call", "'('"))


def parse_expression(text: str | bytes) -> ExprAst:
    """Parse ``text`` into an evaluable tree.

    Bytes are decoded as UTF-8; an undecodable byte is a syntax error at its
    offset.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ExpressionSyntaxError("invalid UTF-8", exc.start) from None
    parser = _Parser(text)
    try:
        root = parser.parse()
    except RecursionError:
        raise ExpressionSyntaxError("expression nested too deeply", parser.peek().offset) from None
    return ExprAst(root, text)
