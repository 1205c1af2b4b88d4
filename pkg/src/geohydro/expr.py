"""Tiny recursive-descent evaluator for initial data and potentials.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' factor)?
    base   := number | 'x' | 'pi' | fn '(' expr ')' | '(' expr ')' | '-' base

Expressions are evaluated pointwise on the grid nodes. ``'-' base`` binds
tighter than ``'^'``, so ``-x^2`` means ``(-x)^2``.
"""

import re

import numpy as np

from .errors import EvalError, ParseError
from .grid import nodes

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


def _log(v):
    if np.any(v <= 0):
        raise EvalError("log of a non-positive value")
    return np.log(v)


def _sqrt(v):
    if np.any(v < 0):
        raise EvalError("sqrt of a negative value")
    return np.sqrt(v)


FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": _log,
    "sqrt": _sqrt,
    "abs": np.abs,
    "sinh": np.sinh,
    "cosh": np.cosh,
}


def tokenize(src):
    tokens = []
    pos = 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            start = pos + len(src[pos:]) - len(src[pos:].lstrip())
            raise ParseError(f"unexpected character {src[start]!r}", _byte_offset(src, start))
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


def _byte_offset(src, index):
    return len(src[:index].encode("utf-8"))


class _Parser:
    def __init__(self, src):
        self.src = src
        self.tokens = tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, _byte_offset(self.src, tok[2]))

    def expect(self, value):
        tok = self.peek()
        if tok[0] != "op" or tok[1] != value:
            self.fail(f"expected {value!r}")
        return self.advance()

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail("unexpected trailing input")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.advance()[1]
            node = (op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.advance()[1]
            node = (op, node, self.factor())
        return node

    def factor(self):
        node = self.base()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.advance()
            node = ("^", node, self.factor())
        return node

    def base(self):
        kind, text, _ = tok = self.peek()
        if kind == "num":
            self.advance()
            return ("num", float(text))
        if kind == "name":
            self.advance()
            if text == "x":
                return ("x",)
            if text == "pi":
                return ("num", np.pi)
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return ("fn", text, arg)
            self.fail(f"unknown name {text!r}", tok)
        if kind == "op" and text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if kind == "op" and text == "-":
            self.advance()
            return ("neg", self.base())
        if kind == "end":
            self.fail("unexpected end of input")
        self.fail(f"unexpected token {text!r}")


def parse(src):
    """Parse ``src`` into a nested-tuple syntax tree."""
    return _Parser(src).parse()


def _eval(node, x):
    tag = node[0]
    if tag == "num":
        return np.full_like(x, node[1])
    if tag == "x":
        return x.copy()
    if tag == "neg":
        return -_eval(node[1], x)
    if tag == "fn":
        return FUNCTIONS[node[1]](_eval(node[2], x))
    a = _eval(node[1], x)
    b = _eval(node[2], x)
    if tag == "+":
        return a + b
    if tag == "-":
        return a - b
    if tag == "*":
        return a * b
    if tag == "/":
        if np.any(b == 0):
            raise EvalError("division by zero at a grid node")
        return a / b
    return np.power(a, b)


def evaluate_at(src, x):
    """Evaluate ``src`` at the points ``x``."""
    tree = parse(src)
    x = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        out = _eval(tree, x)
    if not np.all(np.isfinite(out)):
        raise EvalError(f"expression {src!r} is not finite at every node")
    return out


def eval_expression(src, grid):
    """Evaluate ``src`` on the nodes of ``grid`` (a PeriodicGrid or a node count)."""
    return evaluate_at(src, nodes(getattr(grid, "n", grid)))
