"""A tiny expression language for one-variable functions.

Grammar (version 1)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom (("^" | "**") unary)?
    atom   := NUMBER | NAME | FUNC "(" expr ")" | "(" expr ")"

``FUNC`` is one of sqrt, exp, ln, log, arctan, atan, sin, cos.  ``NAME`` is
either a constant (``pi``, ``e``) or the single free variable; any identifier
may serve as the variable (``t``, ``r``, ...) but only one may appear.

Parsed expressions become :class:`~warpfinsler.functions.JetFunction` objects,
so their derivatives are computed exactly by jet arithmetic.
"""

import math
import re

from . import jets
from .functions import JetFunction

GRAMMAR_VERSION = "1"

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)|(\*\*|[-+*/^()])|([A-Za-z_]\w*))")

_FUNCS = {
    "sqrt": jets.sqrt,
    "exp": jets.exp,
    "ln": jets.log,
    "log": jets.log,
    "arctan": jets.arctan,
    "atan": jets.arctan,
    "sin": jets.sin,
    "cos": jets.cos,
}
_CONSTS = {"pi": math.pi, "e": math.e}


class ExpressionError(ValueError):
    pass


def _tokenize(text):
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExpressionError(f"unexpected character at {pos} in {text!r}")
        num, op, name = m.groups()
        if num is not None:
            out.append(("num", float(num)))
        elif op is not None:
            out.append(("op", "^" if op == "**" else op))
        else:
            out.append(("name", name))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens, text):
        self.tokens = tokens
        self.text = text
        self.i = 0
        self.variable = None

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise ExpressionError(f"expected {value or kind} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self):
        node = self.expr()
        if self.i != len(self.tokens):
            raise ExpressionError(f"trailing input in {self.text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            node = (op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            node = (op, node, self.unary())
        return node

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return ("neg", self.unary())
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            return ("^", base, self.unary())
        return base

    def atom(self):
        kind, value = self.peek()
        if kind == "num":
            self.take()
            return ("num", value)
        if kind == "op" and value == "(":
            self.take()
            node = self.expr()
            self.take("op", ")")
            return node
        if kind == "name":
            self.take()
            if value in _FUNCS:
                self.take("op", "(")
                arg = self.expr()
                self.take("op", ")")
                return ("call", value, arg)
            if value in _CONSTS:
                return ("num", _CONSTS[value])
            if self.variable not in (None, value):
                raise ExpressionError(
                    f"more than one variable ({self.variable}, {value}) in {self.text!r}")
            self.variable = value
            return ("var",)
        raise ExpressionError(f"unexpected token {value!r} in {self.text!r}")


def _constant(node):
    return node[0] == "num"


def _evaluate(node, x):
    tag = node[0]
    if tag == "num":
        return node[1]
    if tag == "var":
        return x
    if tag == "neg":
        return -_evaluate(node[1], x)
    if tag == "call":
        return _FUNCS[node[1]](_evaluate(node[2], x))
    a = _evaluate(node[1], x)
    if tag == "^":
        if _constant(node[2]):
            return jets.power(a, node[2][1])
        return jets.exp(_evaluate(node[2], x) * jets.log(a))
    b = _evaluate(node[2], x)
    if tag == "+":
        return a + b
    if tag == "-":
        return a - b
    if tag == "*":
        return a * b
    if tag == "/":
        if isinstance(b, jets.Jet):
            return a / b
        if b == 0:
            raise ZeroDivisionError("division by zero in expression")
        return a / b
    raise ExpressionError(f"unknown node {tag}")


def parse_function(text):
    """Parse ``text`` into a :class:`JetFunction` of its single variable."""
    parser = _Parser(_tokenize(text), text)
    tree = parser.parse()
    fn = JetFunction(lambda x: _evaluate(tree, x), name=text)
    fn.tree = tree
    fn.variable = parser.variable
    return fn
