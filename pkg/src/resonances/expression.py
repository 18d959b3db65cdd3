"""Tiny expression language for user-supplied potentials.

Grammar (``^`` is right associative and binds tighter than unary minus)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Names are ``x``, the constants ``pi`` and ``e``, any caller-supplied
parameter, and the functions exp, sin, cos, sinh, cosh, sqrt and abs.
``abs`` is the only non-analytic function; trees containing it refuse to
evaluate off the real axis.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import ExpressionSyntaxError, NonAnalyticError, UnknownIdentifierError

_FUNCTIONS = {
    "exp": (cmath.exp, np.exp),
    "sin": (cmath.sin, np.sin),
    "cos": (cmath.cos, np.cos),
    "sinh": (cmath.sinh, np.sinh),
    "cosh": (cmath.cosh, np.cosh),
    "sqrt": (cmath.sqrt, np.sqrt),
    "abs": (abs, np.abs),
}
_CONSTANTS = {"pi": math.pi, "e": math.e}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class Node:
    op: str
    args: tuple = ()
    value: object = None

    def __str__(self):
        if self.op == "num":
            return repr(self.value)
        if self.op in ("var", "param"):
            return self.value
        if self.op == "neg":
            return f"(-{self.args[0]})"
        if self.op == "call":
            return f"{self.value}({self.args[0]})"
        return f"({self.args[0]} {self.op} {self.args[1]})"


def _tokenize(src):
    tokens = []
    pos = 0
    src = src.rstrip()
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            offset = pos + len(src[pos:]) - len(src[pos:].lstrip())
            raise ExpressionSyntaxError(f"unexpected character {src[offset]!r}", offset)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src, params):
        self.tokens = _tokenize(src)
        self.i = 0
        self.params = params

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, val, off = self.take()
        if val != text:
            found = "end of input" if kind == "end" else repr(val)
            raise ExpressionSyntaxError(f"expected {text!r}, found {found}", off)

    def parse(self):
        node = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"unexpected {val!r}", off)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Node(op, (node, self.term()))
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Node(op, (node, self.unary()))
        return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in ("-", "+"):
            self.take()
            operand = self.unary()
            return Node("neg", (operand,)) if val == "-" else operand
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            return Node("^", (base, self.unary()))
        return base

    def atom(self):
        kind, val, off = self.take()
        if kind == "num":
            return Node("num", value=float(val))
        if kind == "name":
            if self.peek()[1] == "(":
                if val not in _FUNCTIONS:
                    raise UnknownIdentifierError(f"unknown function {val!r}", off)
                self.take()
                arg = self.expr()
                self.expect(")")
                return Node("call", (arg,), val)
            if val == "x":
                return Node("var", value="x")
            if val in self.params:
                return Node("param", value=val)
            if val in _CONSTANTS:
                return Node("num", value=_CONSTANTS[val])
            if val in _FUNCTIONS:
                raise ExpressionSyntaxError(f"function {val!r} needs an argument", off)
            raise UnknownIdentifierError(f"unknown identifier {val!r}", off)
        if val == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(val)
        raise ExpressionSyntaxError(f"unexpected {found}", off)


def parse(src: str, params=None) -> Node:
    """Parse *src* into an expression tree; raises with a byte offset on error."""
    if not isinstance(src, str):
        raise TypeError("expression source must be text")
    return _Parser(src, dict(params or {})).parse()


def uses(node: Node, op: str, value=None) -> bool:
    if node.op == op and (value is None or node.value == value):
        return True
    return any(uses(a, op, value) for a in node.args)


def compile_scalar(node: Node, params=None):
    """Return ``f(w) -> complex`` built from cmath primitives."""
    params = dict(params or {})
    non_analytic = uses(node, "call", "abs")

    def build(n):
        if n.op == "num":
            v = n.value
            return lambda w: v
        if n.op == "var":
            return lambda w: w
        if n.op == "param":
            v = params[n.value]
            return lambda w: v
        if n.op == "neg":
            a = build(n.args[0])
            return lambda w: -a(w)
        if n.op == "call":
            a = build(n.args[0])
            fn = _FUNCTIONS[n.value][0]
            return lambda w: fn(a(w))
        a, b = build(n.args[0]), build(n.args[1])
        if n.op == "+":
            return lambda w: a(w) + b(w)
        if n.op == "-":
            return lambda w: a(w) - b(w)
        if n.op == "*":
            return lambda w: a(w) * b(w)
        if n.op == "/":
            return lambda w: a(w) / b(w)
        rhs = n.args[1]
        if rhs.op == "num" and float(rhs.value).is_integer() and abs(rhs.value) <= 16:
            k = int(rhs.value)
            return lambda w: a(w) ** k
        return lambda w: complex(a(w)) ** b(w)

    f = build(node)
    if not non_analytic:
        return lambda w: complex(f(w))

    def guarded(w):
        if complex(w).imag != 0.0:
            raise NonAnalyticError("expression contains abs(); only real arguments allowed")
        return complex(f(complex(w).real))

    return guarded


def compile_vector(node: Node, params=None):
    """Return ``f(w: ndarray) -> ndarray`` built from numpy ufuncs."""
    params = dict(params or {})
    non_analytic = uses(node, "call", "abs")

    def build(n):
        if n.op == "num":
            v = n.value
            return lambda w: v
        if n.op == "var":
            return lambda w: w
        if n.op == "param":
            v = params[n.value]
            return lambda w: v
        if n.op == "neg":
            a = build(n.args[0])
            return lambda w: -a(w)
        if n.op == "call":
            a = build(n.args[0])
            fn = _FUNCTIONS[n.value][1]
            return lambda w: fn(a(w))
        a, b = build(n.args[0]), build(n.args[1])
        return {
            "+": lambda w: a(w) + b(w),
            "-": lambda w: a(w) - b(w),
            "*": lambda w: a(w) * b(w),
            "/": lambda w: a(w) / b(w),
            "^": lambda w: np.power(a(w), b(w)),
        }[n.op]

    f = build(node)

    def evaluate(w):
        w = np.asarray(w, dtype=complex)
        if non_analytic:
            if np.any(w.imag != 0.0):
                raise NonAnalyticError("expression contains abs(); only real arguments allowed")
            w = w.real.astype(complex)
        return np.broadcast_to(np.asarray(f(w), dtype=complex), w.shape).copy()

    return evaluate
