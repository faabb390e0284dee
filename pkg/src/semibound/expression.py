"""A tiny expression language for custom potentials V(r).

Grammar (``^`` is right associative and binds tighter than unary minus)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('+' | '-') unary | power
    power   := atom ('^' unary)?
    atom    := NUMBER | 'r' | FUNC '(' expr (',' expr)* ')' | '(' expr ')'

Functions: exp, log, sin, cos, cosh, sqrt (one argument) and pow (two).
The only variable is ``r``.  Compiled expressions are numpy-vectorised and
have no side effects.  The same tree also runs on second-order jets
(value, first and second derivative), so expression potentials get exact
V' and V'' instead of finite differences.
"""

from __future__ import annotations

import operator
import re

import numpy as np

from .exceptions import ExpressionError
from .potentials import Custom

__all__ = ["compile_expression", "compile_jet", "parse_expression", "evaluate_constant", "Jet"]

class Jet:
    """Truncated Taylor jet (v, d1, d2) of a function of r."""

    __slots__ = ("v", "d1", "d2")

    def __init__(self, v, d1=0.0, d2=0.0):
        self.v, self.d1, self.d2 = v, d1, d2

    @staticmethod
    def lift(x):
        return x if isinstance(x, Jet) else Jet(x)

    def chain(self, f0, f1, f2):
        """Compose with a scalar function whose derivatives at v are f0, f1, f2."""
        return Jet(f0, f1 * self.d1, f2 * self.d1 * self.d1 + f1 * self.d2)

    def __add__(self, o):
        o = Jet.lift(o)
        return Jet(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.v, -self.d1, -self.d2)

    def __sub__(self, o):
        return self + (-Jet.lift(o))

    def __rsub__(self, o):
        return Jet.lift(o) + (-self)

    def __mul__(self, o):
        o = Jet.lift(o)
        return Jet(self.v * o.v, self.d1 * o.v + self.v * o.d1,
                   self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2)

    __rmul__ = __mul__

    def reciprocal(self):
        x = self.v
        return self.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))

    def __truediv__(self, o):
        return self * Jet.lift(o).reciprocal()

    def __rtruediv__(self, o):
        return Jet.lift(o) * self.reciprocal()

    def __pow__(self, o):
        if isinstance(o, Jet):
            return _exp(o * _log(self))
        x = self.v
        return self.chain(np.power(x, o), o * np.power(x, o - 1.0), o * (o - 1.0) * np.power(x, o - 2.0))

    def __rpow__(self, o):
        return _exp(self * np.log(o))


def _unary(fn, d1, d2):
    def f(x):
        if isinstance(x, Jet):
            return x.chain(fn(x.v), d1(x.v), d2(x.v))
        return fn(x)
    return f


_exp = _unary(np.exp, np.exp, np.exp)
_log = _unary(np.log, lambda x: 1.0 / x, lambda x: -1.0 / (x * x))


def _pow(a, b):
    return operator.pow(a, b) if isinstance(a, Jet) or isinstance(b, Jet) else np.power(a, b)


FUNCTIONS = {
    "exp": (_exp, 1),
    "log": (_log, 1),
    "sin": (_unary(np.sin, np.cos, lambda x: -np.sin(x)), 1),
    "cos": (_unary(np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x)), 1),
    "cosh": (_unary(np.cosh, np.sinh, np.cosh), 1),
    "sqrt": (_unary(np.sqrt, lambda x: 0.5 / np.sqrt(x), lambda x: -0.25 / (x * np.sqrt(x))), 1),
    "pow": (_pow, 2),
}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(text):
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = len(text[pos:]) - len(text[pos:].lstrip()) + pos
            raise ExpressionError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, allow_r=True):
        self.tokens = _tokenize(text)
        self.i = 0
        self.allow_r = allow_r

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            found = "end of input" if kind == "end" else repr(val)
            raise ExpressionError(f"expected {value!r}, found {found}", pos)

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExpressionError(f"unexpected {val!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            node = _bin(operator.add if op == "+" else operator.sub, node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            node = _bin(operator.mul if op == "*" else operator.truediv, node, rhs)
        return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in ("+", "-"):
            self.take()
            inner = self.unary()
            return inner if val == "+" else (lambda r, f=inner: -f(r))
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            exponent = self.unary()
            return _bin(_pow, base, exponent)
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            c = float(val)
            return lambda r: c
        if kind == "name":
            if val == "r":
                if not self.allow_r:
                    raise ExpressionError("the variable r is not allowed here", pos)
                return lambda r: r
            if val in FUNCTIONS:
                fn, nargs = FUNCTIONS[val]
                self.expect("(")
                args = [self.expr()]
                while self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr())
                close = self.peek()
                self.expect(")")
                if len(args) != nargs:
                    raise ExpressionError(f"{val} takes {nargs} argument(s), got {len(args)}", close[2])
                if nargs == 1:
                    a = args[0]
                    return lambda r: fn(a(r))
                a, b = args
                return lambda r: fn(a(r), b(r))
            if self.peek()[1] == "(":
                raise ExpressionError(f"unknown function {val!r}", pos)
            raise ExpressionError(f"unknown identifier {val!r}: expression must be a function of r alone", pos)
        if val == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(val)
        raise ExpressionError(f"unexpected {found}", pos)


def _bin(fn, a, b):
    return lambda r: fn(a(r), b(r))


def _compile(text):
    if not text or not text.strip():
        raise ExpressionError("empty expression", 0)
    f = _Parser(text).parse()

    def func(r):
        with np.errstate(all="ignore"):
            return f(np.asarray(r, dtype=float))

    def jet(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(all="ignore"):
            out = Jet.lift(f(Jet(r, np.ones_like(r), np.zeros_like(r))))
        z = 0.0 * r
        return out.v + z, out.d1 + z, out.d2 + z

    return func, jet


def compile_expression(text: str):
    """Compile ``text`` into a vectorised function of r."""
    return _compile(text)[0]


def compile_jet(text: str):
    """Compile ``text`` into r -> (V, V', V'') with exact derivatives."""
    return _compile(text)[1]


def parse_expression(text: str, *, g: float = 1.0, R: float = 1.0) -> Custom:
    """Parse ``text`` into a Custom potential V(r) = g^2 * expr(r)."""
    func, jet = _compile(text)
    return Custom(func=func, text=text, g=g, R=R, jet=jet)


def evaluate_constant(text: str) -> float:
    """Evaluate a constant expression such as ``log(2)``."""
    if not text or not text.strip():
        raise ExpressionError("empty expression", 0)
    f = _Parser(text, allow_r=False).parse()
    return float(f(0.0))
