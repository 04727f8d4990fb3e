"""Test functions and the small polynomial expression grammar used by the CLI.

Grammar (whitespace ignored)::

    expr   := term (("+" | "-") term)*
    term   := unary ("*" unary)*
    unary  := "-" unary | power
    power  := atom ("^" INTEGER)?
    atom   := NUMBER | "x" | "(" expr ")"

Every expression is a polynomial in x, so derivatives are exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from numpy.polynomial import Polynomial

from .errors import ConfigError

Vectorized = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class TestFunction:
    """A function of one variable with (optionally) its analytic first two derivatives."""

    __test__ = False  # keep pytest from collecting this class

    name: str
    f: Vectorized
    d1: Vectorized | None = None
    d2: Vectorized | None = None

    def __call__(self, u):
        return self.f(np.asarray(u, dtype=float))


def from_polynomial(name: str, p: Polynomial) -> TestFunction:
    d1, d2 = p.deriv(1), p.deriv(2)
    return TestFunction(name, p, d1, d2)


# (x - 1/2)(x - 1/3)
F1 = TestFunction(
    "f1",
    lambda u: (u - 0.5) * (u - 1.0 / 3.0),
    lambda u: 2.0 * u - 5.0 / 6.0,
    lambda u: np.full_like(np.asarray(u, dtype=float), 2.0),
)
F2 = TestFunction(
    "f2",
    lambda u: -4.0 * u**3,
    lambda u: -12.0 * u**2,
    lambda u: -24.0 * u,
)
E0 = TestFunction(
    "e0",
    lambda u: np.ones_like(np.asarray(u, dtype=float)),
    lambda u: np.zeros_like(np.asarray(u, dtype=float)),
    lambda u: np.zeros_like(np.asarray(u, dtype=float)),
)
E1 = TestFunction(
    "e1",
    lambda u: np.asarray(u, dtype=float) * 1.0,
    lambda u: np.ones_like(np.asarray(u, dtype=float)),
    lambda u: np.zeros_like(np.asarray(u, dtype=float)),
)
E2 = TestFunction(
    "e2",
    lambda u: np.asarray(u, dtype=float) ** 2,
    lambda u: 2.0 * np.asarray(u, dtype=float),
    lambda u: np.full_like(np.asarray(u, dtype=float), 2.0),
)

NAMED = {fn.name: fn for fn in (F1, F2, E0, E1, E2)}


# ---- expression grammar -------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


Expr = Union[Num, Var, Neg, Add, Sub, Mul, Pow]

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|(?P<op>[-+*^()x]))")
_INT = re.compile(r"\d+")
MAX_EXPONENT = 64


def _tokenize(text: str) -> list[str]:
    tokens, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ConfigError(f"unexpected character {text[pos:].lstrip()[:1]!r} in expression {text!r}")
        tokens.append(m.group("num") or m.group("op"))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ConfigError(f"expected {expected or 'a token'} at position {self.i} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self) -> Expr:
        if not self.tokens:
            raise ConfigError("empty expression")
        e = self.expr()
        if self.peek() is not None:
            raise ConfigError(f"trailing input {self.peek()!r} in {self.text!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            r = self.term()
            e = Add(e, r) if op == "+" else Sub(e, r)
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek() == "*":
            self.take()
            e = Mul(e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.peek() == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek() == "^":
            self.take()
            tok = self.take()
            if not _INT.fullmatch(tok):
                raise ConfigError(f"exponent must be a non-negative integer literal, got {tok!r}")
            k = int(tok)
            if k > MAX_EXPONENT:
                raise ConfigError(f"exponent {k} exceeds {MAX_EXPONENT}")
            return Pow(base, k)
        return base

    def atom(self) -> Expr:
        tok = self.take()
        if tok == "x":
            return Var()
        if tok == "(":
            e = self.expr()
            self.take(")")
            return e
        if tok in "+-*^)":
            raise ConfigError(f"unexpected {tok!r} in {self.text!r}")
        return Num(float(tok))


def parse(text: str) -> Expr:
    return _Parser(text).parse()


def to_text(e: Expr) -> str:
    """Fully parenthesized canonical form; ``parse(to_text(e)) == e``."""
    if isinstance(e, Num):
        return repr(float(e.value))
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Neg):
        return f"(-{to_text(e.arg)})"
    if isinstance(e, Pow):
        return f"({to_text(e.base)} ^ {e.exponent})"
    op = {Add: "+", Sub: "-", Mul: "*"}[type(e)]
    return f"({to_text(e.left)} {op} {to_text(e.right)})"


def to_polynomial(e: Expr) -> Polynomial:
    if isinstance(e, Num):
        return Polynomial([e.value])
    if isinstance(e, Var):
        return Polynomial([0.0, 1.0])
    if isinstance(e, Neg):
        return -to_polynomial(e.arg)
    if isinstance(e, Pow):
        return to_polynomial(e.base) ** e.exponent
    l, r = to_polynomial(e.left), to_polynomial(e.right)
    if isinstance(e, Add):
        return l + r
    if isinstance(e, Sub):
        return l - r
    return l * r


def resolve(selector: str) -> TestFunction:
    """A named test function (f1, f2, e0, e1, e2) or a polynomial expression in x."""
    if selector in NAMED:
        return NAMED[selector]
    return from_polynomial(selector, to_polynomial(parse(selector)))
