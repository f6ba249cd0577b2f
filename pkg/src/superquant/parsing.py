"""Expression parser for scalars, superfunctions and operators.

Grammar (``*`` and ``/`` bind tighter than ``+`` and ``-``; ``^`` tighter still)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := atom ("^" INT)?
    atom   := INT | NAME | "(" expr ")"

Names: ``lam``, ``mu`` (weights), ``x``, ``xi1``, ``xi2`` (coordinates),
``dx``, ``Dbar1``, ``Dbar2``, ``dxi1``, ``dxi2`` (operator atoms).  Extra
scalar names may be supplied by the caller.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .operators import DiffOperator, compose
from .scalars import LAM, MU, RationalFunction
from .superfunctions import SuperFunction

COORDINATES = ("x", "xi1", "xi2")
OPERATOR_ATOMS = ("dx", "Dbar1", "Dbar2", "dxi1", "dxi2")


class ParseError(ValueError):
    """Syntax or type error in an expression, with a character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


# AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: int
    pos: int


@dataclass(frozen=True)
class Name:
    name: str
    pos: int


@dataclass(frozen=True)
class Neg:
    arg: object
    pos: int


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    pos: int


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int
    pos: int


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def tokenize(text: str) -> list:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(("int", m.group(1), start))
        elif m.group(2):
            out.append(("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", start)
            out.append(("op", ch, start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.take()
        if tok[1] != value or tok[0] != "op":
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])

    def parse(self):
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0)
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            _, op, pos = self.take()
            node = BinOp(op, node, self.term(), pos)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            _, op, pos = self.take()
            node = BinOp(op, node, self.unary(), pos)
        return node

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            arg = self.unary()
            return Neg(arg, tok[2]) if tok[1] == "-" else arg
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            e = self.take()
            if e[0] != "int":
                raise ParseError("exponent must be a nonnegative integer", e[2])
            return Pow(base, int(e[1]), tok[2])
        return base

    def atom(self):
        tok = self.take()
        kind, val, pos = tok
        if kind == "int":
            return Num(int(val), pos)
        if kind == "name":
            return Name(val, pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos)


def parse_ast(text: str):
    return _Parser(text).parse()


# evaluation --------------------------------------------------------------

class _Evaluator:
    """Folds an AST into one of three value kinds: scalar, function, operator.

    Operators are built between equal placeholder weights so that any
    product composes; the caller attaches the real weights at the end.
    """

    def __init__(self, kind: str, scalars: dict):
        self.kind = kind
        self.scalars = scalars
        self.lam = self.mu = Fraction(0)

    def lift(self, v):
        """Promote a scalar/function to the evaluator's target kind."""
        if self.kind == "operator":
            if isinstance(v, DiffOperator):
                return v
            if not isinstance(v, SuperFunction):
                v = SuperFunction.constant(v)
            return DiffOperator.multiplication(v, self.lam, self.mu)
        if self.kind == "function" and not isinstance(v, SuperFunction):
            return SuperFunction.constant(v)
        return v

    def name(self, node: Name):
        n = node.name
        if n in self.scalars:
            return self.scalars[n]
        if n in COORDINATES and self.kind != "scalar":
            return SuperFunction.x() if n == "x" else SuperFunction.xi(int(n[-1]))
        if n in OPERATOR_ATOMS and self.kind == "operator":
            return _operator_atom(n, self.lam, self.mu)
        raise ParseError(f"unknown name {n!r}", node.pos)

    def eval(self, node):
        if isinstance(node, Num):
            return Fraction(node.value)
        if isinstance(node, Name):
            return self.name(node)
        if isinstance(node, Neg):
            v = self.eval(node.arg)
            return v.scale(-1) if isinstance(v, (SuperFunction, DiffOperator)) else -v
        if isinstance(node, Pow):
            v = self.eval(node.base)
            if isinstance(v, DiffOperator):
                out = self.lift(Fraction(1))
                for _ in range(node.exp):
                    out = compose(out, v)
                return out
            return v**node.exp
        a, b = self.eval(node.left), self.eval(node.right)
        op = node.op
        if op == "/":
            if isinstance(b, (SuperFunction, DiffOperator)):
                raise ParseError("division is only allowed by scalars", node.pos)
            if not b:
                raise ParseError("division by zero", node.pos)
            if isinstance(a, (SuperFunction, DiffOperator)):
                return a.scale(1 / b)
            return a / b
        if op == "*":
            return self.mul(a, b)
        if isinstance(a, (SuperFunction, DiffOperator)) or isinstance(b, (SuperFunction, DiffOperator)):
            a, b = self.lift_pair(a, b)
        return a + b if op == "+" else a - b

    def lift_pair(self, a, b):
        if isinstance(a, DiffOperator) or isinstance(b, DiffOperator):
            return self.lift(a), self.lift(b)
        if not isinstance(a, SuperFunction):
            a = SuperFunction.constant(a)
        if not isinstance(b, SuperFunction):
            b = SuperFunction.constant(b)
        return a, b

    def mul(self, a, b):
        if isinstance(a, DiffOperator) or isinstance(b, DiffOperator):
            return compose(self.lift(a), self.lift(b))
        if isinstance(a, SuperFunction) and isinstance(b, SuperFunction):
            return a * b
        if isinstance(a, SuperFunction):
            return a.scale(b)
        if isinstance(b, SuperFunction):
            return b.scale(a)
        return a * b


def _operator_atom(name: str, lam, mu) -> DiffOperator:
    one = SuperFunction.constant(1)
    if name == "dx":
        return DiffOperator({(1, 0, 0): one}, lam, mu)
    if name == "Dbar1":
        return DiffOperator({(0, 1, 0): one}, lam, mu)
    if name == "Dbar2":
        return DiffOperator({(0, 0, 1): one}, lam, mu)
    # d/dxi_i = Dbar_i + xi_i dx
    i = int(name[-1])
    key = (0, 1, 0) if i == 1 else (0, 0, 1)
    return DiffOperator({key: one, (1, 0, 0): SuperFunction.xi(i)}, lam, mu)


def _scalar_names(extra) -> dict:
    names = {"lam": LAM, "mu": MU}
    if extra:
        names.update(extra)
    return names


def parse_scalar(text: str, variables: dict | None = None):
    """Parse a scalar in Q(lam, mu); ``variables`` adds or overrides names."""
    ast = parse_ast(text)
    v = _Evaluator("scalar", _scalar_names(variables)).eval(ast)
    if isinstance(v, RationalFunction) and v.is_constant():
        return v.constant_value()
    return v


def parse_superfunction(text: str, variables: dict | None = None) -> SuperFunction:
    """Parse a superfunction; Grassmann relations apply (``xi1^2`` is 0)."""
    ast = parse_ast(text)
    ev = _Evaluator("function", _scalar_names(variables))
    return ev.lift(ev.eval(ast))


def parse_operator(text: str, lam=LAM, mu=MU, variables: dict | None = None) -> DiffOperator:
    """Parse an operator; products are compositions, functions act by multiplication."""
    ast = parse_ast(text)
    ev = _Evaluator("operator", _scalar_names(variables))
    return ev.lift(ev.eval(ast)).with_weights(lam, mu)
