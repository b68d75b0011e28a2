"""Text definitions of parameterized Hermitian matrix families.

Grammar (whitespace-insensitive)::

    matrix := '[' row (',' row)* ']'
    row    := '[' expr (',' expr)* ']'
    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | atom
    atom   := NUMBER | 'i' | 'pi' | 'e' | NAME | FUNC '(' expr ')' | '(' expr ')'

``FUNC`` is one of sin, cos, tan, exp, sqrt. ``i`` is the imaginary unit;
``a + b*i`` is the only spelling of a complex number. Entries are evaluated
in complex arithmetic, vectorized over any number of parameter points.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DSLError, DSLSyntaxError, EvaluationError, HermiticityError

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "sqrt": np.sqrt,
}
CONSTANTS = {"pi": math.pi, "e": math.e}
IMAG_UNIT = "i"
RESERVED = frozenset(FUNCTIONS) | frozenset(CONSTANTS) | {IMAG_UNIT}

DEFAULT_HERMITICITY_TOL = 1e-10


# --------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Imag:
    pass


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Imag, Const, Param, Neg, BinOp, Call]


# --------------------------------------------------------------------------
# Lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/(),\[\]−])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'num', 'name', 'op', 'eof'
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise DSLSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind == "ws":
            newlines = chunk.count("\n")
            if newlines:
                line += newlines
                line_start = pos + chunk.rfind("\n") + 1
        else:
            if chunk == "−":
                chunk = "-"
            tokens.append(Token(kind, chunk, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# --------------------------------------------------------------------------
# Parser

class _Parser:
    def __init__(self, text: str, parameter_names: Sequence[str]):
        self.tokens = tokenize(text)
        self.pos = 0
        self.params = tuple(parameter_names)

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message, tok=None):
        tok = tok or self.tok
        where = "end of input" if tok.kind == "eof" else repr(tok.text)
        return DSLSyntaxError(f"{message}, found {where}", tok.line, tok.column)

    def expect(self, text):
        if self.tok.text != text or self.tok.kind == "eof":
            raise self.error(f"expected {text!r}")
        self.pos += 1

    def accept(self, text) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.pos += 1
            return True
        return False

    def matrix(self) -> tuple[tuple[Node, ...], ...]:
        self.expect("[")
        if self.tok.text == "]":
            raise DSLError("empty matrix")
        rows = [self.row()]
        while self.accept(","):
            rows.append(self.row())
        self.expect("]")
        if self.tok.kind != "eof":
            raise self.error("trailing input after matrix")
        return tuple(rows)

    def row(self) -> tuple[Node, ...]:
        self.expect("[")
        if self.tok.text == "]":
            raise DSLError(f"empty row at line {self.tok.line}, column {self.tok.column}")
        entries = [self.expr()]
        while self.accept(","):
            entries.append(self.expr())
        self.expect("]")
        return tuple(entries)

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.pos += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.pos += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.accept("-"):
            return Neg(self.unary())
        return self.atom()

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self.pos += 1
            return Num(float(tok.text))
        if tok.kind == "name":
            self.pos += 1
            name = tok.text
            if name in FUNCTIONS:
                if not self.accept("("):
                    raise self.error(f"expected '(' after function {name!r}")
                arg = self.expr()
                self.expect(")")
                return Call(name, arg)
            if self.tok.kind == "op" and self.tok.text == "(":
                raise DSLError(f"unknown function {name!r} at line {tok.line}, column {tok.column}")
            if name == IMAG_UNIT:
                return Imag()
            if name in CONSTANTS:
                return Const(name)
            if name in self.params:
                return Param(name)
            raise DSLError(f"undeclared identifier {name!r} at line {tok.line}, column {tok.column}")
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        raise self.error("expected an expression")


# --------------------------------------------------------------------------
# Printer

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_text(node: Node) -> str:
    """Render an expression so that reparsing yields the same tree."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Imag):
        return IMAG_UNIT
    if isinstance(node, (Const, Param)):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Neg):
        inner = to_text(node.operand)
        return f"-({inner})" if isinstance(node.operand, BinOp) else f"-{inner}"
    prec = _PREC[node.op]
    left = to_text(node.left)
    right = to_text(node.right)
    if isinstance(node.left, BinOp) and _PREC[node.left.op] < prec:
        left = f"({left})"
    if isinstance(node.right, BinOp) and _PREC[node.right.op] <= prec:
        right = f"({right})"
    return f"{left} {node.op} {right}"


# --------------------------------------------------------------------------
# Evaluation

def eval_node(node: Node, env: dict[str, np.ndarray]):
    if isinstance(node, Num):
        return complex(node.value)
    if isinstance(node, Imag):
        return 1j
    if isinstance(node, Const):
        return complex(CONSTANTS[node.name])
    if isinstance(node, Param):
        return env[node.name]
    if isinstance(node, Neg):
        # 0 - v rather than -v: keeps +0j, so sqrt(-4) lands on 2i
        return 0.0 - eval_node(node.operand, env)
    if isinstance(node, Call):
        return FUNCTIONS[node.func](eval_node(node.arg, env))
    a = eval_node(node.left, env)
    b = eval_node(node.right, env)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if isinstance(b, complex) and b == 0:
        return a * complex("nan")
    return a / b


def parse_expression(text: str, parameter_names: Sequence[str] = ()) -> Node:
    """Parse a single scalar expression (used for gauge definitions)."""
    _check_parameter_names(parameter_names)
    p = _Parser(text, parameter_names)
    node = p.expr()
    if p.tok.kind != "eof":
        raise p.error("trailing input after expression")
    return node


@dataclass(frozen=True)
class MatrixExpr:
    entries: tuple[tuple[Node, ...], ...]
    parameter_names: tuple[str, ...]

    @property
    def dimension(self) -> int:
        return len(self.entries)

    def to_text(self) -> str:
        rows = ", ".join("[" + ", ".join(to_text(e) for e in row) + "]" for row in self.entries)
        return f"[{rows}]"


@dataclass(frozen=True)
class HamiltonianFamily:
    """A map from parameter points to N x N Hermitian matrices."""

    expr: MatrixExpr
    hermiticity_tol: float = DEFAULT_HERMITICITY_TOL
    text: str = field(default="", compare=False)

    @property
    def dimension(self) -> int:
        return self.expr.dimension

    @property
    def parameter_names(self) -> tuple[str, ...]:
        return self.expr.parameter_names

    def evaluate(self, point) -> np.ndarray:
        """Evaluate at one parameter point; returns an ``(N, N)`` complex matrix."""
        pts = np.asarray(point, dtype=float).reshape(1, -1)
        return self.evaluate_many(pts)[0]

    __call__ = evaluate

    def evaluate_many(self, points) -> np.ndarray:
        """Evaluate at ``m`` points (shape ``(m, d)``); returns ``(m, N, N)``.

        Hermiticity is checked, never repaired.
        """
        pts = np.asarray(points, dtype=float)
        d = len(self.parameter_names)
        if pts.ndim == 1 and d == 1:
            pts = pts[:, None]
        if d == 0 and pts.ndim in (1, 2):
            # parameter-free family: any path, coordinates ignored
            pts = np.zeros((pts.shape[0], 0))
        if pts.ndim != 2 or pts.shape[1] != d:
            raise DSLError(
                f"family takes {d} parameter(s) {self.parameter_names}, got points of shape {pts.shape}"
            )
        m = pts.shape[0]
        env = {name: pts[:, k].astype(complex) for k, name in enumerate(self.parameter_names)}
        n = self.dimension
        out = np.empty((m, n, n), dtype=complex)
        with np.errstate(all="ignore"):
            for r, row in enumerate(self.expr.entries):
                for c, node in enumerate(row):
                    out[:, r, c] = eval_node(node, env)
        bad = ~np.isfinite(out)
        if bad.any():
            k, r, c = map(int, np.argwhere(bad)[0])
            raise EvaluationError(
                f"entry [{r}][{c}] = {to_text(self.expr.entries[r][c])!r} is not finite "
                f"at point {tuple(pts[k].tolist())}"
            )
        if m:
            dev = float(np.max(np.abs(out - np.conj(np.swapaxes(out, 1, 2)))))
            if dev > self.hermiticity_tol:
                raise HermiticityError(dev, self.hermiticity_tol)
        return out


def _check_parameter_names(parameter_names):
    seen = set()
    for name in parameter_names:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
            raise DSLError(f"invalid parameter name {name!r}")
        if name in RESERVED:
            raise DSLError(f"parameter name {name!r} is reserved")
        if name in seen:
            raise DSLError(f"duplicate parameter name {name!r}")
        seen.add(name)


def parse_family(text: str, parameter_names: Sequence[str] = (),
                 hermiticity_tol: float = DEFAULT_HERMITICITY_TOL) -> HamiltonianFamily:
    """Parse a bracketed row-major matrix of expressions.

    >>> fam = parse_family("[[x, y],[y, -x]]", ["x", "y"])
    >>> fam.evaluate((1.0, 0.0)).real.tolist()
    [[1.0, 0.0], [0.0, -1.0]]
    """
    params = tuple(parameter_names)
    _check_parameter_names(params)
    rows = _Parser(text, params).matrix()
    n = len(rows)
    for r, row in enumerate(rows):
        if len(row) != n:
            raise DSLError(f"matrix is not square: row {r} has {len(row)} entries, expected {n}")
    if n < 2:
        raise DSLError("matrix dimension must be at least 2")
    return HamiltonianFamily(MatrixExpr(rows, params), hermiticity_tol, text)


SPINOR_TEXT = "[[r*cos(phi), r*sin(phi)],[r*sin(phi), -r*cos(phi)]]"
SPINOR_CARTESIAN_TEXT = "[[x, y],[y, -x]]"


def builtin_spinor_family() -> HamiltonianFamily:
    """Real two-level family ``r [[cos phi, sin phi], [sin phi, -cos phi]]`` over ``(r, phi)``.

    Eigenvalues are ``-r`` and ``+r``.
    """
    return parse_family(SPINOR_TEXT, ("r", "phi"))


def builtin_spinor_cartesian() -> HamiltonianFamily:
    return parse_family(SPINOR_CARTESIAN_TEXT, ("x", "y"))


BUILTINS = {
    "spinor": builtin_spinor_family,
    "spinor-cartesian": builtin_spinor_cartesian,
}
