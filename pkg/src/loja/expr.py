"""Piecewise semialgebraic expressions with a round-tripping parser and a vectorised evaluator.

The grammar is whitespace-insensitive::

    fn       := expr | "piecewise" "{" branch (";" branch)* "}"
    branch   := guard ":" expr
    guard    := conj ("||" conj)*
    conj     := cmp ("&&" cmp)*
    cmp      := expr ("<"|"<="|"=="|">="|">") expr
    expr     := term (("+"|"-") term)*
    term     := unary (("*"|"/") unary)*
    unary    := "-" unary | factor
    factor   := atom ("^" exponent)?
    exponent := nonneg-integer | "(" expr ")" | func "(" ... ")"
    atom     := number | "x" positive-integer | "(" expr ")" | func "(" expr ("," expr)* ")"
    func     := "sqrt" | "abs" | "floor" | "sign" | "min" | "max"

A non-literal exponent (``(x1 - floor(x1))^floor(x1)``) must evaluate to a
nonnegative integer at every point where it is used.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

from .errors import ArityError, DomainError, EvaluationError, ParseError

UNARY_FUNCS = ("sqrt", "abs", "floor", "sign")
NARY_FUNCS = ("min", "max")
CMP_OPS = ("<", "<=", "==", ">=", ">")


# ---------------------------------------------------------------------------
# Tree nodes


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: Union[int, "Expr"]


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


Expr = Union[Const, Var, BinOp, Pow, Neg, Call]


@dataclass(frozen=True)
class Cmp:
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class And:
    parts: tuple


@dataclass(frozen=True)
class Or:
    parts: tuple


Guard = Union[Cmp, And, Or]


@dataclass(frozen=True)
class Branch:
    guard: Guard | None
    body: Expr


@dataclass(frozen=True)
class PiecewiseFn:
    """A scalar function of ``arity`` variables given by ordered guarded branches.

    A plain expression is stored as a single branch with ``guard=None``.
    Evaluation uses the first branch whose guard holds.
    """

    arity: int
    branches: tuple

    @property
    def is_plain(self) -> bool:
        return len(self.branches) == 1 and self.branches[0].guard is None

    def __call__(self, x):
        return evaluate(self, x)

    def __str__(self) -> str:
        return to_source(self)


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op><=|>=|==|&&|\|\||[<>+\-*/^(),;:{}])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str  # num, var, ident, op, end
    text: str
    line: int
    col: int


def _tokenize(source: str) -> Iterator[_Tok]:
    pos, line, line_start = 0, 1, 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        col = pos - line_start + 1
        if kind == "ws":
            nl = text.count("\n")
            if nl:
                line += nl
                line_start = pos + text.rindex("\n") + 1
        elif kind == "ident" and re.fullmatch(r"x\d+", text):
            yield _Tok("var", text, line, col)
        else:
            yield _Tok(kind, text, line, col)
        pos = m.end()
    yield _Tok("end", "", line, pos - line_start + 1)


# ---------------------------------------------------------------------------
# Recursive-descent parser


class _Parser:
    def __init__(self, source: str):
        self.toks = list(_tokenize(source))
        self.i = 0
        self.max_var = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message: str, tok: _Tok | None = None):
        tok = tok or self.tok
        raise ParseError(message, tok.line, tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.kind in ("op", "ident") and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            shown = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {shown!r}")

    # fn := expr | piecewise { branch (; branch)* }
    def parse_fn(self):
        if self.tok.kind == "ident" and self.tok.text == "piecewise":
            self.i += 1
            self.expect("{")
            branches = [self.parse_branch()]
            while self.accept(";"):
                branches.append(self.parse_branch())
            self.expect("}")
        else:
            branches = [Branch(None, self.parse_expr())]
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.text!r}")
        return tuple(branches)

    def parse_branch(self) -> Branch:
        guard = self.parse_guard()
        self.expect(":")
        return Branch(guard, self.parse_expr())

    def parse_guard(self) -> Guard:
        parts = [self.parse_conj()]
        while self.accept("||"):
            parts.append(self.parse_conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def parse_conj(self) -> Guard:
        parts = [self.parse_cmp()]
        while self.accept("&&"):
            parts.append(self.parse_cmp())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def parse_cmp(self) -> Cmp:
        left = self.parse_expr()
        tok = self.tok
        if tok.kind == "op" and tok.text in CMP_OPS:
            self.i += 1
            return Cmp(tok.text, left, self.parse_expr())
        self.error("expected a comparison operator")

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.parse_term())
        return node

    def parse_term(self) -> Expr:
        node = self.parse_unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.parse_unary())
        return node

    def parse_unary(self) -> Expr:
        if self.accept("-"):
            arg = self.parse_unary()
            if isinstance(arg, Const):
                return Const(-arg.value)
            return Neg(arg)
        return self.parse_factor()

    def parse_factor(self) -> Expr:
        base = self.parse_atom()
        if self.accept("^"):
            tok = self.tok
            if tok.kind == "num":
                if not re.fullmatch(r"\d+", tok.text):
                    self.error("exponent must be a nonnegative integer", tok)
                self.i += 1
                return Pow(base, int(tok.text))
            if tok.kind == "op" and tok.text == "-":
                self.error("negative exponents are not allowed; divide instead", tok)
            if (tok.kind == "op" and tok.text == "(") or tok.kind == "ident":
                return Pow(base, self.parse_atom())
            self.error("expected an exponent", tok)
        return base

    def parse_atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Const(float(tok.text))
        if tok.kind == "var":
            index = int(tok.text[1:])
            if index < 1:
                raise ArityError(f"variable {tok.text} at line {tok.line}, column {tok.col}: indices start at 1")
            self.max_var = max(self.max_var, index)
            self.i += 1
            return Var(index)
        if tok.kind == "op" and tok.text == "(":
            self.i += 1
            node = self.parse_expr()
            self.expect(")")
            return node
        if tok.kind == "ident":
            name = tok.text
            if name not in UNARY_FUNCS + NARY_FUNCS:
                self.error(f"unknown function {name!r}", tok)
            self.i += 1
            self.expect("(")
            args = [self.parse_expr()]
            while self.accept(","):
                args.append(self.parse_expr())
            self.expect(")")
            if name in UNARY_FUNCS and len(args) != 1:
                self.error(f"{name} takes exactly one argument", tok)
            return Call(name, tuple(args))
        shown = tok.text or "end of input"
        self.error(f"unexpected {shown!r}")


def parse(source: str, arity: int | None = None) -> PiecewiseFn:
    """Parse ``source`` into a :class:`PiecewiseFn`.

    With ``arity=None`` the arity is the largest variable index used (at
    least 1). With an explicit arity, any larger index is an ArityError.
    """
    p = _Parser(source)
    branches = p.parse_fn()
    if arity is None:
        arity = max(1, p.max_var)
    elif arity < 1:
        raise ArityError("arity must be positive")
    elif p.max_var > arity:
        raise ArityError(f"variable x{p.max_var} exceeds declared arity {arity}")
    return PiecewiseFn(arity, branches)


def parse_guard(source: str, arity: int | None = None) -> Guard:
    p = _Parser(source)
    guard = p.parse_guard()
    if p.tok.kind != "end":
        p.error(f"unexpected {p.tok.text!r}")
    if arity is not None and p.max_var > arity:
        raise ArityError(f"variable x{p.max_var} exceeds declared arity {arity}")
    return guard


# ---------------------------------------------------------------------------
# Printer (fully parenthesised, so that parse(print(t)) == t)


def _fmt_expr(node: Expr) -> str:
    if isinstance(node, Const):
        text = repr(float(node.value))
        return f"({text})" if np.signbit(node.value) else text  # -0.0 too
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, BinOp):
        return f"({_fmt_expr(node.left)} {node.op} {_fmt_expr(node.right)})"
    if isinstance(node, Neg):
        return f"(-{_fmt_expr(node.arg)})"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(_fmt_expr(a) for a in node.args)})"
    if isinstance(node, Pow):
        base = _fmt_expr(node.base)
        if isinstance(node.base, Pow):
            base = f"({base})"
        if isinstance(node.exponent, int):
            exp = str(node.exponent)
        elif isinstance(node.exponent, Call):
            exp = _fmt_expr(node.exponent)
        else:
            exp = f"({_fmt_expr(node.exponent)})"
        return f"{base}^{exp}"
    raise TypeError(f"not an expression node: {node!r}")


def _fmt_guard(g: Guard) -> str:
    if isinstance(g, Cmp):
        return f"{_fmt_expr(g.left)} {g.op} {_fmt_expr(g.right)}"
    if isinstance(g, And):
        return " && ".join(_fmt_guard(p) for p in g.parts)
    if isinstance(g, Or):
        return " || ".join(_fmt_guard(p) for p in g.parts)
    raise TypeError(f"not a guard node: {g!r}")


def to_source(fn: PiecewiseFn | Expr | Guard) -> str:
    if isinstance(fn, PiecewiseFn):
        if fn.is_plain:
            return _fmt_expr(fn.branches[0].body)
        inner = " ; ".join(f"{_fmt_guard(b.guard)} : {_fmt_expr(b.body)}" for b in fn.branches)
        return f"piecewise{{ {inner} }}"
    if isinstance(fn, (Cmp, And, Or)):
        return _fmt_guard(fn)
    return _fmt_expr(fn)


# ---------------------------------------------------------------------------
# Evaluation


def _as_points(x, arity: int) -> np.ndarray:
    X = np.asarray(x, dtype=float)
    if X.ndim == 0:
        X = X.reshape(1, 1)
    elif X.ndim == 1:
        X = X.reshape(-1, 1) if arity == 1 else X.reshape(1, -1)
    if X.shape[1] != arity:
        raise ArityError(f"points have dimension {X.shape[1]}, function has arity {arity}")
    return X


def _eval_node(node: Expr, X: np.ndarray) -> np.ndarray:
    if isinstance(node, Const):
        return np.full(X.shape[0], node.value)
    if isinstance(node, Var):
        if node.index > X.shape[1]:
            raise ArityError(f"variable x{node.index} exceeds point dimension {X.shape[1]}")
        return X[:, node.index - 1].copy()
    if isinstance(node, Neg):
        return -_eval_node(node.arg, X)
    if isinstance(node, BinOp):
        a = _eval_node(node.left, X)
        b = _eval_node(node.right, X)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        bad = b == 0
        if np.any(bad):
            at = X[np.argmax(bad)]
            raise EvaluationError(f"division by zero at {at.tolist()}")
        return a / b
    if isinstance(node, Pow):
        base = _eval_node(node.base, X)
        if isinstance(node.exponent, int):
            return base ** node.exponent
        exp = _eval_node(node.exponent, X)
        bad = (exp < 0) | (exp != np.floor(exp))
        if np.any(bad):
            at = X[np.argmax(bad)]
            raise EvaluationError(f"exponent is not a nonnegative integer at {at.tolist()}")
        return base ** exp
    if isinstance(node, Call):
        args = [_eval_node(a, X) for a in node.args]
        if node.name == "sqrt":
            bad = args[0] < 0
            if np.any(bad):
                at = X[np.argmax(bad)]
                raise EvaluationError(f"sqrt of a negative number at {at.tolist()}")
            return np.sqrt(args[0])
        if node.name == "abs":
            return np.abs(args[0])
        if node.name == "floor":
            return np.floor(args[0])
        if node.name == "sign":
            return np.sign(args[0])
        if node.name == "min":
            return np.minimum.reduce(args)
        if node.name == "max":
            return np.maximum.reduce(args)
    raise TypeError(f"not an expression node: {node!r}")


def eval_guard(guard: Guard, X: np.ndarray) -> np.ndarray:
    if isinstance(guard, Cmp):
        a = _eval_node(guard.left, X)
        b = _eval_node(guard.right, X)
        return {
            "<": np.less,
            "<=": np.less_equal,
            "==": np.equal,
            ">=": np.greater_equal,
            ">": np.greater,
        }[guard.op](a, b)
    if isinstance(guard, And):
        out = np.ones(X.shape[0], dtype=bool)
        for p in guard.parts:
            out &= eval_guard(p, X)
        return out
    if isinstance(guard, Or):
        out = np.zeros(X.shape[0], dtype=bool)
        for p in guard.parts:
            out |= eval_guard(p, X)
        return out
    raise TypeError(f"not a guard node: {guard!r}")


def _eval_body_lenient(body: Expr, X: np.ndarray) -> np.ndarray:
    try:
        return _eval_node(body, X)
    except EvaluationError:
        out = np.full(X.shape[0], np.nan)
        for i in range(X.shape[0]):
            try:
                out[i] = _eval_node(body, X[i : i + 1])[0]
            except EvaluationError:
                pass
        return out


def evaluate_many(fn: PiecewiseFn, X, strict: bool = True, on_error: str = "raise") -> np.ndarray:
    """Evaluate ``fn`` at every row of ``X``.

    Points where no guard holds raise DomainError when ``strict``; otherwise
    they come back as NaN (used by samplers that treat them as lying outside
    the function's domain). With ``on_error="nan"`` arithmetic failures
    (sqrt of a negative, division by zero) also become NaN instead of raising.
    """
    body_eval = _eval_body_lenient if on_error == "nan" else _eval_node
    X = _as_points(X, fn.arity)
    out = np.full(X.shape[0], np.nan)
    remaining = np.ones(X.shape[0], dtype=bool)
    with np.errstate(all="ignore"):
        for br in fn.branches:
            if not remaining.any():
                break
            if br.guard is None:
                mask = remaining.copy()
            else:
                mask = remaining & eval_guard(br.guard, X)
            if mask.any():
                out[mask] = body_eval(br.body, X[mask])
                remaining &= ~mask
    if strict and remaining.any():
        at = X[np.argmax(remaining)]
        raise DomainError(f"no branch guard holds at {at.tolist()}")
    return out


def evaluate(fn: PiecewiseFn, x) -> float:
    """Evaluate at a single point (a scalar is accepted when arity is 1)."""
    X = np.asarray(x, dtype=float).reshape(1, -1)
    return float(evaluate_many(fn, X)[0])


def lint(fn: PiecewiseFn, X) -> list[str]:
    """Warn about sample points where more than one guard holds."""
    X = _as_points(X, fn.arity)
    guards = [b.guard for b in fn.branches]
    masks = []
    with np.errstate(all="ignore"):
        for g in guards:
            masks.append(np.ones(X.shape[0], dtype=bool) if g is None else eval_guard(g, X))
    warnings = []
    for i in range(len(masks)):
        for j in range(i + 1, len(masks)):
            both = masks[i] & masks[j]
            if guards[i] is None or guards[j] is None:
                continue
            if both.any():
                at = X[np.argmax(both)].tolist()
                warnings.append(
                    f"branches {i + 1} and {j + 1} overlap at {int(both.sum())} sample(s), e.g. {at}"
                )
    return warnings


def load(path, arity: int | None = None) -> PiecewiseFn:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), arity)


def variables(node) -> set[int]:
    """Variable indices used anywhere in an expression or guard."""
    if isinstance(node, PiecewiseFn):
        out: set[int] = set()
        for b in node.branches:
            out |= variables(b.body)
            if b.guard is not None:
                out |= variables(b.guard)
        return out
    if isinstance(node, Var):
        return {node.index}
    if isinstance(node, Const):
        return set()
    if isinstance(node, (BinOp, Cmp)):
        return variables(node.left) | variables(node.right)
    if isinstance(node, Neg):
        return variables(node.arg)
    if isinstance(node, Pow):
        out = variables(node.base)
        if not isinstance(node.exponent, int):
            out |= variables(node.exponent)
        return out
    if isinstance(node, (Call,)):
        return set().union(*(variables(a) for a in node.args))
    if isinstance(node, (And, Or)):
        return set().union(*(variables(p) for p in node.parts))
    raise TypeError(f"unknown node {node!r}")

