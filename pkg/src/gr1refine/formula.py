"""Boolean expressions, GR(1) elements, and the line-oriented spec syntax.

A spec file declares input/output variables and lists assumptions and
guarantees, one per line.  Each assumption or guarantee is one of the three
GR(1) element classes: an initial condition (pure Boolean), an invariant
(``G body``, where ``X`` may be applied to variables inside the body), or a
fairness condition (``GF body``).
"""

from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum
from typing import Iterator


class ParseError(Exception):
    """Raised on lexical, syntactic, or GR(1)-class violations.

    Carries the 1-based ``line`` and ``column`` of the offending token.
    """

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class EvalError(Exception):
    """Raised when an expression cannot be evaluated over a valuation."""


class VarKind(Enum):
    INPUT = "input"
    OUTPUT = "output"
    MEMORY = "memory"


@dataclass(frozen=True)
class Variable:
    name: str
    kind: VarKind


# --------------------------------------------------------------------------
# Expression tree


class BoolExpr:
    """Base class for Boolean expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Var(BoolExpr):
    var: Variable


@dataclass(frozen=True)
class NextVar(BoolExpr):
    """Value of a variable at the next step.  Only legal inside invariants."""

    var: Variable


@dataclass(frozen=True)
class Const(BoolExpr):
    value: bool


@dataclass(frozen=True)
class Not(BoolExpr):
    operand: BoolExpr


@dataclass(frozen=True)
class And(BoolExpr):
    left: BoolExpr
    right: BoolExpr


@dataclass(frozen=True)
class Or(BoolExpr):
    left: BoolExpr
    right: BoolExpr


@dataclass(frozen=True)
class Implies(BoolExpr):
    left: BoolExpr
    right: BoolExpr


@dataclass(frozen=True)
class Iff(BoolExpr):
    left: BoolExpr
    right: BoolExpr


def contains_next(expr: BoolExpr) -> bool:
    if isinstance(expr, NextVar):
        return True
    if isinstance(expr, (Var, Const)):
        return False
    if isinstance(expr, Not):
        return contains_next(expr.operand)
    return contains_next(expr.left) or contains_next(expr.right)


def variables_of(expr: BoolExpr) -> frozenset[Variable]:
    """All variables mentioned by the expression, current or next."""
    if isinstance(expr, (Var, NextVar)):
        return frozenset((expr.var,))
    if isinstance(expr, Const):
        return frozenset()
    if isinstance(expr, Not):
        return variables_of(expr.operand)
    return variables_of(expr.left) | variables_of(expr.right)


def next_variables_of(expr: BoolExpr) -> frozenset[Variable]:
    """Variables appearing under a Next operator."""
    if isinstance(expr, NextVar):
        return frozenset((expr.var,))
    if isinstance(expr, (Var, Const)):
        return frozenset()
    if isinstance(expr, Not):
        return next_variables_of(expr.operand)
    return next_variables_of(expr.left) | next_variables_of(expr.right)


# --------------------------------------------------------------------------
# Valuations


class Valuation(Mapping):
    """Total truth assignment over a fixed universe of variable names.

    Keys may be variable names or ``Variable`` objects.  Two valuations over
    the same universe compare equal iff they agree on every variable.
    """

    __slots__ = ("_assign",)

    def __init__(self, assignment: Mapping):
        self._assign = {
            (k.name if isinstance(k, Variable) else k): bool(v)
            for k, v in assignment.items()
        }

    def __getitem__(self, key) -> bool:
        name = key.name if isinstance(key, Variable) else key
        return self._assign[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._assign)

    def __len__(self) -> int:
        return len(self._assign)

    @property
    def universe(self) -> frozenset[str]:
        return frozenset(self._assign)

    def true_names(self) -> tuple[str, ...]:
        return tuple(sorted(n for n, v in self._assign.items() if v))

    def __eq__(self, other) -> bool:
        if isinstance(other, Valuation):
            return self._assign == other._assign
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._assign.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}={'1' if v else '0'}" for n, v in sorted(self._assign.items()))
        return f"Valuation({inner})"


def eval_expr(expr: BoolExpr, now: Mapping, next: Mapping | None = None) -> bool:
    """Evaluate ``expr`` over the current (and, for invariants, next) valuation."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        try:
            return now[expr.var.name]
        except KeyError:
            raise EvalError(f"variable {expr.var.name!r} outside valuation universe") from None
    if isinstance(expr, NextVar):
        if next is None:
            raise EvalError(f"expression reads X {expr.var.name} but no next valuation given")
        try:
            return next[expr.var.name]
        except KeyError:
            raise EvalError(f"variable {expr.var.name!r} outside valuation universe") from None
    if isinstance(expr, Not):
        return not eval_expr(expr.operand, now, next)
    if isinstance(expr, And):
        return eval_expr(expr.left, now, next) and eval_expr(expr.right, now, next)
    if isinstance(expr, Or):
        return eval_expr(expr.left, now, next) or eval_expr(expr.right, now, next)
    if isinstance(expr, Implies):
        return (not eval_expr(expr.left, now, next)) or eval_expr(expr.right, now, next)
    if isinstance(expr, Iff):
        return eval_expr(expr.left, now, next) == eval_expr(expr.right, now, next)
    raise TypeError(f"not a BoolExpr: {expr!r}")


# --------------------------------------------------------------------------
# GR(1) elements


class Gr1Class(Enum):
    INITIAL = "initial"
    INVARIANT = "invariant"
    FAIRNESS = "fairness"


class Gr1Element:
    """One assumption or guarantee: an initial condition, invariant, or
    fairness condition.

    Equality and hashing are by canonical form; no semantic identification
    beyond operand sorting and double-negation removal is ever applied.
    """

    __slots__ = ("gr1_class", "body", "_canonical")

    def __init__(self, gr1_class: Gr1Class, body: BoolExpr):
        if gr1_class is not Gr1Class.INVARIANT and contains_next(body):
            raise ValueError(f"Next operator not allowed in a {gr1_class.value} condition")
        self.gr1_class = gr1_class
        self.body = body
        self._canonical = _canonical_element(gr1_class, body)

    @property
    def canonical(self) -> str:
        return self._canonical

    def variables(self) -> frozenset[Variable]:
        return variables_of(self.body)

    def __eq__(self, other) -> bool:
        if isinstance(other, Gr1Element):
            return self._canonical == other._canonical
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._canonical)

    def __repr__(self) -> str:
        return f"Gr1Element({self._canonical!r})"


def initial(body: BoolExpr) -> Gr1Element:
    return Gr1Element(Gr1Class.INITIAL, body)


def invariant(body: BoolExpr) -> Gr1Element:
    return Gr1Element(Gr1Class.INVARIANT, body)


def fairness(body: BoolExpr) -> Gr1Element:
    return Gr1Element(Gr1Class.FAIRNESS, body)


@dataclass(frozen=True)
class Gr1Spec:
    inputs: tuple[Variable, ...]
    outputs: tuple[Variable, ...]
    assumptions: tuple[Gr1Element, ...]
    guarantees: tuple[Gr1Element, ...]

    @property
    def variables(self) -> tuple[Variable, ...]:
        return self.inputs + self.outputs

    def variable_map(self) -> dict[str, Variable]:
        return {v.name: v for v in self.variables}

    def with_assumptions(self, extra) -> "Gr1Spec":
        """New spec with ``extra`` elements conjoined to the assumptions."""
        return Gr1Spec(self.inputs, self.outputs, self.assumptions + tuple(extra), self.guarantees)


# --------------------------------------------------------------------------
# Canonical form

_ATOMIC = (Var, NextVar, Const)


def _canon(expr: BoolExpr) -> BoolExpr:
    """Flatten-and-sort And/Or operands, drop double negations (bottom-up)."""
    if isinstance(expr, _ATOMIC):
        return expr
    if isinstance(expr, Not):
        sub = _canon(expr.operand)
        if isinstance(sub, Not):
            return sub.operand
        return Not(sub)
    if isinstance(expr, (And, Or)):
        ctor = type(expr)
        ops = sorted(_flatten(expr, ctor), key=_print_expr)
        acc = ops[0]
        for op in ops[1:]:
            acc = ctor(acc, op)
        return acc
    if isinstance(expr, Implies):
        return Implies(_canon(expr.left), _canon(expr.right))
    if isinstance(expr, Iff):
        return Iff(_canon(expr.left), _canon(expr.right))
    raise TypeError(f"not a BoolExpr: {expr!r}")


def _flatten(expr: BoolExpr, ctor) -> list[BoolExpr]:
    if isinstance(expr, ctor):
        return _flatten(expr.left, ctor) + _flatten(expr.right, ctor)
    return [_canon(expr)]


def _print_expr(expr: BoolExpr) -> str:
    if isinstance(expr, Const):
        return "true" if expr.value else "false"
    if isinstance(expr, Var):
        return expr.var.name
    if isinstance(expr, NextVar):
        return f"X {expr.var.name}"
    if isinstance(expr, Not):
        inner = _print_expr(expr.operand)
        if isinstance(expr.operand, (Var, Const)):
            return f"!{inner}"
        if isinstance(expr.operand, NextVar):
            return f"!{inner}"
        return f"!({inner})"
    if isinstance(expr, (And, Or)):
        sep = " & " if isinstance(expr, And) else " | "
        parts = []
        stack = [expr]
        ctor = type(expr)
        while stack:
            node = stack.pop()
            if isinstance(node, ctor):
                stack.append(node.right)
                stack.append(node.left)
            else:
                parts.append(_print_expr(node))
        return "(" + sep.join(parts) + ")"
    if isinstance(expr, Implies):
        return f"({_print_expr(expr.left)} -> {_print_expr(expr.right)})"
    if isinstance(expr, Iff):
        return f"({_print_expr(expr.left)} <-> {_print_expr(expr.right)})"
    raise TypeError(f"not a BoolExpr: {expr!r}")


def _canonical_element(gr1_class: Gr1Class, body: BoolExpr) -> str:
    text = _print_expr(_canon(body))
    if gr1_class is Gr1Class.FAIRNESS:
        return f"GF {text}"
    if gr1_class is Gr1Class.INVARIANT:
        return f"G {text}"
    return text


def canonical_form(element: Gr1Element) -> str:
    """Deterministic string defining assumption equality for the whole tool."""
    return element.canonical


# --------------------------------------------------------------------------
# Lexer

_KEYWORDS = frozenset({"G", "F", "X", "GF", "U", "true", "false"})
_IDENT_RE = re.compile(r"[a-zA-Z_][a-zA-Z0-9_]*")

_Token = tuple  # (kind, text, column)


def _lex_formula(text: str, line_no: int) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t":
            i += 1
            continue
        if ch == "#":
            break
        col = i + 1
        if ch.isascii() and (ch.isalpha() or ch == "_"):
            m = _IDENT_RE.match(text, i)
            word = m.group(0)
            kind = word if word in _KEYWORDS else "ident"
            tokens.append((kind, word, col))
            i = m.end()
        elif text.startswith("->", i):
            tokens.append(("->", "->", col))
            i += 2
        elif text.startswith("<->", i):
            tokens.append(("<->", "<->", col))
            i += 3
        elif ch in "!&|()":
            tokens.append((ch, ch, col))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", line_no, col)
    tokens.append(("end", "", n + 1))
    return tokens


class _FormulaParser:
    """Recursive-descent parser over one formula.

    Precedence, tightest first: ``!``/``X``, ``&``, ``|``, ``->``
    (right-associative), ``<->``.
    """

    def __init__(self, tokens: list[_Token], line_no: int, variables: Mapping):
        self.tokens = tokens
        self.pos = 0
        self.line_no = line_no
        self.variables = variables

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise ParseError(message, self.line_no, tok[2])

    def parse_full(self) -> BoolExpr:
        expr = self.parse_iff()
        kind, text, _ = self.peek()
        if kind != "end":
            if kind == "U":
                self.error("the Until operator is not GR(1); encode it with auxiliary variables")
            self.error(f"unexpected {text!r}")
        return expr

    def parse_iff(self) -> BoolExpr:
        left = self.parse_implies()
        while self.peek()[0] == "<->":
            self.take()
            left = Iff(left, self.parse_implies())
        return left

    def parse_implies(self) -> BoolExpr:
        left = self.parse_or()
        if self.peek()[0] == "->":
            self.take()
            return Implies(left, self.parse_implies())
        return left

    def parse_or(self) -> BoolExpr:
        left = self.parse_and()
        while self.peek()[0] == "|":
            self.take()
            left = Or(left, self.parse_and())
        return left

    def parse_and(self) -> BoolExpr:
        left = self.parse_unary()
        while self.peek()[0] == "&":
            self.take()
            left = And(left, self.parse_unary())
        return left

    def parse_unary(self) -> BoolExpr:
        kind, text, col = self.peek()
        if kind == "!":
            self.take()
            return Not(self.parse_unary())
        if kind == "X":
            self.take()
            sub = self.parse_unary()
            return self._push_next(sub, col)
        if kind in ("G", "F", "GF"):
            self.error(
                f"temporal operator {text!r} is only allowed as an element prefix; "
                "nested temporal formulas are not GR(1)"
            )
        return self.parse_primary()

    def parse_primary(self) -> BoolExpr:
        kind, text, col = self.take()
        if kind == "true":
            return Const(True)
        if kind == "false":
            return Const(False)
        if kind == "ident":
            var = self.variables.get(text)
            if var is None:
                raise ParseError(f"undeclared variable {text!r}", self.line_no, col)
            return Var(var)
        if kind == "(":
            expr = self.parse_iff()
            closing = self.take()
            if closing[0] != ")":
                if closing[0] == "U":
                    self.error("the Until operator is not GR(1); encode it with auxiliary variables", closing)
                self.error("expected ')'", closing)
            return expr
        if kind == "U":
            self.error("the Until operator is not GR(1); encode it with auxiliary variables", (kind, text, col))
        self.error(f"expected a variable, constant, or '(' but found {text or 'end of line'!r}", (kind, text, col))

    def _push_next(self, expr: BoolExpr, col: int) -> BoolExpr:
        # X distributes over the Boolean connectives down to variables.
        if isinstance(expr, Var):
            return NextVar(expr.var)
        if isinstance(expr, NextVar):
            raise ParseError("nested X operators are not allowed", self.line_no, col)
        if isinstance(expr, Const):
            return expr
        if isinstance(expr, Not):
            return Not(self._push_next(expr.operand, col))
        ctor = type(expr)
        return ctor(self._push_next(expr.left, col), self._push_next(expr.right, col))


# --------------------------------------------------------------------------
# Spec files


def parse_element(text: str, variables: Mapping, line_no: int = 1,
                  is_assumption: bool = False) -> Gr1Element:
    """Parse one assumption/guarantee formula, e.g. ``GF !req``.

    ``variables`` maps names to Variable objects.  Assumption invariants may
    apply X to input variables only (the environment owns the next inputs).
    """
    tokens = _lex_formula(text, line_no)
    kind = tokens[0][0]
    gr1_class = Gr1Class.INITIAL
    if kind == "GF":
        gr1_class = Gr1Class.FAIRNESS
        tokens = tokens[1:]
    elif kind == "G":
        if tokens[1][0] == "F":
            gr1_class = Gr1Class.FAIRNESS
            tokens = tokens[2:]
        else:
            gr1_class = Gr1Class.INVARIANT
            tokens = tokens[1:]
    elif kind == "F":
        raise ParseError(
            "an eventuality without G is not GR(1); encode it with auxiliary variables",
            line_no, tokens[0][2],
        )
    parser = _FormulaParser(tokens, line_no, variables)
    body = parser.parse_full()
    if gr1_class is not Gr1Class.INVARIANT and contains_next(body):
        raise ParseError(
            f"X is not allowed inside a {gr1_class.value} condition", line_no, 1
        )
    if is_assumption and gr1_class is Gr1Class.INVARIANT:
        bad = [v for v in next_variables_of(body) if v.kind is not VarKind.INPUT]
        if bad:
            raise ParseError(
                f"assumption invariant applies X to non-input variable {bad[0].name!r}; "
                "the environment only controls the next inputs",
                line_no, 1,
            )
    return Gr1Element(gr1_class, body)


def parse_spec(text: str) -> Gr1Spec:
    """Parse a complete spec file (see the module docstring for the format)."""
    inputs: list[Variable] = []
    outputs: list[Variable] = []
    seen: dict[str, int] = {}
    pending: list[tuple[str, str, int]] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        keyword = parts[0]
        rest = parts[1] if len(parts) > 1 else ""
        if keyword in ("INPUT", "OUTPUT"):
            kind = VarKind.INPUT if keyword == "INPUT" else VarKind.OUTPUT
            names = rest.split()
            if not names:
                raise ParseError(f"{keyword} line declares no variables", line_no, 1)
            for name in names:
                if not _IDENT_RE.fullmatch(name):
                    raise ParseError(f"invalid variable name {name!r}", line_no, 1)
                if name in _KEYWORDS:
                    raise ParseError(f"{name!r} is a reserved word", line_no, 1)
                if name in seen:
                    raise ParseError(
                        f"duplicate declaration of variable {name!r} "
                        f"(first declared on line {seen[name]})", line_no, 1)
                seen[name] = line_no
                (inputs if kind is VarKind.INPUT else outputs).append(Variable(name, kind))
        elif keyword in ("ASSUMPTION", "GUARANTEE"):
            if not rest:
                raise ParseError(f"{keyword} line has no formula", line_no, 1)
            pending.append((keyword, rest, line_no))
        else:
            raise ParseError(
                f"unknown declaration {keyword!r} (expected INPUT, OUTPUT, ASSUMPTION, or GUARANTEE)",
                line_no, 1,
            )

    variables = {v.name: v for v in inputs + outputs}
    assumptions: list[Gr1Element] = []
    guarantees: list[Gr1Element] = []
    for keyword, body_text, line_no in pending:
        element = parse_element(body_text, variables, line_no,
                                is_assumption=keyword == "ASSUMPTION")
        (assumptions if keyword == "ASSUMPTION" else guarantees).append(element)
    return Gr1Spec(tuple(inputs), tuple(outputs), tuple(assumptions), tuple(guarantees))


def pretty_print(spec: Gr1Spec) -> str:
    """Render a spec back to its canonical file form."""
    lines = []
    if spec.inputs:
        lines.append("INPUT " + " ".join(v.name for v in spec.inputs))
    if spec.outputs:
        lines.append("OUTPUT " + " ".join(v.name for v in spec.outputs))
    for a in spec.assumptions:
        lines.append("ASSUMPTION " + a.canonical)
    for g in spec.guarantees:
        lines.append("GUARANTEE " + g.canonical)
    return "\n".join(lines) + "\n"
