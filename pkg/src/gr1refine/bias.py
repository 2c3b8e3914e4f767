"""Template-based candidate assumption generation.

Given a freshly computed counterstrategy, propose alternative assumptions
that (a) eliminate it, (b) keep the assumption set satisfiable, and (c) are
not already part of the current refinement.  Templates, in enumeration
order: fairness over input literals, fairness over output literals,
invariants ``G (L -> X lit_in)`` with an input-literal conclusion and at most
``max_left_literals`` literals on the left, and initial input literals.

``apply_bias`` re-sorts the surviving candidates by template size (number of
literal occurrences) then canonical form, and truncates to ``width``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import game, modelcheck
from .formula import (
    And,
    BoolExpr,
    Gr1Class,
    Gr1Element,
    Gr1Spec,
    Iff,
    Implies,
    NextVar,
    Not,
    Or,
    Var,
)


@dataclass(frozen=True)
class BiasConfig:
    width: int = 5
    template_classes: frozenset[Gr1Class] = field(
        default_factory=lambda: frozenset(Gr1Class)
    )
    max_left_literals: int = 1

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("bias width must be at least 1")


def _literals(variables) -> list[BoolExpr]:
    out: list[BoolExpr] = []
    for v in variables:
        out.append(Var(v))
        out.append(Not(Var(v)))
    return out


def _next_literals(variables) -> list[BoolExpr]:
    out: list[BoolExpr] = []
    for v in variables:
        out.append(NextVar(v))
        out.append(Not(NextVar(v)))
    return out


def template_size(element: Gr1Element) -> int:
    """Number of literal occurrences in the template body."""
    def count(e: BoolExpr) -> int:
        if isinstance(e, (Var, NextVar)):
            return 1
        if isinstance(e, Not):
            return count(e.operand)
        if isinstance(e, (And, Or, Implies, Iff)):
            return count(e.left) + count(e.right)
        return 0
    return count(element.body)


def enumerate_templates(spec: Gr1Spec, cfg: BiasConfig):
    """Yield candidate assumptions, deduplicated by canonical form."""
    seen: set[str] = set()

    def fresh(gr1_class: Gr1Class, body: BoolExpr):
        element = Gr1Element(gr1_class, body)
        if element.canonical in seen:
            return None
        seen.add(element.canonical)
        return element

    if Gr1Class.FAIRNESS in cfg.template_classes:
        for lit in _literals(spec.inputs) + _literals(spec.outputs):
            element = fresh(Gr1Class.FAIRNESS, lit)
            if element:
                yield element

    if Gr1Class.INVARIANT in cfg.template_classes:
        for n_left in range(cfg.max_left_literals + 1):
            if n_left == 0:
                for rhs in _next_literals(spec.inputs):
                    element = fresh(Gr1Class.INVARIANT, rhs)
                    if element:
                        yield element
                continue
            for combo in itertools.combinations(spec.variables, n_left):
                for lits in itertools.product(*[_literals([v]) for v in combo]):
                    left = lits[0]
                    for extra in lits[1:]:
                        left = And(left, extra)
                    for rhs in _next_literals(spec.inputs):
                        element = fresh(Gr1Class.INVARIANT, Implies(left, rhs))
                        if element:
                            yield element

    if Gr1Class.INITIAL in cfg.template_classes:
        for lit in _literals(spec.inputs):
            element = fresh(Gr1Class.INITIAL, lit)
            if element:
                yield element


def apply_bias(counterstrategy, current_assumptions, spec: Gr1Spec,
               cfg: BiasConfig | None = None,
               var_cap: int = game.DEFAULT_VAR_CAP) -> list[Gr1Element]:
    """Alternative assumptions eliminating ``counterstrategy``.

    An empty result is a normal outcome (a dead search branch), not an
    error: no template within the class/size budget eliminated it.
    """
    cfg = cfg or BiasConfig()
    current = {a.canonical for a in current_assumptions}
    survivors = []
    for candidate in enumerate_templates(spec, cfg):
        if candidate.canonical in current:
            continue
        if not modelcheck.eliminates(candidate, counterstrategy):
            continue
        if not game.assumptions_satisfiable(
            tuple(current_assumptions) + (candidate,), spec.variables, var_cap
        ):
            continue
        survivors.append(candidate)
    survivors.sort(key=lambda e: (template_size(e), e.canonical))
    return survivors[: cfg.width]
