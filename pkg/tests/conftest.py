import random

import pytest

from gr1refine import formula as f

REQUEST_GRANT = """\
# Request-grant protocol: req/cl inputs, gr/val outputs.
# The response guarantee "every request is eventually granted" is encoded
# with the auxiliary output pend (a grant is owed).
INPUT req cl
OUTPUT gr val pend

ASSUMPTION GF !req

GUARANTEE !pend
GUARANTEE G (X pend <-> ((req | pend) & !X gr))
GUARANTEE GF !pend
GUARANTEE G ((cl | gr) -> X !gr)
GUARANTEE G (cl -> !val)
GUARANTEE GF (gr & val)
"""

PSI2 = "ASSUMPTION G (!val -> X !cl)\n"


@pytest.fixture
def request_grant_spec():
    return f.parse_spec(REQUEST_GRANT)


@pytest.fixture
def request_grant_psi2_spec():
    return f.parse_spec(REQUEST_GRANT + PSI2)


def random_expr(rng: random.Random, variables, depth: int, allow_next: bool = False,
                next_pool=None) -> f.BoolExpr:
    """Random expression tree for fuzzing, depth-bounded."""
    if next_pool is None:
        next_pool = variables if allow_next else []
    if depth <= 0 or rng.random() < 0.2:
        roll = rng.random()
        if roll < 0.1:
            return f.Const(rng.random() < 0.5)
        if next_pool and roll < 0.45:
            return f.NextVar(rng.choice(next_pool))
        return f.Var(rng.choice(variables))
    ctor = rng.choice([f.Not, f.And, f.Or, f.Implies, f.Iff])
    if ctor is f.Not:
        return f.Not(random_expr(rng, variables, depth - 1, next_pool=next_pool))
    return ctor(
        random_expr(rng, variables, depth - 1, next_pool=next_pool),
        random_expr(rng, variables, depth - 1, next_pool=next_pool),
    )


def random_element(rng: random.Random, variables, next_pool=None) -> f.Gr1Element:
    cls = rng.choice(list(f.Gr1Class))
    if cls is not f.Gr1Class.INVARIANT:
        next_pool = []
    elif next_pool is None:
        next_pool = variables
    body = random_expr(rng, variables, rng.randint(0, 3), next_pool=next_pool)
    return f.Gr1Element(cls, body)


def random_game_spec(rng: random.Random, max_vars: int = 4, max_fair: int = 2) -> f.Gr1Spec:
    """Small random spec for determinacy fuzzing: <= max_vars variables,
    <= max_fair fairness conditions per side."""
    n = rng.randint(1, max_vars)
    nx = rng.randint(0 if n > 1 else 1, n)
    inputs = tuple(f.Variable(f"i{k}", f.VarKind.INPUT) for k in range(nx))
    outputs = tuple(f.Variable(f"o{k}", f.VarKind.OUTPUT) for k in range(n - nx))
    variables = list(inputs + outputs)

    def elements(next_pool, side_max=2):
        out = []
        fair_budget = max_fair
        for _ in range(rng.randint(0, side_max)):
            e = random_element(rng, variables, next_pool=next_pool)
            if e.gr1_class is f.Gr1Class.FAIRNESS:
                if fair_budget == 0:
                    continue
                fair_budget -= 1
            out.append(e)
        return tuple(out)

    assumptions = elements(list(inputs) or [])
    guarantees = elements(variables)
    return f.Gr1Spec(inputs, outputs, assumptions, guarantees)


def make_counterstrategy(labels, transitions, initial, memory_vars=()):
    from gr1refine.game import Counterstrategy

    return Counterstrategy(
        states=tuple(sorted(labels)),
        transitions=tuple(transitions),
        initial=tuple(initial),
        labeling={q: f.Valuation(assignment) for q, assignment in labels.items()},
        memory_vars=tuple(memory_vars),
    )


def random_counterstrategy(rng: random.Random, var_names=("a", "b"), max_states: int = 6):
    """Random small transition system; every state has 1-2 successors."""
    n = rng.randint(1, max_states)
    labels = {
        q: {name: rng.random() < 0.5 for name in var_names} for q in range(n)
    }
    transitions = set()
    for q in range(n):
        for t in rng.sample(range(n), rng.randint(1, min(2, n))):
            transitions.add((q, t))
    n_init = rng.randint(1, n)
    initial = sorted(rng.sample(range(n), n_init))
    return make_counterstrategy(labels, sorted(transitions), initial)
