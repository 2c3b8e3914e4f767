import random

import pytest

from gr1refine import formula as f
from gr1refine import game
from gr1refine import modelcheck as mc
from conftest import REQUEST_GRANT, PSI2, random_element, random_game_spec


def parse(text):
    return f.parse_spec(text)


# --------------------------------------------------------------------------
# Arena


def test_request_grant_arena_has_32_states(request_grant_spec):
    arena = game.build_arena(request_grant_spec)
    assert arena.n_states == 2 ** 5
    assert len(list(arena.states)) == 32


def test_arena_moves_total_without_invariants():
    spec = parse("INPUT a b\nOUTPUT x\nASSUMPTION GF a\nGUARANTEE GF x\n")
    arena = game.build_arena(spec)
    for s in arena.states:
        assert arena.env_moves(s) == tuple(range(4))
        for u in arena.env_moves(s):
            assert arena.sys_moves(s, u) == (0, 1)


def test_arena_false_guarantee_invariant_blocks_all_replies():
    spec = parse("INPUT a\nOUTPUT x\nGUARANTEE G false\n")
    arena = game.build_arena(spec)
    for s in arena.states:
        for u in arena.env_moves(s):
            assert arena.sys_moves(s, u) == ()


def test_arena_env_moves_respect_assumption_invariant():
    spec = parse("INPUT a\nOUTPUT x\nASSUMPTION G (a -> X !a)\nGUARANTEE GF x\n")
    arena = game.build_arena(spec)
    for s in arena.states:
        expected = (0,) if arena.valuation(s)["a"] else (0, 1)
        assert arena.env_moves(s) == expected


def test_var_cap_enforced():
    names = " ".join(f"v{k}" for k in range(17))
    with pytest.raises(game.VarCapError):
        game.build_arena(parse(f"INPUT {names}\n"))
    game.build_arena(parse(f"INPUT {names}\n"), var_cap=17)


def test_arena_transitions_satisfy_invariants():
    spec = parse(
        "INPUT a\nOUTPUT x\nASSUMPTION G (a -> X !a)\nGUARANTEE G (x -> X !x)\n"
    )
    arena = game.build_arena(spec)
    for s in arena.states:
        for u in arena.env_moves(s):
            for y in arena.sys_moves(s, u):
                t = arena.state_of(u, y)
                now, nxt = arena.valuation(s), arena.valuation(t)
                assert f.eval_expr(spec.assumptions[0].body, now, nxt)
                assert f.eval_expr(spec.guarantees[0].body, now, nxt)


# --------------------------------------------------------------------------
# Realizability


def test_request_grant_unrealizable(request_grant_spec):
    assert game.realizable(request_grant_spec) is False


def test_request_grant_with_psi2_realizable(request_grant_psi2_spec):
    assert game.realizable(request_grant_psi2_spec) is True


def test_request_grant_with_gf_not_cl_still_unrealizable(request_grant_spec):
    psi1 = f.parse_element("GF !cl", request_grant_spec.variable_map())
    assert game.realizable(request_grant_spec.with_assumptions([psi1])) is False


def test_no_guarantees_is_realizable():
    assert game.realizable(parse("INPUT a\nOUTPUT x\nASSUMPTION GF a\n")) is True


def test_unsatisfiable_assumptions_realizable_vacuously():
    spec = parse("INPUT a\nOUTPUT x\nASSUMPTION GF a\nASSUMPTION G !a\nGUARANTEE GF false\n")
    assert game.realizable(spec) is True


def _random_refinement_shaped_assumption(rng, spec):
    """Random assumption from the shapes the refinement search can add:
    fairness over any literal, invariant with a next-input conclusion, or an
    initial input literal.  (Initial conditions over outputs are not in the
    family; strict initialization makes those non-monotone.)"""
    def literal(pool):
        var = rng.choice(pool)
        e = f.Var(var)
        return f.Not(e) if rng.random() < 0.5 else e

    choices = ["fairness"]
    if spec.inputs:
        choices += ["invariant", "initial"]
    kind = rng.choice(choices)
    if kind == "fairness":
        return f.fairness(literal(list(spec.variables)))
    if kind == "initial":
        return f.initial(literal(list(spec.inputs)))
    var = rng.choice(list(spec.inputs))
    rhs = f.NextVar(var)
    if rng.random() < 0.5:
        rhs = f.Not(rhs)
    return f.invariant(f.Implies(literal(list(spec.variables)), rhs))


def test_monotonicity_adding_assumptions_preserves_realizability():
    rng = random.Random(20240813)
    checked = 0
    while checked < 120:
        spec = random_game_spec(rng)
        if not spec.variables or not game.realizable(spec):
            continue
        extra = _random_refinement_shaped_assumption(rng, spec)
        assert game.realizable(spec.with_assumptions([extra])) is True, (
            f"{f.pretty_print(spec)} + {extra.canonical}"
        )
        checked += 1


# --------------------------------------------------------------------------
# Counterstrategies


def test_counterstrategy_keeps_cl_true(request_grant_spec):
    cs = game.compute_counterstrategy(request_grant_spec)
    for q in mc.reachable(cs):
        assert cs.labeling[q]["cl"] is True


def test_counterstrategy_on_realizable_spec_rejected(request_grant_psi2_spec):
    with pytest.raises(game.RealizableSpecError):
        game.compute_counterstrategy(request_grant_psi2_spec)


def test_counterstrategy_satisfies_assumptions(request_grant_spec):
    cs = game.compute_counterstrategy(request_grant_spec)
    for a in request_grant_spec.assumptions:
        assert mc.satisfies(cs, a) is True


def test_counterstrategy_json_roundtrip(request_grant_spec):
    cs = game.compute_counterstrategy(request_grant_spec)
    back = game.Counterstrategy.from_json(cs.to_json())
    back.validate()
    assert back.states == cs.states
    assert back.transitions == cs.transitions
    assert back.initial == cs.initial
    assert back.labeling == cs.labeling
    assert back.memory_vars == cs.memory_vars


def test_counterstrategy_dot_output(request_grant_spec):
    cs = game.compute_counterstrategy(request_grant_spec)
    dot = cs.to_dot()
    assert dot.startswith("digraph")
    assert "peripheries=2" in dot
    assert dot.count("->") == len(cs.transitions)


def test_counterstrategy_deterministic(request_grant_spec):
    one = game.compute_counterstrategy(request_grant_spec)
    two = game.compute_counterstrategy(request_grant_spec)
    assert one.to_json() == two.to_json()


def _walk_count(cs, bound):
    """Number of bounded walks from the initial states (enumeration cost)."""
    counts = {q: 1 for q in cs.initial}
    total = len(counts)
    for _ in range(bound - 1):
        nxt = {}
        for q, k in counts.items():
            for t in cs.successors(q):
                nxt[t] = nxt.get(t, 0) + k
        total += sum(nxt.values())
        if total > 50_000:
            return total
        counts = nxt
    return total


def _violates_guarantees_on_every_play(cs, spec):
    bound = 2 * len(cs.states) + 1
    for stem, loop in mc.iter_lassos(cs, bound):
        play = mc.Play(
            stem=tuple(cs.labeling[q] for q in stem),
            loop=tuple(cs.labeling[q] for q in loop),
        )
        if all(mc.play_satisfies(play, g) for g in spec.guarantees):
            return False
    return True


def test_random_unrealizable_specs_yield_valid_counterstrategies():
    rng = random.Random(424242)
    produced = 0
    lasso_checked = 0
    attempts = 0
    while produced < 150 and attempts < 3000:
        attempts += 1
        spec = random_game_spec(rng, max_vars=3)
        if game.realizable(spec):
            continue
        cs = game.compute_counterstrategy(spec)
        cs.validate()
        for a in spec.assumptions:
            assert mc.satisfies(cs, a) is True, (
                f"counterstrategy fails assumption {a.canonical} of "
                f"{f.pretty_print(spec)}"
            )
        produced += 1
        bound = 2 * len(cs.states) + 1
        if (
            spec.guarantees
            and len(cs.states) <= 10
            and _walk_count(cs, bound) <= 50_000
        ):
            assert _violates_guarantees_on_every_play(cs, spec), (
                f"play satisfying all guarantees in {f.pretty_print(spec)}"
            )
            lasso_checked += 1
    assert produced == 150
    assert lasso_checked >= 30


def test_determinacy_on_random_specs():
    rng = random.Random(777)
    for _ in range(250):
        spec = random_game_spec(rng)
        if game.realizable(spec):
            with pytest.raises(game.RealizableSpecError):
                game.compute_counterstrategy(spec)
        else:
            cs = game.compute_counterstrategy(spec)
            cs.validate()
            assert all(mc.satisfies(cs, a) for a in spec.assumptions)


# --------------------------------------------------------------------------
# Assumption satisfiability


def _satisfiable_oracle(assumptions, universe):
    """Independent product-graph oracle: a fair lasso exists iff from some
    reachable loop head the product (state, fairness-mask) returns with the
    full mask."""
    names = [v.name for v in universe]
    n_states = 1 << len(names)
    vals = [
        f.Valuation({nm: bool(s >> k & 1) for k, nm in enumerate(names)})
        for s in range(n_states)
    ]
    initial = [e.body for e in assumptions if e.gr1_class is f.Gr1Class.INITIAL]
    invariant = [e.body for e in assumptions if e.gr1_class is f.Gr1Class.INVARIANT]
    fairness = [e.body for e in assumptions if e.gr1_class is f.Gr1Class.FAIRNESS]
    init_states = [s for s in range(n_states) if all(f.eval_expr(b, vals[s]) for b in initial)]
    succ = [
        [t for t in range(n_states) if all(f.eval_expr(b, vals[s], vals[t]) for b in invariant)]
        for s in range(n_states)
    ]
    full = (1 << len(fairness)) - 1

    def bits(s):
        return sum(1 << k for k, b in enumerate(fairness) if f.eval_expr(b, vals[s]))

    reach = set()
    frontier = list(init_states)
    while frontier:
        s = frontier.pop()
        if s in reach:
            continue
        reach.add(s)
        frontier.extend(succ[s])

    for head in reach:
        seen = set()
        frontier = [(t, bits(head) | bits(t)) for t in succ[head]]
        while frontier:
            node = frontier.pop()
            if node in seen:
                continue
            seen.add(node)
            t, mask = node
            if t == head and mask == full:
                return True
            frontier.extend((t2, mask | bits(t2)) for t2 in succ[t])
    return False


def test_satisfiable_contradictory_fairness():
    vs = {"cl": f.Variable("cl", f.VarKind.INPUT)}
    a1 = f.parse_element("GF cl", vs)
    a2 = f.parse_element("G !cl", vs)
    assert game.assumptions_satisfiable([a1, a2], vs.values()) is False


def test_satisfiable_motivating_assumption():
    vs = {"req": f.Variable("req", f.VarKind.INPUT)}
    a = f.parse_element("GF !req", vs)
    assert game.assumptions_satisfiable([a], vs.values()) is True


def test_satisfiable_agrees_with_product_oracle():
    rng = random.Random(31415)
    universe = [f.Variable(n, f.VarKind.INPUT) for n in ("a", "b", "c")][:2]
    for _ in range(300):
        elements = [random_element(rng, universe) for _ in range(rng.randint(1, 3))]
        got = game.assumptions_satisfiable(elements, universe)
        want = _satisfiable_oracle(elements, universe)
        assert got == want, [e.canonical for e in elements]


def test_satisfiable_three_vars_sample():
    rng = random.Random(16180)
    universe = [f.Variable(n, f.VarKind.INPUT) for n in ("a", "b", "c")]
    for _ in range(60):
        elements = [random_element(rng, universe) for _ in range(rng.randint(1, 2))]
        assert game.assumptions_satisfiable(elements, universe) == _satisfiable_oracle(
            elements, universe
        )
