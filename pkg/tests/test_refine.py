import random

import pytest

from gr1refine import formula as f
from gr1refine import refine

V = {n: f.Variable(n, f.VarKind.INPUT) for n in ("p", "q", "r", "s", "t")}
PSI = {name: f.parse_element(f"GF {var}", V) for name, var in
       [("psi1", "p"), ("psi2", "q"), ("psi3", "r"), ("psi_new", "s"), ("psi5", "t")]}


def table_eliminates(table):
    """Mock elimination query from {canonical: set of cs ids}."""
    def eliminates(cs_id, element):
        return cs_id in table.get(element.canonical, set())
    return eliminates


def fig2_setup():
    """The worked bipartite-graph example: psi1 covers c1, psi2 covers c2 c3,
    psi3 covers c3 c4; the new assumption covers c1 c3 c4 and the new
    counterstrategy."""
    entry = refine.RefinementEntry(
        assumptions=(PSI["psi1"], PSI["psi2"], PSI["psi3"]),
        eliminated=(frozenset({"c1"}), frozenset({"c2", "c3"}), frozenset({"c3", "c4"})),
    )
    table = {
        PSI["psi1"].canonical: {"c1"},
        PSI["psi2"].canonical: {"c2", "c3"},
        PSI["psi3"].canonical: {"c3", "c4"},
        PSI["psi_new"].canonical: {"c1", "c3", "c4", "cprime"},
    }
    return entry, table


# --------------------------------------------------------------------------
# count_sets


def test_count_sets_direct():
    sets = [frozenset({"c1"}), frozenset({"c1", "c2"})]
    assert refine.count_sets(sets, "c1") == 2
    assert refine.count_sets(sets, "c2") == 1
    assert refine.count_sets(sets, "c9") == 0


def test_count_sets_fig2_degree_after_addition():
    entry, table = fig2_setup()
    sets = list(entry.eliminated) + [frozenset({"c1", "c3", "c4", "cprime"})]
    assert refine.count_sets(sets, "c3") == 3


# --------------------------------------------------------------------------
# minimal_refinement


def test_fig2_removes_psi1_and_psi3():
    entry, table = fig2_setup()
    result = refine.minimal_refinement(entry, PSI["psi_new"], "cprime",
                                       table_eliminates(table))
    assert result.assumptions == (PSI["psi2"], PSI["psi_new"])
    assert result.eliminated == (
        frozenset({"c2", "c3"}),
        frozenset({"c1", "c3", "c4", "cprime"}),
    )


def test_empty_entry_yields_singleton():
    table = {PSI["psi1"].canonical: {"c0"}}
    result = refine.minimal_refinement(refine.RefinementEntry(), PSI["psi1"], "c0",
                                       table_eliminates(table))
    assert result.assumptions == (PSI["psi1"],)
    assert result.eliminated == (frozenset({"c0"}),)


def test_request_grant_worked_example():
    # adding the invariant assumption eliminates the earlier counterstrategy
    # too, so the fairness assumption generated first becomes redundant
    entry = refine.RefinementEntry((PSI["psi1"],), (frozenset({"c1"}),))
    table = {
        PSI["psi1"].canonical: {"c1"},
        PSI["psi2"].canonical: {"c1", "c2"},
    }
    result = refine.minimal_refinement(entry, PSI["psi2"], "c2", table_eliminates(table))
    assert result.assumptions == (PSI["psi2"],)
    assert result.eliminated == (frozenset({"c1", "c2"}),)


def test_duplicate_counterstrategy_rejected():
    entry = refine.RefinementEntry((PSI["psi1"],), (frozenset({"c1"}),))
    with pytest.raises(refine.RefinementError, match="already"):
        refine.minimal_refinement(entry, PSI["psi2"], "c1", lambda c, a: True)


def test_non_eliminating_assumption_rejected():
    with pytest.raises(refine.RefinementError, match="does not eliminate"):
        refine.minimal_refinement(refine.RefinementEntry(), PSI["psi1"], "c1",
                                  lambda c, a: False)


# --------------------------------------------------------------------------
# redundancy predicates


def test_fig2_psi1_redundant_after_addition():
    entry, table = fig2_setup()
    extended = refine.RefinementEntry(
        entry.assumptions + (PSI["psi_new"],),
        entry.eliminated + (frozenset({"c1", "c3", "c4", "cprime"}),),
    )
    assert refine.is_redundant(0, extended) is True   # psi1
    assert refine.is_redundant(1, extended) is False  # psi2 (c2 has degree 1)
    assert refine.is_redundant(2, extended) is True   # psi3


def test_singleton_never_redundant():
    entry = refine.RefinementEntry((PSI["psi1"],), (frozenset({"c1"}),))
    assert refine.is_redundant(0, entry) is False
    assert refine.is_minimal(entry) is True


def test_index_out_of_range():
    with pytest.raises(IndexError):
        refine.is_redundant(0, refine.RefinementEntry())


def test_shared_singleton_sets_not_minimal():
    entry = refine.RefinementEntry(
        (PSI["psi1"], PSI["psi2"]),
        (frozenset({"c"}), frozenset({"c"})),
    )
    assert refine.is_redundant(0, entry) is True
    assert refine.is_redundant(1, entry) is True
    assert refine.is_minimal(entry) is False


# --------------------------------------------------------------------------
# randomized properties


def random_instance(rng):
    """Random edge table + entry satisfying the algorithm's hypotheses:
    edge-consistent sets, every set owns its generating counterstrategy, and
    the new counterstrategy is eliminated by no old assumption."""
    k = rng.randint(0, 5)
    # distinct elements via distinct literals over five variables
    pool = [f.parse_element(text, V) for text in (
        "GF p", "GF !p", "GF q", "GF !q", "GF r", "GF !r", "GF s", "GF !s",
        "GF t", "GF !t", "G (p -> X q)", "G (q -> X r)", "p", "!p", "q", "r",
    )]
    rng.shuffle(pool)
    assumptions = pool[: k + 1]
    cs_ids = [f"c{i}" for i in range(k)] + ["cnew"]
    table = {a.canonical: set() for a in assumptions}
    # each old assumption eliminates its own counterstrategy plus random others
    for i in range(k):
        table[assumptions[i].canonical].add(cs_ids[i])
        for c in cs_ids[:k]:
            if rng.random() < 0.35:
                table[assumptions[i].canonical].add(c)
    # the new assumption eliminates cnew plus random old ones
    table[assumptions[k].canonical].add("cnew")
    for c in cs_ids[:k]:
        if rng.random() < 0.5:
            table[assumptions[k].canonical].add(c)
    entry = refine.RefinementEntry(
        assumptions=tuple(assumptions[:k]),
        eliminated=tuple(
            frozenset(c for c in cs_ids[:k] if c in table[assumptions[i].canonical])
            for i in range(k)
        ),
    )
    return entry, assumptions[k], "cnew", table


def test_randomized_coverage_consistency_minimality():
    rng = random.Random(20240814)
    for _ in range(600):
        entry, new_a, new_c, table = random_instance(rng)
        elim = table_eliminates(table)
        result = refine.minimal_refinement(entry, new_a, new_c, elim)
        # coverage of all counterstrategies
        assert result.all_counterstrategies == entry.all_counterstrategies | {new_c}
        # edge consistency is preserved
        assert refine.check_edge_consistency(result, elim)
        # output is minimal
        assert refine.is_minimal(result)
        # the new assumption is never removed
        assert result.assumptions[-1] == new_a


def test_redundancy_agrees_with_definition():
    # degree criterion vs the direct definition: every counterstrategy is
    # still eliminated by the conjunction of the other assumptions
    rng = random.Random(515)
    for _ in range(400):
        entry, new_a, new_c, table = random_instance(rng)
        if len(entry) == 0:
            continue
        elim = table_eliminates(table)
        universe = entry.all_counterstrategies
        for idx in range(len(entry)):
            others = [entry.assumptions[h] for h in range(len(entry)) if h != idx]
            definition = all(
                any(elim(c, other) for other in others) for c in universe
            )
            assert refine.is_redundant(idx, entry) == definition


def test_non_redundancy_monotone_under_deletion():
    # deleting other assumptions never makes a non-redundant one redundant
    rng = random.Random(616)
    for _ in range(400):
        entry, new_a, new_c, table = random_instance(rng)
        if len(entry) < 2:
            continue
        keep_idx = rng.randrange(len(entry))
        if refine.is_redundant(keep_idx, entry):
            continue
        drop = rng.randrange(len(entry))
        if drop == keep_idx:
            continue
        sub = refine.RefinementEntry(
            tuple(a for h, a in enumerate(entry.assumptions) if h != drop),
            tuple(s for h, s in enumerate(entry.eliminated) if h != drop),
        )
        new_idx = keep_idx - (1 if drop < keep_idx else 0)
        assert refine.is_redundant(new_idx, sub) is False


def test_minimality_agrees_with_exhaustive_removal():
    rng = random.Random(717)
    for _ in range(300):
        entry, new_a, new_c, table = random_instance(rng)
        elim = table_eliminates(table)
        result = refine.minimal_refinement(entry, new_a, new_c, elim)
        universe = result.all_counterstrategies
        for idx in range(len(result)):
            remaining = [s for h, s in enumerate(result.eliminated) if h != idx]
            covered = frozenset().union(*remaining) if remaining else frozenset()
            assert covered != universe  # dropping any assumption loses coverage


def test_store_assigns_dense_ids(request_grant_spec):
    from gr1refine import game

    store = refine.CounterstrategyStore()
    cs = game.compute_counterstrategy(request_grant_spec)
    assert store.register(cs) == 0
    assert store.register(cs) == 1
    assert store.get(0) is cs
    assert list(store.ids()) == [0, 1]


def test_memoized_eliminates_caches(request_grant_spec):
    from gr1refine import game

    store = refine.CounterstrategyStore()
    cs_id = store.register(game.compute_counterstrategy(request_grant_spec))
    memo = refine.MemoizedEliminates(store)
    psi1 = f.parse_element("GF !cl", request_grant_spec.variable_map())
    assert memo(cs_id, psi1) is True
    assert memo(cs_id, psi1) is True
    assert memo.queries == 2
    assert memo.misses == 1


def test_entry_dot_dump():
    entry, _ = fig2_setup()
    dot = entry.to_dot()
    assert "graph refinement" in dot
    assert dot.count("--") == 5
