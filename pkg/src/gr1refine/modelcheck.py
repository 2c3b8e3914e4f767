"""Decide whether a counterstrategy satisfies a single GR(1) element.

``satisfies(c, a)`` holds iff every play of ``c`` satisfies ``a``.  The three
element classes reduce to plain graph checks:

* initial condition: the body holds in every initial state;
* invariant: the body holds across every transition leaving a reachable state;
* fairness: the reachable states falsifying the body contain no cycle.

``lasso_oracle`` re-decides the same question by brute-force enumeration of
ultimately periodic plays; it exists so the graph checks can be tested
against an independent implementation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from ._graph import has_cycle
from .formula import Gr1Class, Gr1Element, Valuation, eval_expr
from .game import Counterstrategy


class ModelCheckError(Exception):
    pass


@dataclass(frozen=True)
class Play:
    """Lasso representation of an infinite play (test fixture type)."""

    stem: tuple[Valuation, ...]
    loop: tuple[Valuation, ...]

    def __post_init__(self):
        if not self.loop:
            raise ValueError("a play's loop must be nonempty")


def reachable(c: Counterstrategy) -> frozenset[int]:
    """States reachable from the initial states."""
    seen = set(c.initial)
    queue = deque(c.initial)
    while queue:
        q = queue.popleft()
        for t in c.successors(q):
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return frozenset(seen)


def _check_no_memory(c: Counterstrategy, a: Gr1Element):
    mem = set(c.memory_vars)
    used = {v.name for v in a.variables()}
    clash = used & mem
    if clash:
        raise ModelCheckError(
            f"assumption mentions memory variable {sorted(clash)[0]!r}"
        )


def satisfies(c: Counterstrategy, a: Gr1Element) -> bool:
    """True iff every play of ``c`` satisfies the element ``a``."""
    _check_no_memory(c, a)
    reach = reachable(c)
    if any(not c.successors(q) for q in reach):
        raise ModelCheckError("malformed counterstrategy: reachable state without successor")
    if a.gr1_class is Gr1Class.INITIAL:
        return all(eval_expr(a.body, c.labeling[q]) for q in c.initial)
    if a.gr1_class is Gr1Class.INVARIANT:
        return all(
            eval_expr(a.body, c.labeling[q], c.labeling[t])
            for q in reach
            for t in c.successors(q)
        )
    # fairness GF B: violated iff some play eventually avoids B forever,
    # i.e. iff the reachable ~B subgraph has a cycle
    bad = [q for q in reach if not eval_expr(a.body, c.labeling[q])]
    return not has_cycle(bad, c.successors)


def eliminates(a: Gr1Element, c: Counterstrategy) -> bool:
    """The assumption rules out the counterstrategy: some play falsifies it."""
    return not satisfies(c, a)


# --------------------------------------------------------------------------
# Brute-force oracle

_ORACLE_STATE_LIMIT = 12


def play_satisfies(play: Play, a: Gr1Element) -> bool:
    """Direct LTL semantics of one element on an ultimately periodic play."""
    word = play.stem + play.loop
    if a.gr1_class is Gr1Class.INITIAL:
        return eval_expr(a.body, word[0])
    if a.gr1_class is Gr1Class.INVARIANT:
        steps = list(zip(word, word[1:])) + [(word[-1], play.loop[0])]
        return all(eval_expr(a.body, now, nxt) for now, nxt in steps)
    return any(eval_expr(a.body, v) for v in play.loop)


def iter_lassos(c: Counterstrategy, max_len: int):
    """Every lasso path with |stem| + |loop| <= max_len, as (stem, loop)
    state-id tuples."""
    def walk(path: list[int]):
        last = path[-1]
        succs = set(c.successors(last))
        for k, q in enumerate(path):
            if q in succs:
                yield tuple(path[:k]), tuple(path[k:])
        if len(path) < max_len:
            for t in c.successors(last):
                path.append(t)
                yield from walk(path)
                path.pop()

    for q0 in c.initial:
        yield from walk([q0])


def lasso_oracle(c: Counterstrategy, a: Gr1Element, max_len: int) -> bool:
    """Decide ``satisfies`` by enumerating all bounded lassos.

    Complete for the three GR(1) classes once ``max_len >= 2 |Q| + 1``;
    smaller bounds are rejected rather than risking a silently wrong verdict.
    """
    _check_no_memory(c, a)
    n = len(c.states)
    if n > _ORACLE_STATE_LIMIT:
        raise ModelCheckError(
            f"oracle is exponential; refusing {n} > {_ORACLE_STATE_LIMIT} states"
        )
    if max_len < 2 * n + 1:
        raise ModelCheckError(
            f"max_len={max_len} cannot cover all reachable cycles; need >= {2 * n + 1}"
        )
    for stem, loop in iter_lassos(c, max_len):
        play = Play(
            stem=tuple(c.labeling[q] for q in stem),
            loop=tuple(c.labeling[q] for q in loop),
        )
        if not play_satisfies(play, a):
            return False
    return True
