"""Refinement minimization over the assumption/counterstrategy bipartite graph.

A candidate refinement is kept together with, for each of its assumptions,
the set of counterstrategy ids that assumption eliminates.  Adding a new
assumption may make earlier ones redundant: an assumption is redundant when
every counterstrategy it eliminates is also eliminated by another one (its
counterstrategies all have degree two or more in the bipartite graph).
``minimal_refinement`` appends the new assumption, then scans the old ones in
order and deletes every redundant one, decrementing degrees as it goes.

Elimination queries are injected as a callable ``eliminates(cs_id, element)``
so the module can be driven both by the real model checker and by mock
satisfaction tables in tests and replays.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .formula import Gr1Element
from .game import Counterstrategy
from . import modelcheck


class RefinementError(Exception):
    """A precondition of the minimization algorithm was violated."""


@dataclass(frozen=True)
class RefinementEntry:
    """A refinement paired with its eliminated-counterstrategy sets.

    ``eliminated[k]`` is the set of counterstrategy ids eliminated by
    ``assumptions[k]``; the two tuples are positionally aligned.
    """

    assumptions: tuple[Gr1Element, ...] = ()
    eliminated: tuple[frozenset, ...] = ()

    def __post_init__(self):
        if len(self.assumptions) != len(self.eliminated):
            raise RefinementError("assumptions and eliminated sets must align")

    def __len__(self) -> int:
        return len(self.assumptions)

    @property
    def all_counterstrategies(self) -> frozenset:
        out = frozenset()
        for cset in self.eliminated:
            out |= cset
        return out

    def canonical_assumptions(self) -> tuple[str, ...]:
        return tuple(sorted(a.canonical for a in self.assumptions))

    def to_dot(self) -> str:
        """Bipartite graph dump for debugging."""
        lines = ["graph refinement {", "  rankdir=LR;"]
        for k, a in enumerate(self.assumptions):
            lines.append(f'  a{k} [shape=box, label="{a.canonical}"];')
        for c in sorted(self.all_counterstrategies, key=str):
            lines.append(f'  c_{c} [shape=ellipse, label="{c}"];')
        for k, cset in enumerate(self.eliminated):
            for c in sorted(cset, key=str):
                lines.append(f"  a{k} -- c_{c};")
        lines.append("}")
        return "\n".join(lines)


def count_sets(collection, cs_id) -> int:
    """Degree of a counterstrategy vertex: how many sets contain it."""
    return sum(1 for cset in collection if cs_id in cset)


def is_redundant(index: int, entry: RefinementEntry) -> bool:
    """All counterstrategies of this assumption are covered at least twice."""
    if not 0 <= index < len(entry):
        raise IndexError(f"assumption index {index} out of range")
    return all(count_sets(entry.eliminated, c) >= 2 for c in entry.eliminated[index])


def is_minimal(entry: RefinementEntry) -> bool:
    return not any(is_redundant(k, entry) for k in range(len(entry)))


def minimal_refinement(entry: RefinementEntry, new_assumption: Gr1Element,
                       new_cs_id, eliminates) -> RefinementEntry:
    """Append ``new_assumption`` (generated to eliminate ``new_cs_id``) and
    delete every assumption it makes redundant.

    ``eliminates(cs_id, element) -> bool`` answers the model-checking
    queries.  The output covers the old counterstrategies plus the new one,
    keeps the bipartite edges consistent, and is minimal.
    """
    seen = entry.all_counterstrategies
    if new_cs_id in seen:
        raise RefinementError(f"counterstrategy {new_cs_id!r} was already eliminated")
    if not eliminates(new_cs_id, new_assumption):
        raise RefinementError(
            f"{new_assumption.canonical} does not eliminate counterstrategy {new_cs_id!r}"
        )

    new_set = frozenset({new_cs_id} | {c for c in seen if eliminates(c, new_assumption)})
    assumptions = list(entry.assumptions) + [new_assumption]
    sets = list(entry.eliminated) + [new_set]

    degree: dict = {}
    for cset in sets:
        for c in cset:
            degree[c] = degree.get(c, 0) + 1

    keep = [True] * len(assumptions)
    for k in range(len(entry)):  # the new assumption itself is never scanned
        if all(degree[c] >= 2 for c in sets[k]):
            keep[k] = False
            for c in sets[k]:
                degree[c] -= 1

    return RefinementEntry(
        assumptions=tuple(a for a, k in zip(assumptions, keep) if k),
        eliminated=tuple(s for s, k in zip(sets, keep) if k),
    )


def check_edge_consistency(entry: RefinementEntry, eliminates) -> bool:
    """Every edge of the bipartite graph is present iff the model checker
    agrees (hypothesis of the minimization correctness argument)."""
    universe = entry.all_counterstrategies
    return all(
        (c in entry.eliminated[k]) == eliminates(c, entry.assumptions[k])
        for k in range(len(entry))
        for c in universe
    )


class CounterstrategyStore:
    """Assigns dense, stable ids to counterstrategies as they are computed."""

    def __init__(self):
        self._items: list[Counterstrategy] = []

    def register(self, cs: Counterstrategy) -> int:
        self._items.append(cs)
        return len(self._items) - 1

    def get(self, cs_id: int) -> Counterstrategy:
        return self._items[cs_id]

    def __len__(self) -> int:
        return len(self._items)

    def ids(self) -> range:
        return range(len(self._items))


class MemoizedEliminates:
    """Model-check cache keyed by (counterstrategy id, canonical assumption).

    The bipartite graph built by earlier minimization calls is reused through
    this cache rather than recomputed.  Safe for concurrent readers with
    single-writer insertion.
    """

    def __init__(self, store: CounterstrategyStore):
        self._store = store
        self._cache: dict[tuple, bool] = {}
        self._lock = threading.Lock()
        self.queries = 0
        self.misses = 0

    def __call__(self, cs_id, element: Gr1Element) -> bool:
        key = (cs_id, element.canonical)
        self.queries += 1
        cached = self._cache.get(key)
        if cached is None:
            result = modelcheck.eliminates(element, self._store.get(cs_id))
            with self._lock:
                self._cache[key] = result
            self.misses += 1
            return result
        return cached
