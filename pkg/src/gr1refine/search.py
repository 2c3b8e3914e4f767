"""Duplicate-aware FIFO refinement search.

The queue holds candidate refinements together with the counterstrategy sets
they eliminate.  A dequeued candidate is skipped when its duplicate key (the
sorted canonical assumption list plus the *number* of eliminated
counterstrategies) was already explored; comparing counts instead of sets is
deliberate, because the same assumption list can reappear with more
counterstrategies attached and must then be explored again.

Unrealizable candidates are expanded: a counterstrategy is computed, the
bias proposes alternatives, and each alternative is enqueued after
minimization (``minimal`` mode), as a plain extension (``bfs`` mode), or
both (``hybrid`` mode).  Realizable candidates with satisfiable assumptions
are solutions.
"""

from __future__ import annotations

import csv
import io
import json
import time
from collections import Counter, deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from . import bias as bias_mod
from . import game, refine
from .formula import Gr1Element, Gr1Spec
from .refine import CounterstrategyStore, MemoizedEliminates, RefinementEntry


class Mode(Enum):
    BFS = "bfs"
    MINIMAL = "minimal"
    HYBRID = "hybrid"


@dataclass(frozen=True)
class SearchConfig:
    mode: Mode = Mode.MINIMAL
    max_expansions: int = 100
    wall_clock_limit: float | None = None  # seconds
    bias_width: int = 5

    def __post_init__(self):
        if self.max_expansions < 1:
            raise ValueError("max_expansions must be at least 1")


@dataclass(frozen=True)
class DuplicateKey:
    assumptions_key: tuple[str, ...]
    cs_count: int


def duplicate_key(entry: RefinementEntry) -> DuplicateKey:
    return DuplicateKey(entry.canonical_assumptions(), len(entry.all_counterstrategies))


@dataclass
class SearchStats:
    explored_refs: int = 0
    expanded_refs: int = 0
    sol: int = 0
    min_len: int | None = None
    max_len: int | None = None
    mode_len: int | None = None
    min_sol_len: int | None = None
    max_sol_len: int | None = None
    mode_sol_len: int | None = None
    false_count: int = 0
    duplicate_refs: int = 0
    redundant_removed_histogram: dict[int, int] = field(default_factory=dict)
    wall_clock: float = 0.0


def _mode(values) -> int | None:
    if not values:
        return None
    counts = Counter(values)
    best = max(counts.values())
    return min(v for v, k in counts.items() if k == best)


def record_stats(events) -> SearchStats:
    """Fold a stream of search events into the summary statistics.

    Events: ("explored", length), ("expanded",), ("duplicate",),
    ("solution", length), ("false",), ("minimized", removed_count),
    ("wall_clock", seconds).
    """
    stats = SearchStats()
    explored_lengths: list[int] = []
    solution_lengths: list[int] = []
    hist: Counter = Counter()
    for event in events:
        kind = event[0]
        if kind == "explored":
            stats.explored_refs += 1
            explored_lengths.append(event[1])
        elif kind == "expanded":
            stats.expanded_refs += 1
        elif kind == "duplicate":
            stats.duplicate_refs += 1
        elif kind == "solution":
            stats.sol += 1
            solution_lengths.append(event[1])
        elif kind == "false":
            stats.false_count += 1
        elif kind == "minimized":
            hist[event[1]] += 1
        elif kind == "wall_clock":
            stats.wall_clock = event[1]
        else:
            raise ValueError(f"unknown stats event {kind!r}")
    if explored_lengths:
        stats.min_len = min(explored_lengths)
        stats.max_len = max(explored_lengths)
        stats.mode_len = _mode(explored_lengths)
    if solution_lengths:
        stats.min_sol_len = min(solution_lengths)
        stats.max_sol_len = max(solution_lengths)
        stats.mode_sol_len = _mode(solution_lengths)
    stats.redundant_removed_histogram = dict(sorted(hist.items()))
    return stats


@dataclass
class SearchResult:
    mode: Mode
    terminated_by: str
    solutions: list[tuple[Gr1Element, ...]]
    stats: SearchStats
    trace: list[dict] = field(default_factory=list)

    def solution_canonicals(self) -> list[list[str]]:
        return [sorted(a.canonical for a in sol) for sol in self.solutions]

    def to_json_dict(self, include_timing: bool = True) -> dict:
        stats = {
            "explored_refs": self.stats.explored_refs,
            "expanded_refs": self.stats.expanded_refs,
            "sol": self.stats.sol,
            "min_len": self.stats.min_len,
            "max_len": self.stats.max_len,
            "mode_len": self.stats.mode_len,
            "min_sol_len": self.stats.min_sol_len,
            "max_sol_len": self.stats.max_sol_len,
            "mode_sol_len": self.stats.mode_sol_len,
            "false_count": self.stats.false_count,
            "duplicate_refs": self.stats.duplicate_refs,
        }
        if include_timing:
            stats["wall_clock_ms"] = round(self.stats.wall_clock * 1000.0, 3)
        return {
            "mode": self.mode.value,
            "terminated_by": self.terminated_by,
            "solutions": self.solution_canonicals(),
            "stats": stats,
        }

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_json_dict(include_timing), indent=2, sort_keys=True)


def _mmm(lo, hi, mode) -> str:
    if lo is None:
        return "N/A"
    return f"{lo}/{hi}/{mode}"


def csv_rows(result: SearchResult) -> list[tuple[str, str]]:
    """Rows named after the summary-table statistics."""
    stats = result.stats
    hist = stats.redundant_removed_histogram
    removed = [k for k, n in hist.items() for _ in range(n)]
    rows = [
        ("ExploredRefs", str(stats.explored_refs)),
        ("Min/Max/ModeLength", _mmm(stats.min_len, stats.max_len, stats.mode_len)),
        ("Min/Max/ModeRedundAssump",
         _mmm(min(removed), max(removed), _mode(removed)) if removed else "N/A"),
        ("Sol", str(stats.sol)),
        ("Min/Max/ModeSolLength",
         _mmm(stats.min_sol_len, stats.max_sol_len, stats.mode_sol_len)),
        ("ExpandedRefs", str(stats.expanded_refs)),
        ("False", str(stats.false_count)),
        ("DuplicateRefs", str(stats.duplicate_refs)),
    ]
    return rows


def emit_csv(results: list[tuple[str, SearchResult]]) -> str:
    """Side-by-side CSV: one statistics column per labelled result."""
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["Statistics"] + [label for label, _ in results])
    tables = [dict(csv_rows(result)) for _, result in results]
    for name, _ in csv_rows(results[0][1]):
        writer.writerow([name] + [table[name] for table in tables])
    return out.getvalue()


# --------------------------------------------------------------------------
# Engines


class GameEngine:
    """Realizability, satisfiability, and expansion backed by the game
    solver and the template bias."""

    def __init__(self, spec: Gr1Spec, cfg: SearchConfig,
                 bias_fn: Callable | None = None,
                 checker: Callable | None = None,
                 var_cap: int = game.DEFAULT_VAR_CAP,
                 threads: int = 1):
        self.spec = spec
        self.var_cap = var_cap
        self.store = CounterstrategyStore()
        self.checker = checker or MemoizedEliminates(self.store)
        self.threads = threads
        if bias_fn is None:
            bias_cfg = bias_mod.BiasConfig(width=cfg.bias_width)
            bias_fn = lambda cs, current, spec: bias_mod.apply_bias(
                cs, current, spec, bias_cfg, var_cap=self.var_cap
            )
        self.bias_fn = bias_fn

    def realizable(self, assumptions) -> bool:
        return game.realizable(self.spec.with_assumptions(assumptions), self.var_cap)

    def satisfiable(self, assumptions) -> bool:
        return game.assumptions_satisfiable(
            self.spec.assumptions + tuple(assumptions),
            self.spec.variables,
            self.var_cap,
        )

    def expand(self, assumptions, known_cs_ids):
        refined = self.spec.with_assumptions(assumptions)
        cs = game.compute_counterstrategy(refined, self.var_cap)
        cs_id = self.store.register(cs)
        current = self.spec.assumptions + tuple(assumptions)
        candidates = self.bias_fn(cs, current, self.spec)
        self._prewarm(candidates, tuple(known_cs_ids) + (cs_id,))
        return cs_id, candidates

    def _prewarm(self, candidates, cs_ids):
        # fill the model-check cache; results are merged into the memo table
        # so the later sequential minimization stays deterministic
        if self.threads <= 1 or not candidates:
            return
        from concurrent.futures import ThreadPoolExecutor

        pairs = [(c, a) for a in candidates for c in cs_ids]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            list(pool.map(lambda p: self.checker(p[0], p[1]), pairs))


# --------------------------------------------------------------------------
# The search


def refinement_search(spec: Gr1Spec, cfg: SearchConfig,
                      bias_fn: Callable | None = None,
                      checker: Callable | None = None,
                      *,
                      engine=None,
                      var_cap: int = game.DEFAULT_VAR_CAP,
                      threads: int = 1,
                      record_trace: bool = False,
                      initial_entries=None) -> SearchResult:
    """Run the FIFO refinement search and collect solutions plus statistics."""
    if engine is None:
        engine = GameEngine(spec, cfg, bias_fn, checker, var_cap, threads)
    checker = engine.checker

    if not engine.satisfiable(()):
        raise ValueError(
            "the spec's own assumptions are unsatisfiable; every refinement "
            "would be vacuous"
        )

    queue: deque[RefinementEntry] = deque(
        initial_entries if initial_entries is not None else [RefinementEntry()]
    )
    explored: set[DuplicateKey] = set()
    solutions: list[tuple[Gr1Element, ...]] = []
    solution_keys: set[tuple[str, ...]] = set()
    events: list[tuple] = []
    trace: list[dict] = []
    expanded = 0
    step = 0
    terminated_by = "exhausted"
    started = time.monotonic()

    def note(**kw):
        if record_trace:
            trace.append(kw)

    while queue:
        if cfg.wall_clock_limit is not None and (
            time.monotonic() - started
        ) > cfg.wall_clock_limit:
            terminated_by = "timeout"
            break
        entry = queue.popleft()
        key = duplicate_key(entry)
        if key in explored:
            events.append(("duplicate",))
            note(event="dequeue", assumptions=entry.canonical_assumptions(),
                 cs_count=key.cs_count, duplicate=True)
            continue
        events.append(("explored", len(entry)))
        note(event="dequeue", assumptions=entry.canonical_assumptions(),
             cs_count=key.cs_count, duplicate=False)

        if not engine.realizable(entry.assumptions):
            if expanded >= cfg.max_expansions:
                terminated_by = "max_expansions"
                break
            expansion = engine.expand(entry.assumptions, entry.all_counterstrategies)
            if expansion is None:
                explored.add(key)
                terminated_by = "script_exhausted"
                break
            expanded += 1
            step += 1
            events.append(("expanded",))
            cs_id, candidates = expansion
            note(event="expand", step=step, cs_id=cs_id,
                 candidates=[c.canonical for c in candidates])
            for candidate in candidates:
                if cfg.mode is Mode.BFS:
                    extension = RefinementEntry(
                        entry.assumptions + (candidate,),
                        entry.eliminated + (frozenset({cs_id}),),
                    )
                    queue.append(extension)
                    note(event="enqueue", step=step, kind="bfs",
                         assumptions=extension.canonical_assumptions(),
                         cs_count=len(extension.all_counterstrategies))
                    continue
                minimized = refine.minimal_refinement(entry, candidate, cs_id, checker)
                events.append(("minimized", len(entry) + 1 - len(minimized)))
                queue.append(minimized)
                note(event="enqueue", step=step, kind="minimal",
                     assumptions=minimized.canonical_assumptions(),
                     cs_count=len(minimized.all_counterstrategies))
                if cfg.mode is Mode.HYBRID:
                    plain = RefinementEntry(
                        entry.assumptions + (candidate,),
                        entry.eliminated + (minimized.eliminated[-1],),
                    )
                    queue.append(plain)
                    note(event="enqueue", step=step, kind="hybrid",
                         assumptions=plain.canonical_assumptions(),
                         cs_count=len(plain.all_counterstrategies))
        else:
            if engine.satisfiable(entry.assumptions):
                skey = entry.canonical_assumptions()
                if skey not in solution_keys:
                    solution_keys.add(skey)
                    solutions.append(entry.assumptions)
                    events.append(("solution", len(entry)))
                    note(event="solution", assumptions=skey)
            else:
                events.append(("false",))
                note(event="false", assumptions=entry.canonical_assumptions())
        explored.add(key)

    events.append(("wall_clock", time.monotonic() - started))
    return SearchResult(
        mode=cfg.mode,
        terminated_by=terminated_by,
        solutions=solutions,
        stats=record_stats(events),
        trace=trace,
    )
