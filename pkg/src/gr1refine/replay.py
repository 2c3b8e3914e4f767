"""Scripted search replays driven by mock oracles.

A trace file pins down everything the search would otherwise compute:
which refinements are realizable, which assumption eliminates which
counterstrategy, and the bias output at every expansion step.  Replays make
the queue behaviour reproducible and independent of the game engine, which
is how the worked examples are checked.

Trace schema (JSON object):

    {
      "inputs":  ["a", "b"],            # variable declarations for parsing
      "outputs": [],
      "mode": "minimal",                # optional; bfs | minimal | hybrid
      "max_expansions": 10,             # optional
      "eliminates": {"GF a": ["c1"]},   # assumption -> eliminated cs ids
      "realizable": [["GF a","GF b"]],  # realizable refinements (as sets)
      "unsatisfiable": [],              # unsatisfiable refinements (as sets)
      "initial_entries": [              # optional queue seed; default [{}]
        {"assumptions": ["GF a"], "eliminated": [["c1"]]}
      ],
      "steps": [                        # bias script, consumed per expansion
        {"counterstrategy": "c1", "bias": ["GF a", "GF b"]}
      ]
    }
"""

from __future__ import annotations

import json
from collections import deque

from .formula import Gr1Spec, VarKind, Variable, parse_element
from .refine import RefinementEntry
from .search import Mode, SearchConfig, SearchResult, refinement_search


class TraceError(Exception):
    """The trace file does not match the schema."""


class ScriptedEngine:
    """Mock realizability/satisfiability/expansion driven by a trace."""

    def __init__(self, trace: dict):
        if not isinstance(trace, dict):
            raise TraceError("trace must be a JSON object")
        inputs = tuple(Variable(n, VarKind.INPUT) for n in trace.get("inputs", []))
        outputs = tuple(Variable(n, VarKind.OUTPUT) for n in trace.get("outputs", []))
        self.variables = {v.name: v for v in inputs + outputs}
        self.spec = Gr1Spec(inputs, outputs, (), ())

        self._elements: dict[str, object] = {}
        table = trace.get("eliminates", {})
        if not isinstance(table, dict):
            raise TraceError("'eliminates' must map assumption strings to id lists")
        self.eliminates_table = {
            self.element(text).canonical: frozenset(ids) for text, ids in table.items()
        }
        self.realizable_keys = {
            self._refinement_key(texts) for texts in trace.get("realizable", [])
        }
        self.unsatisfiable_keys = {
            self._refinement_key(texts) for texts in trace.get("unsatisfiable", [])
        }
        steps = trace.get("steps", [])
        if not isinstance(steps, list):
            raise TraceError("'steps' must be a list")
        parsed_steps = []
        for k, step in enumerate(steps):
            try:
                cs_id = step["counterstrategy"]
                candidates = [self.element(text) for text in step["bias"]]
            except (KeyError, TypeError) as exc:
                raise TraceError(f"step {k}: {exc}") from exc
            parsed_steps.append((cs_id, candidates))
        self.steps = deque(parsed_steps)
        self.checker = self._eliminates

    def element(self, text: str):
        element = self._elements.get(text)
        if element is None:
            element = parse_element(text, self.variables, is_assumption=True)
            self._elements[text] = element
        return element

    def _refinement_key(self, texts) -> tuple[str, ...]:
        if not isinstance(texts, list):
            raise TraceError("refinement keys must be lists of assumption strings")
        return tuple(sorted(self.element(t).canonical for t in texts))

    def _eliminates(self, cs_id, element) -> bool:
        return cs_id in self.eliminates_table.get(element.canonical, frozenset())

    def initial_entries(self, trace: dict) -> list[RefinementEntry] | None:
        raw = trace.get("initial_entries")
        if raw is None:
            return None
        entries = []
        for item in raw:
            try:
                assumptions = tuple(self.element(t) for t in item["assumptions"])
                eliminated = tuple(frozenset(ids) for ids in item["eliminated"])
            except (KeyError, TypeError) as exc:
                raise TraceError(f"initial entry: {exc}") from exc
            entries.append(RefinementEntry(assumptions, eliminated))
        return entries

    # engine interface ------------------------------------------------------

    def realizable(self, assumptions) -> bool:
        key = tuple(sorted(a.canonical for a in assumptions))
        return key in self.realizable_keys

    def satisfiable(self, assumptions) -> bool:
        key = tuple(sorted(a.canonical for a in assumptions))
        return key not in self.unsatisfiable_keys

    def expand(self, assumptions, known_cs_ids):
        if not self.steps:
            return None
        return self.steps.popleft()


def load_trace(path: str) -> dict:
    with open(path, "r", encoding="ascii") as handle:
        try:
            return json.load(handle)
        except json.JSONDecodeError as exc:
            raise TraceError(f"trace is not valid JSON: {exc}") from exc


def run_replay(trace: dict, mode: Mode | None = None) -> SearchResult:
    engine = ScriptedEngine(trace)
    if mode is None:
        try:
            mode = Mode(trace.get("mode", "minimal"))
        except ValueError as exc:
            raise TraceError(f"unknown mode {trace.get('mode')!r}") from exc
    cfg = SearchConfig(mode=mode, max_expansions=trace.get("max_expansions", 100))
    return refinement_search(
        Gr1Spec((), (), (), ()), cfg,
        engine=engine,
        record_trace=True,
        initial_entries=engine.initial_entries(trace),
    )


def format_report(result: SearchResult) -> str:
    """Queue-evolution table in the style of the worked search example."""
    lines = ["step | popped (psi ; |C|) | c | bias | enqueued"]
    step = 0
    popped = "-"
    for event in result.trace:
        if event["event"] == "dequeue":
            label = "{" + ", ".join(event["assumptions"]) + "}"
            popped = f"{label} ; {event['cs_count']}"
            if event["duplicate"]:
                lines.append(f"   - | {popped} | duplicate, skipped | |")
        elif event["event"] == "expand":
            step = event["step"]
            bias_list = ", ".join(event["candidates"]) or "(none)"
            lines.append(f"{step:4d} | {popped} | {event['cs_id']} | {bias_list} |")
        elif event["event"] == "enqueue":
            label = "{" + ", ".join(event["assumptions"]) + "}"
            lines.append(
                f"     |  |  |  | {event['kind']}: {label} ; {event['cs_count']}"
            )
        elif event["event"] == "solution":
            label = "{" + ", ".join(event["assumptions"]) + "}"
            lines.append(f"     | {label} | solution | |")
    lines.append(f"terminated_by: {result.terminated_by}")
    lines.append(
        "solutions: "
        + (", ".join("{" + ", ".join(s) + "}" for s in result.solution_canonicals()) or "(none)")
    )
    return "\n".join(lines)
