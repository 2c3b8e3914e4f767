"""Explicit-state GR(1) games: realizability, counterstrategies, satisfiability.

The game is played on the valuations of all declared variables.  At each step
the environment picks next values for the inputs (consistent with the
assumption invariants, which may only constrain next inputs) and the
controller replies with next values for the outputs (consistent with the
guarantee invariants).  The controller wins a play iff it satisfies
``assumptions -> guarantees``; concretely the controller's winning region is

    W = nuZ. AND_j muY. OR_i nuX. (Js_j & cpre(Z)) | cpre(Y) | (~Je_i & cpre(X))

where ``cpre(S)`` holds when every legal environment move admits a legal
controller reply into ``S``.  An environment deadlock counts as a controller
win.  A controller deadlock counts as an environment win only when the
environment can keep satisfying its own assumptions afterwards (otherwise the
resulting plays would falsify the assumptions, making the implication true),
which makes "unrealizable" coincide exactly with "a valid counterstrategy
exists".

Counterstrategies are extracted from the dual fixpoint with two memory
counters: ``j`` is the guarantee fairness currently blocked (saturating to
its maximum value once a guarantee invariant has been violated and only the
assumptions remain to be honoured) and ``i`` is the next assumption fairness
to honour.  Both are encoded little-endian in the ``_mem_j_k`` / ``_mem_i_k``
labelling bits.
"""

from __future__ import annotations

import functools
import json
from collections import deque
from dataclasses import dataclass, field

from ._graph import fair_reach, strongly_connected_components
from .formula import (
    EvalError,
    Gr1Class,
    Gr1Element,
    Gr1Spec,
    Valuation,
    VarKind,
    Variable,
    eval_expr,
    next_variables_of,
)

DEFAULT_VAR_CAP = 16


class VarCapError(Exception):
    """The spec has more variables than explicit enumeration can stomach."""

    def __init__(self, count: int, cap: int):
        super().__init__(
            f"spec has {count} variables but the explicit-state cap is {cap}"
        )
        self.count = count
        self.cap = cap


class RealizableSpecError(Exception):
    """compute_counterstrategy was called on a realizable spec."""


# --------------------------------------------------------------------------
# Counterstrategy transition system


@dataclass
class Counterstrategy:
    """Finite transition system whose plays all satisfy the assumptions and
    violate the guarantee conjunction of its source spec."""

    states: tuple[int, ...]
    transitions: tuple[tuple[int, int], ...]
    initial: tuple[int, ...]
    labeling: dict[int, Valuation]
    memory_vars: tuple[str, ...]

    def successors(self, state: int) -> tuple[int, ...]:
        return self._adjacency().get(state, ())

    def _adjacency(self) -> dict[int, tuple[int, ...]]:
        adj = getattr(self, "_adj", None)
        if adj is None:
            table: dict[int, list[int]] = {q: [] for q in self.states}
            for src, dst in self.transitions:
                table[src].append(dst)
            adj = {q: tuple(ts) for q, ts in table.items()}
            object.__setattr__(self, "_adj", adj)
        return adj

    def validate(self):
        """Check the structural invariants; raises ValueError on violation."""
        if not self.initial:
            raise ValueError("counterstrategy has no initial state")
        ids = set(self.states)
        if not set(self.initial) <= ids:
            raise ValueError("initial states missing from state set")
        for src, dst in self.transitions:
            if src not in ids or dst not in ids:
                raise ValueError("transition endpoint missing from state set")
        universe = None
        for q in self.states:
            label = self.labeling.get(q)
            if label is None:
                raise ValueError(f"state {q} has no labeling")
            if universe is None:
                universe = label.universe
            elif label.universe != universe:
                raise ValueError("labelings disagree on the variable universe")
        adj = self._adjacency()
        seen = set(self.initial)
        queue = deque(self.initial)
        while queue:
            q = queue.popleft()
            succs = adj.get(q, ())
            if not succs:
                raise ValueError(f"reachable state {q} has no successor")
            for t in succs:
                if t not in seen:
                    seen.add(t)
                    queue.append(t)

    def to_json(self) -> str:
        payload = {
            "states": [
                {"id": q, "label": {n: bool(v) for n, v in sorted(self.labeling[q].items())}}
                for q in self.states
            ],
            "transitions": [[src, dst] for src, dst in self.transitions],
            "initial": list(self.initial),
            "memory_vars": list(self.memory_vars),
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Counterstrategy":
        payload = json.loads(text)
        labeling = {
            entry["id"]: Valuation(entry["label"]) for entry in payload["states"]
        }
        return cls(
            states=tuple(entry["id"] for entry in payload["states"]),
            transitions=tuple((src, dst) for src, dst in payload["transitions"]),
            initial=tuple(payload["initial"]),
            labeling=labeling,
            memory_vars=tuple(payload["memory_vars"]),
        )

    def to_dot(self) -> str:
        lines = ["digraph counterstrategy {", "  rankdir=LR;"]
        initial = set(self.initial)
        for q in self.states:
            true_vars = ", ".join(self.labeling[q].true_names())
            shape = ', peripheries=2' if q in initial else ""
            lines.append(f'  q{q} [label="{{{true_vars}}}"{shape}];')
        for src, dst in self.transitions:
            lines.append(f"  q{src} -> q{dst};")
        lines.append("}")
        return "\n".join(lines)


# --------------------------------------------------------------------------
# Arena


class Arena:
    """All valuations of the declared variables plus the legal moves."""

    def __init__(self, spec: Gr1Spec, var_cap: int = DEFAULT_VAR_CAP):
        variables = spec.variables
        if len(variables) > var_cap:
            raise VarCapError(len(variables), var_cap)
        for a in spec.assumptions:
            if a.gr1_class is Gr1Class.INVARIANT:
                bad = [v for v in next_variables_of(a.body) if v.kind is not VarKind.INPUT]
                if bad:
                    raise ValueError(
                        f"assumption invariant applies X to non-input variable {bad[0].name!r}"
                    )
        self.spec = spec
        self.variables = variables
        self.names = tuple(v.name for v in variables)
        self.nx = len(spec.inputs)
        self.ny = len(spec.outputs)
        self.n = len(variables)
        self.n_states = 1 << self.n
        self._input_mask = (1 << self.nx) - 1

        self._assumption_initial = self._bodies(spec.assumptions, Gr1Class.INITIAL)
        self._assumption_invariant = self._bodies(spec.assumptions, Gr1Class.INVARIANT)
        self._assumption_fairness = self._bodies(spec.assumptions, Gr1Class.FAIRNESS)
        self._guarantee_initial = self._bodies(spec.guarantees, Gr1Class.INITIAL)
        self._guarantee_invariant = self._bodies(spec.guarantees, Gr1Class.INVARIANT)
        self._guarantee_fairness = self._bodies(spec.guarantees, Gr1Class.FAIRNESS)

        self._valuations: list[Valuation | None] = [None] * self.n_states
        self._env_moves: dict[int, tuple[int, ...]] = {}
        self._sys_moves: dict[tuple[int, int], tuple[int, ...]] = {}

    @staticmethod
    def _bodies(elements, gr1_class):
        return tuple(e.body for e in elements if e.gr1_class is gr1_class)

    # -- state encoding ----------------------------------------------------

    def state_of(self, inputs: int, outputs: int) -> int:
        return inputs | (outputs << self.nx)

    def inputs_of(self, state: int) -> int:
        return state & self._input_mask

    def valuation(self, state: int) -> Valuation:
        cached = self._valuations[state]
        if cached is None:
            cached = Valuation(
                {name: bool(state >> k & 1) for k, name in enumerate(self.names)}
            )
            self._valuations[state] = cached
        return cached

    @property
    def states(self) -> range:
        return range(self.n_states)

    # -- moves ---------------------------------------------------------------

    def env_moves(self, state: int) -> tuple[int, ...]:
        """Input valuations the environment may play next from ``state``."""
        cached = self._env_moves.get(state)
        if cached is None:
            now = self.valuation(state)
            cached = tuple(
                u for u in range(1 << self.nx)
                if all(
                    eval_expr(body, now, self.valuation(self.state_of(u, 0)))
                    for body in self._assumption_invariant
                )
            )
            self._env_moves[state] = cached
        return cached

    def sys_moves(self, state: int, inputs: int) -> tuple[int, ...]:
        """Output replies consistent with the guarantee invariants."""
        key = (state, inputs)
        cached = self._sys_moves.get(key)
        if cached is None:
            now = self.valuation(state)
            cached = tuple(
                y for y in range(1 << self.ny)
                if all(
                    eval_expr(body, now, self.valuation(self.state_of(inputs, y)))
                    for body in self._guarantee_invariant
                )
            )
            self._sys_moves[key] = cached
        return cached

    # -- predicates ----------------------------------------------------------

    def _satisfying(self, bodies) -> frozenset[int]:
        return frozenset(
            s for s in self.states
            if all(eval_expr(body, self.valuation(s)) for body in bodies)
        )

    @functools.cached_property
    def env_init(self) -> frozenset[int]:
        return self._satisfying(self._assumption_initial)

    @functools.cached_property
    def sys_init(self) -> frozenset[int]:
        return self._satisfying(self._guarantee_initial)

    @functools.cached_property
    def assumption_fair(self) -> tuple[frozenset[int], ...]:
        return tuple(self._satisfying((b,)) for b in self._assumption_fairness)

    @functools.cached_property
    def guarantee_fair(self) -> tuple[frozenset[int], ...]:
        return tuple(self._satisfying((b,)) for b in self._guarantee_fairness)

    # -- assumption graph ----------------------------------------------------

    def assumption_successors(self, state: int) -> tuple[int, ...]:
        """Full-state successors consistent with the assumption invariants
        (outputs unconstrained; they belong to nobody once the guarantees are
        out of the picture)."""
        return tuple(
            self.state_of(u, y)
            for u in self.env_moves(state)
            for y in range(1 << self.ny)
        )


def build_arena(spec: Gr1Spec, var_cap: int = DEFAULT_VAR_CAP) -> Arena:
    return Arena(spec, var_cap)


# --------------------------------------------------------------------------
# Assumption satisfiability


def assumptions_satisfiable(assumptions, universe, var_cap: int = DEFAULT_VAR_CAP) -> bool:
    """Does some infinite sequence over the universe satisfy all elements?

    Decided on the explicit transition graph: reachable (from a state meeting
    every initial condition) strongly connected subgraph with an edge and a
    witness state per fairness condition.
    """
    universe = tuple(universe)
    if len(universe) > var_cap:
        raise VarCapError(len(universe), var_cap)
    names = tuple(v.name for v in universe)
    n_states = 1 << len(names)
    valuations = [
        Valuation({name: bool(s >> k & 1) for k, name in enumerate(names)})
        for s in range(n_states)
    ]
    initial = [e.body for e in assumptions if e.gr1_class is Gr1Class.INITIAL]
    invariant = [e.body for e in assumptions if e.gr1_class is Gr1Class.INVARIANT]
    fairness = [e.body for e in assumptions if e.gr1_class is Gr1Class.FAIRNESS]

    try:
        init_states = [
            s for s in range(n_states)
            if all(eval_expr(b, valuations[s]) for b in initial)
        ]
        if not init_states:
            return False
        adjacency = [
            tuple(
                t for t in range(n_states)
                if all(eval_expr(b, valuations[s], valuations[t]) for b in invariant)
            )
            for s in range(n_states)
        ]
        fair_sets = [
            frozenset(s for s in range(n_states) if eval_expr(b, valuations[s]))
            for b in fairness
        ] or [frozenset(range(n_states))]
    except EvalError as exc:
        raise EvalError(f"assumption mentions a variable outside the universe: {exc}") from exc

    fair = fair_reach(range(n_states), lambda s: adjacency[s], fair_sets)
    return any(s in fair for s in init_states)


# --------------------------------------------------------------------------
# Game analysis

_NORMAL, _USABLE_DL, _UNUSABLE_DL = range(3)


@dataclass
class _Analysis:
    arena: Arena
    je: tuple[frozenset[int], ...] = ()
    js: tuple[frozenset[int], ...] = ()
    faircont: frozenset[int] = frozenset()
    winning: frozenset[int] = frozenset()
    env_winning: frozenset[int] = frozenset()
    levels: list[frozenset[int]] = field(default_factory=list)
    ydata: dict = field(default_factory=dict)     # (level, j) -> frozenset
    onions: dict = field(default_factory=dict)    # (level, j, i) -> [layers]
    dstar: frozenset[int] = frozenset()
    realizable: bool = True
    bad_input: int | None = None
    bad_kind: str | None = None                   # "game" or "init_deadlock"


def _analyze(spec: Gr1Spec, var_cap: int) -> _Analysis:
    arena = Arena(spec, var_cap)
    a = _Analysis(arena)
    all_states = frozenset(arena.states)

    a.je = arena.assumption_fair or (all_states,)
    a.js = arena.guarantee_fair or (all_states,)
    a.faircont = fair_reach(arena.states, arena.assumption_successors, a.je)

    # classify every (state, input) once: a controller deadlock is usable for
    # the environment only if some completion keeps the assumptions alive
    normal: list[tuple[tuple[int, tuple[int, ...]], ...]] = []
    usable: list[tuple[int, ...]] = []
    for s in arena.states:
        n_entries = []
        u_entries = []
        for u in arena.env_moves(s):
            ys = arena.sys_moves(s, u)
            if ys:
                n_entries.append((u, tuple(arena.state_of(u, y) for y in ys)))
            elif any(
                arena.state_of(u, y) in a.faircont for y in range(1 << arena.ny)
            ):
                u_entries.append(u)
        normal.append(tuple(n_entries))
        usable.append(tuple(u_entries))
    a.dstar = frozenset(s for s in arena.states if usable[s])
    a._normal = normal
    a._usable = usable

    def cpre(targets: frozenset[int]) -> frozenset[int]:
        out = []
        for s in arena.states:
            if usable[s]:
                continue
            if all(any(t in targets for t in ts) for _, ts in normal[s]):
                out.append(s)
        return frozenset(out)

    def apre(targets: frozenset[int]) -> frozenset[int]:
        out = []
        for s in arena.states:
            if any(all(t in targets for t in ts) for _, ts in normal[s]):
                out.append(s)
        return frozenset(out)

    bound = arena.n_states + 1

    # controller winning region (primal fixpoint)
    z = all_states
    for _ in range(bound):
        z_new = all_states
        for js_j in a.js:
            cpre_z = cpre(z)
            y = frozenset()
            for _ in range(bound):
                y_new = frozenset()
                cpre_y = cpre(y)
                base = (js_j & cpre_z) | cpre_y
                for je_i in a.je:
                    not_je = all_states - je_i
                    x = all_states
                    for _ in range(bound):
                        x_new = base | (not_je & cpre(x))
                        if x_new == x:
                            break
                        x = x_new
                    else:
                        raise AssertionError("nuX exceeded the state-count bound")
                    y_new |= x
                if y_new == y:
                    break
                y = y_new
            else:
                raise AssertionError("muY exceeded the state-count bound")
            z_new &= y
        if z_new == z:
            break
        z = z_new
    else:
        raise AssertionError("nuZ exceeded the state-count bound")
    a.winning = z

    # environment winning region (dual fixpoint), with the strategy layers
    # recorded for counterstrategy extraction
    dstar = a.dstar
    levels = [frozenset()]
    for _ in range(bound):
        z_prev = levels[-1]
        apre_z = apre(z_prev) | dstar
        z_new: frozenset[int] = frozenset()
        level = len(levels)
        for j, js_j in enumerate(a.js):
            not_js = (all_states - js_j) | apre_z
            yp = all_states
            for _ in range(bound):
                stay = apre(yp) | dstar
                yp_new = all_states
                for i, je_i in enumerate(a.je):
                    x = frozenset()
                    for _ in range(bound):
                        x_new = not_js & stay & (je_i | apre(x) | dstar)
                        if x_new == x:
                            break
                        x = x_new
                    else:
                        raise AssertionError("muX' exceeded the state-count bound")
                    yp_new &= x
                if yp_new == yp:
                    break
                yp = yp_new
            else:
                raise AssertionError("nuY' exceeded the state-count bound")
            # re-derive the onion layers at the fixpoint for strategy use
            stay = apre(yp) | dstar
            for i, je_i in enumerate(a.je):
                layers = [frozenset()]
                for _ in range(bound):
                    nxt = not_js & stay & (je_i | apre(layers[-1]) | dstar)
                    if nxt == layers[-1]:
                        break
                    layers.append(nxt)
                else:
                    raise AssertionError("muX' exceeded the state-count bound")
                a.onions[(level, j, i)] = layers
            a.ydata[(level, j)] = yp
            z_new |= yp
        if z_new == z_prev:
            break
        levels.append(z_new)
    else:
        raise AssertionError("muZ' exceeded the state-count bound")
    a.levels = levels
    a.env_winning = levels[-1]

    if a.env_winning != all_states - a.winning:
        raise AssertionError("primal and dual fixpoints disagree")

    # initial move: the environment proposes inputs, the controller completes
    env_init = arena.env_init
    sys_init = arena.sys_init
    legal_init = env_init & sys_init
    for u0 in sorted(range(1 << arena.nx), reverse=True):
        completions = [arena.state_of(u0, y) for y in range(1 << arena.ny)]
        if not any(t in env_init for t in completions):
            continue  # not a legal environment opening
        legal = [t for t in completions if t in legal_init]
        if legal:
            if all(t in a.env_winning for t in legal):
                a.realizable = False
                a.bad_input = u0
                a.bad_kind = "game"
                break
        else:
            if any(t in env_init and t in a.faircont for t in completions):
                a.realizable = False
                a.bad_input = u0
                a.bad_kind = "init_deadlock"
                break
    return a


@functools.lru_cache(maxsize=128)
def _analyze_cached(spec: Gr1Spec, var_cap: int) -> _Analysis:
    return _analyze(spec, var_cap)


def realizable(spec: Gr1Spec, var_cap: int = DEFAULT_VAR_CAP) -> bool:
    """Does a controller strategy exist for ``assumptions -> guarantees``?"""
    return _analyze_cached(spec, var_cap).realizable


# --------------------------------------------------------------------------
# Counterstrategy extraction


class _Extractor:
    """Builds the counterstrategy transition system from the dual fixpoint.

    Memory per state: ``j`` (blocked guarantee fairness; saturated to len(js)
    once a guarantee violation happened) and ``i`` (next assumption fairness
    to honour).  The environment always plays the highest input valuation
    among its correct moves; controller replies branch over all legal
    outputs.
    """

    def __init__(self, analysis: _Analysis):
        self.a = analysis
        self.arena = analysis.arena
        self.n_j = len(analysis.js)
        self.n_i = len(analysis.je)
        self.viol = self.n_j
        self._routes: dict[int, dict[int, int]] = {}

    # -- memory bookkeeping -------------------------------------------------

    def advance_i(self, state: int, i: int) -> int:
        return (i + 1) % self.n_i if state in self.a.je[i] else i

    def zrank(self, state: int) -> int:
        for level, states in enumerate(self.a.levels):
            if state in states:
                return level
        raise AssertionError(f"state {state} outside the environment winning region")

    def anchor(self, state: int, j: int, i: int) -> int | None:
        """Smallest level whose (j, i) pursuit set contains ``state``."""
        for level in range(1, len(self.a.levels)):
            if state in self.a.onions[(level, j, i)][-1]:
                return level
        return None

    def form(self, state: int, j: int | None, i: int) -> tuple[int, int, int]:
        """Normalise the memory counters on entering ``state``.

        ``j=None`` forces a fresh choice of blocked guarantee fairness at the
        state's own level; used after level drops, where keeping the old
        branch could bounce the play back up and never block anything.
        """
        i = self.advance_i(state, i)
        if j == self.viol:
            return (state, j, i)
        if j is None or self.anchor(state, j, i) is None:
            level = self.zrank(state)
            j = min(
                jj for jj in range(self.n_j)
                if state in self.a.ydata[(level, jj)]
            )
        return (state, j, i)

    # -- moves ---------------------------------------------------------------

    def _pick_move(self, state: int, targets: frozenset[int]):
        """Highest environment input whose every controller reply lands in
        ``targets``; successors are all the replies."""
        for u, ts in sorted(self.a._normal[state], reverse=True):
            if all(t in targets for t in ts):
                return ts
        raise AssertionError("strategy move promised by the fixpoint is missing")

    def game_successors(self, state: int, j: int, i: int) -> list[tuple[int, int, int]]:
        a = self.a
        if state in a.dstar:
            u = max(a._usable[state])
            t = max(
                self.arena.state_of(u, y)
                for y in range(1 << self.arena.ny)
                if self.arena.state_of(u, y) in a.faircont
            )
            return [self.form(t, self.viol, i)]
        level = self.anchor(state, j, i)
        if state in a.js[j]:
            # passing through the blocked fairness forces a strict level
            # drop; the branch j is re-chosen at the lower level
            if level < 2:
                raise AssertionError("guarantee-fair state at the bottom level")
            return [
                self.form(t, None, i)
                for t in self._pick_move(state, a.levels[level - 1])
            ]
        if state in a.je[i]:
            targets = a.ydata[(level, j)]
        else:
            layers = a.onions[(level, j, i)]
            rank = next(r for r in range(1, len(layers)) if state in layers[r])
            targets = layers[rank - 1]
        return [self.form(t, j, i) for t in self._pick_move(state, targets)]

    def violated_successor(self, state: int, i: int) -> tuple[int, int, int]:
        route = self._routes.get(i)
        if route is None:
            route = self._build_route(i)
            self._routes[i] = route
        return self.form(route[state], self.viol, i)

    def _build_route(self, i: int) -> dict[int, int]:
        """Deterministic next-hop toward the i-th assumption fairness inside
        the fair-continuation region (backward BFS from the targets)."""
        a = self.a
        region = a.faircont
        adjacency = {
            s: tuple(t for t in self.arena.assumption_successors(s) if t in region)
            for s in region
        }
        targets = a.je[i] & region
        dist = {t: 0 for t in targets}
        frontier = deque(sorted(targets))
        predecessors: dict[int, list[int]] = {}
        for s, ts in adjacency.items():
            for t in ts:
                predecessors.setdefault(t, []).append(s)
        while frontier:
            t = frontier.popleft()
            for s in predecessors.get(t, ()):
                if s not in dist:
                    dist[s] = dist[t] + 1
                    frontier.append(s)
        route = {}
        for s in region:
            route[s] = min(adjacency[s], key=lambda t: (dist.get(t, len(region) + 1), -t))
        return route


def compute_counterstrategy(spec: Gr1Spec, var_cap: int = DEFAULT_VAR_CAP) -> Counterstrategy:
    """Environment strategy witnessing unrealizability, as a labelled
    transition system over the spec variables plus memory bits."""
    a = _analyze_cached(spec, var_cap)
    if a.realizable:
        raise RealizableSpecError("spec is realizable; no counterstrategy exists")
    arena = a.arena
    ex = _Extractor(a)

    u0 = a.bad_input
    completions = [arena.state_of(u0, y) for y in range(1 << arena.ny)]
    if a.bad_kind == "game":
        raw_initial = [
            (t, None) for t in completions
            if t in arena.env_init and t in arena.sys_init
        ]
    else:
        t = max(
            t for t in completions if t in arena.env_init and t in a.faircont
        )
        raw_initial = [(t, ex.viol)]

    initial_keys = [ex.form(t, mode, 0) for t, mode in raw_initial]

    ids: dict[tuple[int, int, int], int] = {}
    order: list[tuple[int, int, int]] = []
    transitions: list[tuple[int, int]] = []

    def intern(key) -> int:
        if key not in ids:
            ids[key] = len(order)
            order.append(key)
        return ids[key]

    queue = deque(intern(k) for k in initial_keys)
    expanded: set[int] = set()
    while queue:
        qid = queue.popleft()
        if qid in expanded:
            continue
        expanded.add(qid)
        state, j, i = order[qid]
        if j == ex.viol:
            succs = [ex.violated_successor(state, i)]
        else:
            succs = ex.game_successors(state, j, i)
        for key in succs:
            tid = intern(key)
            transitions.append((qid, tid))
            if tid not in expanded:
                queue.append(tid)

    mem_prefix = "_mem"
    names = set(arena.names)
    while any(name.startswith(mem_prefix) for name in names):
        mem_prefix = "_" + mem_prefix
    bits_j = max(1, (ex.viol).bit_length())
    bits_i = max(1, (ex.n_i - 1).bit_length())
    memory_vars = tuple(
        [f"{mem_prefix}_j_{k}" for k in range(bits_j)]
        + [f"{mem_prefix}_i_{k}" for k in range(bits_i)]
    )

    labeling = {}
    for qid, (state, j, i) in enumerate(order):
        assignment = {
            name: bool(state >> k & 1) for k, name in enumerate(arena.names)
        }
        for k in range(bits_j):
            assignment[f"{mem_prefix}_j_{k}"] = bool(j >> k & 1)
        for k in range(bits_i):
            assignment[f"{mem_prefix}_i_{k}"] = bool(i >> k & 1)
        labeling[qid] = Valuation(assignment)

    cs = Counterstrategy(
        states=tuple(range(len(order))),
        transitions=tuple(transitions),
        initial=tuple(ids[k] for k in initial_keys),
        labeling=labeling,
        memory_vars=memory_vars,
    )
    cs.validate()
    return cs
