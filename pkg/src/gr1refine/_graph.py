"""Small graph utilities shared by the game solver and the model checker."""

from __future__ import annotations


def strongly_connected_components(nodes, successors):
    """Iterative Tarjan.  Components are emitted successors-first (reverse
    topological order of the condensation)."""
    index: dict = {}
    low: dict = {}
    onstack: set = set()
    stack: list = []
    sccs: list[list] = []
    counter = 0

    for root in nodes:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        onstack.add(root)
        work = [(root, iter(successors(root)))]
        while work:
            node, it = work[-1]
            advanced = False
            for succ in it:
                if succ not in index:
                    index[succ] = low[succ] = counter
                    counter += 1
                    stack.append(succ)
                    onstack.add(succ)
                    work.append((succ, iter(successors(succ))))
                    advanced = True
                    break
                if succ in onstack:
                    low[node] = min(low[node], index[succ])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                component = []
                while True:
                    w = stack.pop()
                    onstack.discard(w)
                    component.append(w)
                    if w == node:
                        break
                sccs.append(component)
    return sccs


def _has_internal_edge(component, successors):
    members = set(component)
    if len(component) > 1:
        return True
    (node,) = component
    return any(succ == node for succ in successors(node))


def has_cycle(nodes, successors):
    """True iff the graph induced by ``nodes`` contains a cycle."""
    node_set = set(nodes)

    def restricted(n):
        return (s for s in successors(n) if s in node_set)

    return any(
        _has_internal_edge(c, restricted)
        for c in strongly_connected_components(node_set, restricted)
    )


def fair_reach(nodes, successors, fairness_sets):
    """States from which an infinite path visiting every fairness set
    infinitely often exists.

    Such a path exists from ``s`` iff ``s`` reaches a strongly connected
    subgraph with at least one edge containing at least one state per
    fairness set.
    """
    sccs = strongly_connected_components(nodes, successors)
    component: dict = {}
    reach_fair: list[bool] = []
    for k, scc in enumerate(sccs):
        for v in scc:
            component[v] = k
        fair = _has_internal_edge(scc, successors) and all(
            any(v in fair_set for v in scc) for fair_set in fairness_sets
        )
        if not fair:
            # successor components are already classified (reverse topological)
            fair = any(
                reach_fair[component[t]]
                for v in scc
                for t in successors(v)
                if component[t] != k
            )
        reach_fair.append(fair)
    return frozenset(v for v, k in component.items() if reach_fair[k])
