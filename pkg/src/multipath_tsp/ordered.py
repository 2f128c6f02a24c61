"""Ordered tour solver: sampling, single-arc reconnection, join-based parity
correction, and extraction of order-respecting walks.

Each pending vertex costs one edge here instead of two; the resulting odd
degrees of the combined edge multiset are then fixed by a minimum join. The
extra edges (reconnections plus the join) always have even degree at every
vertex, so they split into closed excursions that can be spliced into the
sampled walks without disturbing the terminal order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .decomposition import Decomposition, decompose
from .errors import InternalError
from .graphs import all_pairs_distances
from .instances import Instance, OrderedInstance, Solution, validate_solution
from .lp import EPS_OBJ, FractionalSolution, solve_lp
from .multipath import CostReport, attachment_order, make_report, sample_paths
from .parity import EdgeMultiset, TJoin, min_tjoin, odd_vertices


@dataclass(frozen=True)
class OrderedSolution:
    """Walk i runs from terminal i to terminal i+1 (cyclically); closing them
    head-to-tail gives a spanning closed walk hitting the terminals in order."""

    walks: tuple[tuple[int, ...], ...]
    cost: int


@dataclass(frozen=True, eq=False)
class OrderedPlan:
    instance: OrderedInstance
    base: Instance
    lp: FractionalSolution
    decomposition: Decomposition
    dists: list[list[int]]


def prepare_ordered(inst: OrderedInstance) -> OrderedPlan:
    base = inst.to_instance()
    lp_sol = solve_lp(base)
    dec = decompose(base, lp_sol)
    return OrderedPlan(inst, base, lp_sol, dec, all_pairs_distances(inst.graph))


def validate_ordered(inst: OrderedInstance, sol: OrderedSolution) -> tuple[bool, str | None]:
    ok, why = validate_solution(inst.to_instance(), Solution(sol.walks, sol.cost))
    if not ok:
        return False, why
    # terminal order: concatenated walks must visit the terminals cyclically
    concat: list[int] = []
    for walk in sol.walks:
        concat.extend(walk)
    want = list(inst.order) + [inst.order[0]]
    pos = 0
    for v in concat:
        if pos < len(want) and v == want[pos]:
            pos += 1
    if pos < len(want):
        return False, "terminal order violated"
    return True, None


def _euler_circuit(edge_tokens: list[tuple[int, int, int]], start: int, n: int) -> list[int]:
    """Closed walk from `start` using every token (u, v, token id) exactly once.

    Hierholzer with the lowest available (neighbor, token) taken first, so the
    output is deterministic.
    """
    incident: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for u, v, tok in edge_tokens:
        incident[u].append((v, tok))
        incident[v].append((u, tok))
    for lst in incident:
        lst.sort()
    used: set[int] = set()
    ptr = [0] * n
    stack = [start]
    circuit: list[int] = []
    while stack:
        v = stack[-1]
        found = None
        while ptr[v] < len(incident[v]):
            w, tok = incident[v][ptr[v]]
            if tok in used:
                ptr[v] += 1
                continue
            found = (w, tok)
            break
        if found is None:
            circuit.append(stack.pop())
        else:
            used.add(found[1])
            stack.append(found[0])
    circuit.reverse()
    if len(used) != len(edge_tokens):
        raise InternalError("Eulerian traversal missed extra edges; component not connected")
    return circuit


def extract_ordered_walks(inst: OrderedInstance, paths, extra: EdgeMultiset) -> OrderedSolution:
    """Splice the extra edge multiset into the sampled walks as closed
    excursions, one per connected component of the extra edges.

    Each component is traversed as an Eulerian circuit anchored at its lowest
    vertex that lies on a sampled walk, and inserted at the first occurrence
    of that vertex in the lowest-indexed walk containing it.
    """
    g = inst.graph
    degrees = extra.degrees()
    if any(d % 2 for d in degrees):
        raise InternalError("parity violation: extra edges must have even degree everywhere")

    # connected components of the extra multiset
    adj: list[set[int]] = [set() for _ in range(g.n)]
    tokens: list[tuple[int, int, int]] = []
    tok = 0
    for e, count in extra.items():
        u, v = g.edges[e]
        adj[u].add(v)
        adj[v].add(u)
        for _ in range(count):
            tokens.append((u, v, tok))
            tok += 1
    component = [-1] * g.n
    n_comp = 0
    for v in range(g.n):
        if degrees[v] == 0 or component[v] != -1:
            continue
        stack = [v]
        component[v] = n_comp
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if component[w] == -1:
                    component[w] = n_comp
                    stack.append(w)
        n_comp += 1

    walks = [list(w) for w in paths]
    on_walk = [set(w) for w in walks]
    insertions: dict[int, dict[int, list[int]]] = {}
    for comp in range(n_comp):
        comp_vertices = [v for v in range(g.n) if component[v] == comp]
        anchors = [v for v in comp_vertices if any(v in s for s in on_walk)]
        if not anchors:
            raise InternalError("disconnected union: extra edges share no vertex with any walk")
        start = min(anchors)
        comp_tokens = [t for t in tokens if component[t[0]] == comp]
        circuit = _euler_circuit(comp_tokens, start, g.n)
        walk_idx = next(i for i in range(len(walks)) if start in on_walk[i])
        at = walks[walk_idx].index(start)
        insertions.setdefault(walk_idx, {})[at] = circuit

    out: list[tuple[int, ...]] = []
    total = 0
    for i, walk in enumerate(walks):
        todo = insertions.get(i, {})
        built: list[int] = []
        for pos, v in enumerate(walk):
            built.append(v)
            if pos in todo:
                built.extend(todo[pos][1:])
        out.append(tuple(built))
        total += len(built) - 1
    return OrderedSolution(tuple(out), total)


def run_ordered_trial(plan: OrderedPlan, seed: int) -> tuple[OrderedSolution, CostReport, TJoin]:
    """One sampling + reconnection + parity pass on a prepared plan."""
    inst = plan.instance
    g = inst.graph
    state = sample_paths(plan.decomposition, seed)
    steps = attachment_order(g, state.covered)
    extra = EdgeMultiset(g)
    for v, w in steps:
        extra.add(v, w)
    union = extra.copy()
    for walk in state.walks:
        union.add_walk(walk)
    join = min_tjoin(g, odd_vertices(union), plan.dists)
    for e in join.edges:
        extra.add_edge(e)
    sol = extract_ordered_walks(inst, state.walks, extra)
    sampling = sum(len(w) - 1 for w in state.walks)
    report = make_report(sampling, len(steps), join.cost, plan.lp.objective)
    if sol.cost != report.total:
        raise InternalError(f"walk extraction changed the edge count: {sol.cost} != {report.total}")
    if join.cost > plan.lp.objective / 2.0 + EPS_OBJ:
        raise InternalError("parity join exceeded half the LP value")
    ok, why = validate_ordered(inst, sol)
    if not ok:
        raise InternalError(f"ordered solver produced an invalid solution: {why}")
    return sol, report, join


def solve_ordered(inst: OrderedInstance, seed: int) -> tuple[OrderedSolution, CostReport]:
    sol, report, _ = run_ordered_trial(prepare_ordered(inst), seed)
    return sol, report
