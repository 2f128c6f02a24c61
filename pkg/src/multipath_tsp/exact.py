"""Exact optimum for small instances, and exhaustive cut verification.

The optimum is found by assigning every non-terminal vertex to exactly one
commodity and charging each commodity the shortest walk from its source to
its sink through its assigned set, measured in the BFS metric. Shortest
walks over a fixed set are Hamiltonian-path dynamic programs over subsets
(closed tours for depot commodities), and the assignment itself is a
partition dynamic program over submasks. In a metric a walk covering a
superset never costs less, so some optimal solution induces such an
assignment; the relaxed-oracle test in the suite spot-checks this reasoning.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import OracleLimitError
from .graphs import all_pairs_distances, shortest_path
from .instances import Instance, Solution
from .lp import EPS_LP, FractionalSolution

INF = float("inf")


@dataclass(frozen=True)
class ExactResult:
    cost: int
    assignment: tuple[frozenset[int], ...]   # free vertices given to each commodity
    orders: tuple[tuple[int, ...], ...]      # per-commodity waypoint sequence


def _walk_tables(dist, s: int, t: int, free: list[int]):
    """Held-Karp tables: best[mask][j] = cheapest s -> free[j] path visiting mask.

    Returns (cost per mask, waypoint order per mask) for ending at the
    commodity's own sink (s == t means the walk closes back at s).
    """
    f = len(free)
    end = t
    best = [[INF] * f for _ in range(1 << f)]
    parent = [[-1] * f for _ in range(1 << f)]
    for j in range(f):
        best[1 << j][j] = dist[s][free[j]]
    for mask in range(1, 1 << f):
        for j in range(f):
            if not mask >> j & 1 or best[mask][j] == INF:
                continue
            base = best[mask][j]
            for j2 in range(f):
                if mask >> j2 & 1:
                    continue
                nxt = mask | 1 << j2
                cand = base + dist[free[j]][free[j2]]
                if cand < best[nxt][j2]:
                    best[nxt][j2] = cand
                    parent[nxt][j2] = j
    cost = [0] * (1 << f)
    last = [-1] * (1 << f)
    cost[0] = dist[s][t]
    for mask in range(1, 1 << f):
        w = INF
        arg = -1
        for j in range(f):
            if mask >> j & 1 and best[mask][j] < INF:
                cand = best[mask][j] + dist[free[j]][end]
                if cand < w:
                    w = cand
                    arg = j
        cost[mask] = w
        last[mask] = arg

    def order(mask: int) -> tuple[int, ...]:
        if mask == 0:
            return (s,) if s == t else (s, t)
        seq = []
        j = last[mask]
        m = mask
        while j != -1:
            seq.append(free[j])
            pj = parent[m][j]
            m ^= 1 << j
            j = pj
        seq.reverse()
        return (s, *seq, t) if s != t else (s, *seq, s)

    return cost, order


def exact_opt(inst: Instance, limit_free: int = 10, limit_dp: int = 14) -> ExactResult:
    """Minimum total walk cost, exact, for desk-scale instances."""
    g = inst.graph
    free = sorted(set(range(g.n)) - inst.terminals)
    f = len(free)
    if f > limit_free or f > limit_dp:
        raise OracleLimitError(
            f"instance too large: {f} free vertices exceed the oracle limits "
            f"(limit_free={limit_free}, limit_dp={limit_dp})"
        )
    dist = all_pairs_distances(g)
    k = inst.k
    tables = []
    for s, t in inst.commodities:
        tables.append(_walk_tables(dist, s, t, free))

    full = (1 << f) - 1
    # partition DP: cheapest way for the first i+1 commodities to cover mask
    prev = list(tables[0][0])
    choice = [[0] * (1 << f)]
    for i in range(1, k):
        cost_i = tables[i][0]
        cur = [INF] * (1 << f)
        pick = [0] * (1 << f)
        for mask in range(1 << f):
            sub = mask
            while True:
                rest = mask ^ sub
                if prev[rest] < INF and cost_i[sub] < INF:
                    cand = prev[rest] + cost_i[sub]
                    if cand < cur[mask]:
                        cur[mask] = cand
                        pick[mask] = sub
                if sub == 0:
                    break
                sub = (sub - 1) & mask
        prev = cur
        choice.append(pick)

    total = prev[full]
    masks = [0] * k
    mask = full
    for i in range(k - 1, 0, -1):
        masks[i] = choice[i][mask]
        mask ^= masks[i]
    masks[0] = mask

    assignment = tuple(frozenset(free[j] for j in range(f) if masks[i] >> j & 1) for i in range(k))
    orders = tuple(tables[i][1](masks[i]) for i in range(k))
    return ExactResult(int(total), assignment, orders)


def reconstruct_walks(inst: Instance, result: ExactResult) -> Solution:
    """Expand an oracle result into graph walks via shortest paths."""
    walks = []
    cost = 0
    for order in result.orders:
        walk = [order[0]]
        for a, b in zip(order, order[1:]):
            walk.extend(shortest_path(inst.graph, a, b)[1:])
        walks.append(tuple(walk))
        cost += len(walk) - 1
    return Solution(tuple(walks), cost)


def brute_force_cut_check(
    inst: Instance, sol: FractionalSolution, eps: float = EPS_LP
) -> tuple[bool, tuple[int, int, frozenset[int]] | None]:
    """Verify every cut constraint by enumerating all vertex subsets.

    Returns (True, None) if for each commodity i, each vertex subset U
    avoiding the sink, and each v in U, the flow leaving U is at least the
    coverage z[i,v] minus eps. Otherwise returns the first witness (i, v, U).
    """
    n = inst.graph.n
    if n > 16:
        raise OracleLimitError("instance too large: cut enumeration is limited to 16 vertices")
    arcs = sol.digraph.arcs
    for i, (_, t) in enumerate(inst.commodities):
        flows = sol.flows[i]
        cover = sol.cover[i]
        candidates = [v for v in range(n) if v != t and cover[v] > eps]
        if not candidates:
            continue
        others = [v for v in range(n) if v != t]
        for bits in range(1, 1 << len(others)):
            members = frozenset(others[j] for j in range(len(others)) if bits >> j & 1)
            crossing = sum(flows[a] for a, (u, w) in enumerate(arcs) if u in members and w not in members)
            for v in candidates:
                if v in members and crossing < cover[v] - eps:
                    return False, (i, v, members)
    return True, None
