"""Bipartite preference-graph analytics at a fixed cut.

The graph has r player vertices and r tile vertices; an edge means the
player prefers that tile. Envy-free allocations are exactly its perfect
matchings, and for constructions admitting exactly two of them the graph
collapses to a single cycle of length 2r, which ``certify_extremal_structure``
checks instance by instance.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Allocation, InputError
from .preferences import preferred_tiles


@dataclass(frozen=True)
class PreferenceGraph:
    """Edges (player, tile) of the bipartite preference graph, 1-based."""

    r: int
    edges: frozenset

    def __post_init__(self):
        for j, i in self.edges:
            if not (1 <= j <= self.r and 1 <= i <= self.r):
                raise InputError(f"edge ({j}, {i}) outside 1..{self.r}")

    def player_degree(self, j):
        return sum(1 for jj, _ in self.edges if jj == j)

    def tile_degree(self, i):
        return sum(1 for _, ii in self.edges if ii == i)

    def neighbors(self, j):
        return sorted(i for jj, i in self.edges if jj == j)


@dataclass(frozen=True)
class MatchingUnionDecomposition:
    """Union of two perfect matchings split into shared edges and alternating cycles."""

    shared_edges: frozenset
    alternating_cycles: tuple
    uncolored_edges: frozenset


def build_graph(oracle, cut):
    """Preference graph of an oracle with players == arity at one cut."""
    if oracle.players != oracle.arity:
        raise InputError(
            f"preference graph needs players == arity, got {oracle.players} != {oracle.arity}"
        )
    r = oracle.arity
    edges = set()
    for j in range(1, r + 1):
        for i in preferred_tiles(oracle, cut, j):
            edges.add((j, i))
    return PreferenceGraph(r, frozenset(edges))


def enumerate_perfect_matchings(graph):
    """All perfect matchings as Allocations, sorted lexicographically.

    Plain backtracking; graphs here have at most ~8 vertices per side.
    """
    r = graph.r
    adjacency = {j: graph.neighbors(j) for j in range(1, r + 1)}
    used = [False] * (r + 1)
    assignment = [0] * r
    out = []

    def rec(j):
        if j > r:
            out.append(Allocation(tuple(assignment)))
            return
        for i in adjacency[j]:
            if not used[i]:
                used[i] = True
                assignment[j - 1] = i
                rec(j + 1)
                used[i] = False

    rec(1)
    return out


def _as_edge_set(graph, allocation, name):
    if allocation.arity != graph.r:
        raise InputError(f"{name} arity {allocation.arity} != graph arity {graph.r}")
    edges = set(allocation.pairs())
    missing = edges - set(graph.edges)
    if missing:
        raise InputError(f"{name} uses edges absent from the graph: {sorted(missing)}")
    return edges


def decompose_union(graph, m1, m2):
    """Split the union of two perfect matchings of the graph.

    Shared edges are those picked by both matchings; the symmetric
    difference falls apart into even cycles alternating between the two;
    graph edges picked by neither stay uncolored.
    """
    e1 = _as_edge_set(graph, m1, "first matching")
    e2 = _as_edge_set(graph, m2, "second matching")
    shared = frozenset(e1 & e2)
    uncolored = frozenset(set(graph.edges) - e1 - e2)

    cycles = []
    seen_players = set()
    for start in range(1, graph.r + 1):
        if start in seen_players or m1.of(start) == m2.of(start):
            continue
        cycle = []
        j = start
        while True:
            seen_players.add(j)
            t = m1.of(j)
            cycle.append((j, t))
            # walk back along the second matching to the player holding t there
            j = next(p for p in range(1, graph.r + 1) if m2.of(p) == t)
            cycle.append((j, t))
            if j == start:
                break
        cycles.append(tuple(cycle))
    return MatchingUnionDecomposition(shared, tuple(cycles), uncolored)


def is_single_cycle(graph):
    """True when the graph is connected with every vertex of degree exactly 2."""
    r = graph.r
    if any(graph.player_degree(j) != 2 for j in range(1, r + 1)):
        return False
    if any(graph.tile_degree(i) != 2 for i in range(1, r + 1)):
        return False
    # BFS over the bipartite vertex set: players 0..r-1, tiles r..2r-1
    adj = {v: [] for v in range(2 * r)}
    for j, i in graph.edges:
        adj[j - 1].append(r + i - 1)
        adj[r + i - 1].append(j - 1)
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for v in frontier:
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return len(seen) == 2 * r


def certify_extremal_structure(oracle, params):
    """Sweep an r-player oracle and report whether it shows the two-division shape.

    The verdict is true iff the sweep finds exactly one cut cluster, the
    cluster admits exactly two allocations, and the preference graph there
    is a single cycle through all 2r vertices. Degenerate findings are
    reported, never raised.
    """
    from .solver import sweep_envy_free  # local import to avoid a cycle

    clusters = sweep_envy_free(oracle, params)
    report = {
        "r": oracle.arity,
        "cluster_count": len(clusters),
        "clusters": [
            {
                "cut": list(c.cut.lengths),
                "grid_hits": c.grid_hits,
                "allocation_count": len(c.allocations),
                "allocations": [list(a.tiles) for a in c.allocations],
            }
            for c in clusters
        ],
        "unique_cut": None,
        "allocation_count": None,
        "player_degrees": None,
        "tile_degrees": None,
        "degrees_at_least_2": None,
        "gamma_is_cycle": None,
        "cycle_length": None,
        "conforms": False,
    }
    if len(clusters) != 1:
        return report
    cluster = clusters[0]
    graph = build_graph(oracle, cluster.cut)
    r = oracle.arity
    pdeg = [graph.player_degree(j) for j in range(1, r + 1)]
    tdeg = [graph.tile_degree(i) for i in range(1, r + 1)]
    cyc = is_single_cycle(graph)
    report.update(
        {
            "unique_cut": list(cluster.cut.lengths),
            "allocation_count": len(cluster.allocations),
            "player_degrees": pdeg,
            "tile_degrees": tdeg,
            "degrees_at_least_2": all(d >= 2 for d in pdeg + tdeg),
            "gamma_is_cycle": cyc,
            "cycle_length": len(graph.edges) if cyc else None,
            "conforms": cyc and len(cluster.allocations) == 2,
        }
    )
    return report
