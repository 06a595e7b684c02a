"""Static Louvain detector: greedy local moving plus community aggregation.

The optimizer accepts an arbitrary starting partition, which is exactly how the
incremental updater reuses it: the update builds an intermediate partition and
hands it to :func:`louvain` instead of starting from singletons.

Vertex sweeps run in ascending vertex-id order with smallest-community-id tie
breaking, so detection is fully deterministic; pass ``order_seed`` to shuffle
the sweep order reproducibly instead.
"""

from __future__ import annotations

import random
from typing import Mapping, Optional

from .errors import EmptyGraphError, UnknownVertexError
from .graph import Partition, WeightedGraph, modularity, _stable_sum

DEFAULT_EPSILON = 1e-7


class CompressedGraph:
    """Aggregated graph whose vertices are the communities of a source partition.

    ``self_weights[c]`` carries the community's internal weight in the ordered
    pair convention (twice the internal edge sum), so each self-loop contributes
    its full value to the super-vertex strength and half of it to the total
    weight. Under this convention the identity partition of the compressed
    graph has the same modularity as the source partition on the source graph.
    """

    __slots__ = ("_adj", "_self", "_strength", "_m", "parent_map")

    def __init__(
        self,
        adjacency: dict[int, dict[int, float]],
        self_weights: dict[int, float],
        parent_map: dict[int, int],
    ):
        self._adj = adjacency
        self._self = self_weights
        self._strength = {
            u: _stable_sum(adjacency[u]) + self_weights.get(u, 0.0) for u in adjacency
        }
        self._m = 0.5 * _stable_sum(self._strength)
        #: maps each vertex of the source graph to its super-vertex id
        self.parent_map = parent_map

    @property
    def vertices(self):
        return self._adj.keys()

    @property
    def num_vertices(self) -> int:
        return len(self._adj)

    @property
    def total_weight(self) -> float:
        return self._m

    def neighbors(self, u: int) -> Mapping[int, float]:
        return self._adj[u]

    def strength(self, u: int) -> float:
        return self._strength[u]

    def self_weight(self, u: int) -> float:
        return self._self.get(u, 0.0)

    def __repr__(self) -> str:
        return f"CompressedGraph(|V|={self.num_vertices}, m={self._m:g})"


def compress(g, p: Partition) -> CompressedGraph:
    """Aggregate each community of ``p`` into one super-vertex.

    Super-vertices are numbered 0..k-1 in ascending order of the source
    community ids; ``parent_map`` retains the vertex-to-super-vertex mapping
    for unfolding.
    """
    cids = sorted(p.community_ids)
    super_of_community = {c: i for i, c in enumerate(cids)}
    parent_map = {v: super_of_community[p.community_of(v)] for v in g.vertices}

    adj: dict[int, dict[int, float]] = {i: {} for i in range(len(cids))}
    self_w: dict[int, float] = {i: 0.0 for i in range(len(cids))}
    for u in sorted(g.vertices):
        cu = parent_map[u]
        self_w[cu] += g.self_weight(u)
        row = adj[cu]
        for v, w in g.neighbors(u).items():
            if u < v:
                cv = parent_map[v]
                if cu == cv:
                    self_w[cu] += 2.0 * w
                else:
                    row[cv] = row.get(cv, 0.0) + w
                    adj[cv][cu] = row[cv]
    return CompressedGraph(adj, self_w, parent_map)


def local_moving_pass(g, p: Partition, epsilon: float = DEFAULT_EPSILON,
                      _order_rng: Optional[random.Random] = None) -> tuple[Partition, bool]:
    """One local optimization phase: sweep vertices until a full sweep moves none.

    Each vertex is moved to the neighboring community with the largest
    modularity gain when that gain exceeds ``epsilon``, and stays put
    otherwise. Ties prefer the smallest community id. Emptied communities are
    dropped. Returns the resulting partition and whether any move occurred.
    """
    m = g.total_weight
    if m <= 0.0:
        raise EmptyGraphError("local moving undefined for zero-weight graphs")
    two_m = 2.0 * m
    min_gain = epsilon * m  # gains below are tracked scaled by m

    assign = dict(p.assignment)
    alpha = {c: p.alpha(c) for c in p.community_ids}
    beta = {c: p.beta(c) for c in p.community_ids}
    members = {c: set(p.members(c)) for c in p.community_ids}

    order = sorted(g.vertices)
    if _order_rng is not None:
        _order_rng.shuffle(order)

    neighbors_of = g.neighbors
    strength_of = g.strength
    self_of = g.self_weight

    improved = False
    while True:
        moved = False
        for v in order:
            a = assign[v]
            k_v = strength_of(v)
            s_v = self_of(v)
            w_to: dict[int, float] = {}
            for u, w in neighbors_of(v).items():
                cu = assign[u]
                w_to[cu] = w_to.get(cu, 0.0) + w
            w_a = w_to.get(a, 0.0)
            factor = k_v / two_m
            base = w_a - factor * (beta[a] - k_v)

            best_gain = min_gain
            best_c = None
            for c in sorted(w_to):
                if c == a:
                    continue
                gain = (w_to[c] - factor * beta[c]) - base
                if gain > best_gain:
                    best_gain = gain
                    best_c = c

            if best_c is None:
                continue
            b = best_c
            alpha[a] -= 2.0 * w_a + s_v
            beta[a] -= k_v
            group = members[a]
            group.remove(v)
            if not group:
                del members[a], alpha[a], beta[a]
            alpha[b] += 2.0 * w_to[b] + s_v
            beta[b] += k_v
            members[b].add(v)
            assign[v] = b
            moved = True
            improved = True
        if not moved:
            break

    frozen = {c: frozenset(s) for c, s in members.items()}
    return Partition(assign, frozen, alpha, beta), improved


def louvain(
    g: WeightedGraph,
    initial: Optional[Partition] = None,
    epsilon: float = DEFAULT_EPSILON,
    order_seed: Optional[int] = None,
) -> Partition:
    """Full Louvain optimization from ``initial`` (all singletons by default).

    Alternates local moving and compression until no further improvement is
    possible, then unfolds the hierarchy back to the original vertices. The
    returned partition's modularity never falls below the initial one, and
    communities carry fresh ids 0..k-1 ordered by smallest member.
    """
    if g.total_weight <= 0.0:
        raise EmptyGraphError("detection undefined for graphs with zero total weight")

    if initial is None:
        level_p = Partition.singletons(g)
    else:
        if set(initial.assignment) != set(g.vertices):
            raise UnknownVertexError("initial partition does not cover the graph")
        level_p = initial

    rng = random.Random(order_seed) if order_seed is not None else None
    level_graph = g
    to_level = {v: v for v in g.vertices}
    prev_q = modularity(level_graph, level_p)

    while True:
        level_p, _ = local_moving_pass(level_graph, level_p, epsilon, _order_rng=rng)
        q = modularity(level_graph, level_p)
        assert q >= prev_q - 1e-12, "modularity decreased across a pass"
        prev_q = q

        comp = compress(level_graph, level_p)
        if comp.num_vertices == level_graph.num_vertices:
            break
        to_level = {v: comp.parent_map[lv] for v, lv in to_level.items()}
        level_graph = comp
        level_p = Partition.singletons(comp)

    return _unfold(g, to_level, level_p)


def _unfold(g, to_level: dict[int, int], level_p: Partition) -> Partition:
    """Project the final-level partition back onto the original vertices.

    Compression preserves per-community aggregates exactly, so the final
    level's alpha/beta transfer to the unfolded communities unchanged.
    """
    assignment = _renumber({v: level_p.community_of(lv) for v, lv in to_level.items()})
    members: dict[int, set[int]] = {}
    level_community: dict[int, int] = {}
    for v, c in assignment.items():
        members.setdefault(c, set()).add(v)
        level_community[c] = level_p.community_of(to_level[v])
    frozen = {c: frozenset(s) for c, s in members.items()}
    alpha = {c: level_p.alpha(lc) for c, lc in level_community.items()}
    beta = {c: level_p.beta(lc) for c, lc in level_community.items()}
    return Partition(assignment, frozen, alpha, beta)


def _renumber(assignment: dict[int, int]) -> dict[int, int]:
    """Relabel community ids to 0..k-1 in ascending order of smallest member."""
    smallest: dict[int, int] = {}
    for v in sorted(assignment):
        smallest.setdefault(assignment[v], v)
    order = sorted(smallest, key=smallest.get)
    relabel = {c: i for i, c in enumerate(order)}
    return {v: relabel[c] for v, c in assignment.items()}
