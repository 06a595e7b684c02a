"""Incremental community updates on evolving snapshots.

Given the previous snapshot, its partition, and the batch of changes leading to
the next snapshot, the updater classifies every change, builds an initialization
plan (communities to dissolve into singletons plus two-vertex seed communities),
materializes the intermediate partition, and lets the greedy optimizer finish
from there instead of from scratch.

Change handling, with all thresholds evaluated against the pre-change snapshot:

* intra-community addition / weight increase: dissolve the touched community,
  seed the two endpoints as a pair;
* cross-community addition / weight increase: merge test against the closed-form
  threshold (see :func:`ccea_merge_threshold`); below it nothing changes, above
  it both communities dissolve and the endpoints seed a pair;
* intra-community deletion / weight decrease: dissolve the touched community and
  every community adjacent to either endpoint;
* cross-community deletion / weight decrease: no plan entries (the structure
  only gets stronger);
* vertex addition: dissolve the communities adjacent to the new vertex and seed
  it with its heaviest neighbor (smallest id on ties);
* vertex deletion: dissolve the vertex's community and all neighbor communities.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import (
    DegenerateDenominatorError,
    InconsistentSnapshotsError,
    SameCommunityError,
)
from .graph import (
    EdgeChange,
    GraphDelta,
    Partition,
    VertexAddition,
    VertexRemoval,
    WeightedGraph,
)
from .louvain import DEFAULT_EPSILON, louvain


class ChangeKind(enum.Enum):
    """The six change categories an evolving snapshot can contain."""

    ICEA_WI = "intra-community edge addition / weight increase"
    CCEA_WI = "cross-community edge addition / weight increase"
    ICED_WD = "intra-community edge deletion / weight decrease"
    CCED_WD = "cross-community edge deletion / weight decrease"
    VERTEX_ADD = "vertex addition"
    VERTEX_DEL = "vertex deletion"


@dataclass(frozen=True)
class InitPlan:
    """Output of the initialization step.

    ``dissolve`` lists community ids to explode into singletons; ``pair_seeds``
    lists unordered vertex pairs to create as fresh two-vertex communities. A
    vertex occurs in at most one pair.
    """

    dissolve: frozenset[int] = frozenset()
    pair_seeds: frozenset[frozenset[int]] = frozenset()

    def is_empty(self) -> bool:
        return not (self.dissolve or self.pair_seeds)


def classify(g_t: WeightedGraph, p_t: Partition, change,
             delta: Optional[GraphDelta] = None) -> ChangeKind:
    """Kind of one delta element, given the pre-change snapshot and partition.

    An edge change touching a vertex that the surrounding ``delta`` adds or
    removes counts as vertex addition/deletion context; removal takes
    precedence. Without ``delta``, additions are still inferred from endpoints
    absent in ``g_t``, but removals cannot be.
    """
    if isinstance(change, VertexAddition):
        return ChangeKind.VERTEX_ADD
    if isinstance(change, VertexRemoval):
        return ChangeKind.VERTEX_DEL
    u, v, dw = change
    added = delta.added_vertices if delta is not None else frozenset()
    removed = delta.removed_vertices if delta is not None else frozenset()
    if u in removed or v in removed:
        return ChangeKind.VERTEX_DEL
    if u in added or v in added or not g_t.has_vertex(u) or not g_t.has_vertex(v):
        return ChangeKind.VERTEX_ADD
    same = p_t.community_of(u) == p_t.community_of(v)
    if dw > 0:
        return ChangeKind.ICEA_WI if same else ChangeKind.CCEA_WI
    return ChangeKind.ICED_WD if same else ChangeKind.CCED_WD


def ccea_merge_threshold(g_t: WeightedGraph, p_t: Partition, i: int, j: int) -> float:
    """Weight increase beyond which merging the two endpoint communities wins.

    For a cross-community increase of ``dw`` on ``(i, j)``, merging strictly
    improves modularity over keeping the structure unchanged iff ``dw`` exceeds
    the returned value. Evaluated on the pre-change snapshot.
    """
    c_i = p_t.community_of(i)
    c_j = p_t.community_of(j)
    if c_i == c_j:
        raise SameCommunityError(f"vertices {i} and {j} share community {c_i}")
    m = g_t.total_weight
    cross = _cross_weight(g_t, p_t.members(c_i), p_t.members(c_j))
    alpha2 = -2.0 * cross  # alpha_i + alpha_j - alpha_merged
    beta2 = p_t.beta(c_i) + p_t.beta(c_j)
    d1 = 2.0 * m - alpha2 - beta2
    d2 = m * alpha2 + p_t.beta(c_i) * p_t.beta(c_j)
    # discriminant equals (2m - beta2)^2 + 4(beta_i - cross)(beta_j - cross) >= 0
    disc = d1 * d1 + 4.0 * d2
    return 0.5 * (-d1 + math.sqrt(max(disc, 0.0)))


def bisplit_threshold(g, p: Partition, community: int, subset: Iterable[int]) -> float:
    """Weight increase beyond which bi-splitting ``community`` can win.

    ``subset`` is the side that keeps the changed edge's endpoints. Exposed for
    property checks only; the batch initializer never evaluates bi-splits (that
    would require scanning every split of the community).
    """
    part = frozenset(subset)
    whole = p.members(community)
    if not part or not part < whole:
        raise ValueError("subset must be a non-empty proper subset of the community")
    rest = whole - part
    alpha_p, beta_p = _subset_aggregates(g, part)
    alpha_q, beta_q = _subset_aggregates(g, rest)
    alpha1 = p.alpha(community) - alpha_p - alpha_q
    denominator = 2.0 * beta_q - alpha1
    if abs(denominator) < 1e-12:
        raise DegenerateDenominatorError(
            f"2*beta_q - alpha1 vanishes for community {community}"
        )
    return (g.total_weight * alpha1 - beta_p * beta_q) / denominator


def init(
    g_t1: WeightedGraph,
    g_t: WeightedGraph,
    p_t: Partition,
    d: GraphDelta,
) -> InitPlan:
    """Build the initialization plan for one snapshot delta.

    Edge changes are processed in stored (file) order; dissolve sets accumulate
    by union, and a later pair seed involving an already-seeded vertex replaces
    that vertex's earlier pair. Incident edges of removed vertices are expanded
    into implicit deletions so vertex-deletion handling always triggers.
    """
    _check_consistency(g_t1, g_t, d)

    dissolve: set[int] = set()
    pair_of: dict[int, frozenset[int]] = {}
    cross_cache: dict[tuple[int, int], float] = {}

    def seed_pair(i: int, j: int) -> None:
        for old in (pair_of.get(i), pair_of.get(j)):
            if old is not None:
                for x in old:
                    pair_of.pop(x, None)
        pair = frozenset((i, j))
        pair_of[i] = pair
        pair_of[j] = pair

    def handle_vertex_del(k: int) -> None:
        dissolve.add(p_t.community_of(k))
        for l in g_t.neighbors(k):
            dissolve.add(p_t.community_of(l))

    def handle_vertex_add(k: int) -> None:
        w_max = 0.0
        best = None
        nbrs = g_t1.neighbors(k)
        for l in sorted(nbrs):
            if g_t.has_vertex(l):
                dissolve.add(p_t.community_of(l))
            # else: the neighbor is itself new and has no community to dissolve
            if nbrs[l] > w_max:
                w_max = nbrs[l]
                best = l
        if best is not None:
            seed_pair(k, best)

    added = d.added_vertices
    removed = d.removed_vertices
    changed_edges = list(d.edge_changes)
    for k in sorted(removed):
        for l in sorted(g_t.neighbors(k)):
            changed_edges.append(EdgeChange(k, l, -g_t.weight(k, l)))

    m = g_t.total_weight
    for u, v, dw in changed_edges:
        special = False
        for k in (u, v):
            if k in removed:
                handle_vertex_del(k)
                special = True
            elif k in added or not g_t.has_vertex(k):
                handle_vertex_add(k)
                special = True
        if special:
            continue

        c_u = p_t.community_of(u)
        c_v = p_t.community_of(v)
        if dw < 0.0:
            if c_u == c_v:
                dissolve.add(c_u)
                for k in (u, v):
                    for l in g_t.neighbors(k):
                        dissolve.add(p_t.community_of(l))
            # cross-community decreases strengthen the structure: no entries
        else:
            if c_u == c_v:
                dissolve.add(c_u)
                seed_pair(u, v)
            elif _merge_improves(g_t, p_t, c_u, c_v, dw, cross_cache):
                dissolve.add(c_u)
                dissolve.add(c_v)
                seed_pair(u, v)

    pairs = frozenset(pair_of.values())
    return InitPlan(frozenset(dissolve), pairs)


def intermediate_partition(
    g_t1: WeightedGraph,
    p_t: Partition,
    plan: InitPlan,
    d: GraphDelta,
) -> Partition:
    """Materialize the plan on the new snapshot.

    Non-dissolved communities carry over (minus deleted members), dissolved
    communities explode into singletons, pair seeds become two-vertex
    communities, and added vertices outside any pair stay singletons.

    Aggregates are composed in O(|delta| + dissolved) time: a change internal
    to a community always dissolves it and a removed or added vertex dissolves
    every community it touches, so surviving communities keep their alpha and
    only see beta shifts from cross-community weight changes.
    """
    removed = d.removed_vertices
    added = d.added_vertices

    beta_shift: dict[int, float] = {}
    for u, v, dw in d.edge_changes:
        if u in removed or v in removed or u in added or v in added:
            continue
        if not (g_t1.has_vertex(u) and g_t1.has_vertex(v)):
            continue
        c_u = p_t.community_of(u)
        c_v = p_t.community_of(v)
        if c_u == c_v:
            continue  # intra-community changes dissolve the community anyway
        beta_shift[c_u] = beta_shift.get(c_u, 0.0) + dw
        beta_shift[c_v] = beta_shift.get(c_v, 0.0) + dw

    assign: dict[int, int] = {}
    members: dict[int, frozenset[int]] = {}
    alpha: dict[int, float] = {}
    beta: dict[int, float] = {}
    next_id = 0

    for c in sorted(p_t.community_ids):
        if c in plan.dissolve:
            continue
        group = p_t.members(c)
        if removed:
            # only zero-strength vertices can be removed out of a surviving community
            group = group - removed
        if not group:
            continue
        for v in group:
            assign[v] = next_id
        members[next_id] = group
        alpha[next_id] = p_t.alpha(c)
        beta[next_id] = p_t.beta(c) + beta_shift.get(c, 0.0)
        next_id += 1

    for c in sorted(plan.dissolve):
        for v in sorted(p_t.members(c)):
            if v in removed:
                continue
            assign[v] = next_id
            members[next_id] = frozenset((v,))
            alpha[next_id] = 0.0
            beta[next_id] = g_t1.strength(v)
            next_id += 1

    for v in sorted(added):
        assign[v] = next_id
        members[next_id] = frozenset((v,))
        alpha[next_id] = 0.0
        beta[next_id] = g_t1.strength(v)
        next_id += 1

    for pair in sorted(plan.pair_seeds, key=min):
        i, j = sorted(pair)
        for x in (i, j):  # pair endpoints are always singletons at this point
            old = assign[x]
            del members[old], alpha[old], beta[old]
        assign[i] = next_id
        assign[j] = next_id
        members[next_id] = frozenset(pair)
        alpha[next_id] = 2.0 * g_t1.weight(i, j)
        beta[next_id] = g_t1.strength(i) + g_t1.strength(j)
        next_id += 1

    return Partition(assign, members, alpha, beta)


def dynamo_update(
    g_t1: WeightedGraph,
    g_t: WeightedGraph,
    p_t: Partition,
    d: GraphDelta,
    epsilon: float = DEFAULT_EPSILON,
    order_seed: Optional[int] = None,
) -> Partition:
    """Update the community structure across one snapshot transition."""
    plan = init(g_t1, g_t, p_t, d)
    intermediate = intermediate_partition(g_t1, p_t, plan, d)
    return louvain(g_t1, initial=intermediate, epsilon=epsilon, order_seed=order_seed)


def refine_check(q_current: float, q_threshold: float) -> bool:
    """True when maintained modularity fell below the refinement threshold.

    The caller should then rerun full static detection from singletons on the
    current snapshot. A threshold of -1 (or lower) never fires.
    """
    return q_current < q_threshold


def _merge_improves(g_t: WeightedGraph, p_t: Partition, c_u: int, c_v: int,
                    dw: float, cache: Optional[dict] = None) -> bool:
    """Merge test for a cross-community increase of ``dw``.

    The merge condition is equivalent to ``cross > x*`` where ``cross`` is the
    existing inter-community weight and ``x*`` depends only on community
    aggregates. ``0 <= cross <= min(beta_u, beta_v)`` bounds decide without a
    scan when possible; otherwise the cross weight is computed once per
    community pair and batch (``cache``).
    """
    m = g_t.total_weight
    beta_u = p_t.beta(c_u)
    beta_v = p_t.beta(c_v)
    x_star = (beta_u * beta_v - dw * dw - (2.0 * m - beta_u - beta_v) * dw) / (2.0 * (dw + m))
    if x_star < 0.0:
        return True
    if x_star >= min(beta_u, beta_v):
        return False
    key = (c_u, c_v) if c_u < c_v else (c_v, c_u)
    cross = None if cache is None else cache.get(key)
    if cross is None:
        cross = _cross_weight(g_t, p_t.members(c_u), p_t.members(c_v))
        if cache is not None:
            cache[key] = cross
    return cross > x_star


def _cross_weight(g, side_a: frozenset[int], side_b: frozenset[int]) -> float:
    """Total weight of edges between two disjoint vertex sets."""
    if len(side_b) < len(side_a):
        side_a, side_b = side_b, side_a
    total = 0.0
    for v in sorted(side_a):
        for nbr, w in g.neighbors(v).items():
            if nbr in side_b:
                total += w
    return total


def _subset_aggregates(g, subset: frozenset[int]) -> tuple[float, float]:
    """(alpha, beta) of an ad-hoc vertex set, by direct summation."""
    alpha = 0.0
    beta = 0.0
    for v in sorted(subset):
        alpha += g.self_weight(v)
        beta += g.strength(v)
        for nbr, w in g.neighbors(v).items():
            if nbr in subset:
                alpha += w
    return alpha, beta


def _check_consistency(g_t1: WeightedGraph, g_t: WeightedGraph, d: GraphDelta) -> None:
    """Cheap validation that ``g_t + d`` matches ``g_t1``.

    Checks vertex sets, the net weight of every changed edge, and the total
    weight; O(|delta| + |V| + deg(removed)) rather than a full graph compare.
    """
    expected_vertices = (set(g_t.vertices) | d.added_vertices) - d.removed_vertices
    if expected_vertices != set(g_t1.vertices):
        raise InconsistentSnapshotsError("vertex sets disagree with the delta")

    net: dict[tuple[int, int], float] = {}
    for u, v, dw in d.edge_changes:
        key = (u, v) if u < v else (v, u)
        net[key] = net.get(key, 0.0) + dw

    tol = 1e-6 * max(1.0, g_t.total_weight)
    expected_m = g_t.total_weight + sum(net[k] for k in sorted(net))
    seen: set[tuple[int, int]] = set()
    for k in sorted(d.removed_vertices):
        for l in sorted(g_t.neighbors(k)):
            key = (k, l) if k < l else (l, k)
            if key not in seen:
                seen.add(key)
                expected_m -= g_t.weight(k, l) + net.get(key, 0.0)
    for key in sorted(net):
        a, b = key
        if key in seen:
            continue
        if a in d.removed_vertices or b in d.removed_vertices:
            expected_m -= net[key]  # edge created then dropped with its vertex
            seen.add(key)
        elif abs(g_t1.weight(a, b) - (g_t.weight(a, b) + net[key])) > tol:
            raise InconsistentSnapshotsError(f"edge {key} weight disagrees with the delta")
    if abs(expected_m - g_t1.total_weight) > tol:
        raise InconsistentSnapshotsError("total weight disagrees with the delta")
