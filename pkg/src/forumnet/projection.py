"""Bipartite construction, one-mode user projection and threshold sparsification."""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import BipartiteGraph, Graph, GraphError, WeightedGraph
from .ingest import WindowSlice


@dataclass(frozen=True)
class ProjectionResult:
    weighted: WeightedGraph   # restricted to users with at least one edge
    threshold: float
    sparsified: Graph         # edges with weight >= threshold; no isolated nodes
    user_index: tuple         # position -> original user index


def build_bipartite(w: WindowSlice):
    """Per-window user-thread incidence (post counts).

    Returns (BipartiteGraph, user ids in index order, thread ids in index
    order); only users/threads with in-window posts appear.
    """
    users = sorted({p.user_id for p in w.posts})
    threads = sorted({p.thread_id for p in w.posts})
    uidx = {u: i for i, u in enumerate(users)}
    tidx = {t: i for i, t in enumerate(threads)}
    incidence: dict[tuple[int, int], int] = {}
    for p in w.posts:
        key = (uidx[p.user_id], tidx[p.thread_id])
        incidence[key] = incidence.get(key, 0) + 1
    return BipartiteGraph(len(users), len(threads), incidence), users, threads


def project_users(b: BipartiteGraph, weighted: bool = True) -> WeightedGraph:
    """One-mode projection onto users.

    Plain mode sums x_it * x_jt over threads; weighted mode divides each
    thread's contribution by (users_in_thread - 1) * posts_in_thread, so
    crowded threads bind their participants more loosely. Single-user
    threads contribute nothing.
    """
    per_thread: dict[int, list[tuple[int, int]]] = {}
    for (u, t), c in b.incidence.items():
        per_thread.setdefault(t, []).append((u, c))
    weights: dict[tuple[int, int], float] = {}
    for t, members in per_thread.items():
        if len(members) < 2:
            continue
        members.sort()
        phi = sum(c for _, c in members)
        denom = (len(members) - 1) * phi if weighted else 1
        for a in range(len(members)):
            ua, ca = members[a]
            for bb in range(a + 1, len(members)):
                ub, cb = members[bb]
                key = (ua, ub)
                weights[key] = weights.get(key, 0.0) + ca * cb / denom
    return WeightedGraph(b.user_count, weights)


def sparsify_threshold(g: WeightedGraph) -> ProjectionResult:
    """Drop edges below the largest weight that isolates nobody.

    The threshold is the minimum over nodes of their maximum incident
    weight; keeping edges >= that value preserves every node's strongest
    tie, and any higher cutoff would isolate a minimizing node. Users with
    no incident edges at all are excluded before thresholding.
    """
    max_w: dict[int, float] = {}
    for (u, v), w in g.weights.items():
        if w > max_w.get(u, 0.0):
            max_w[u] = w
        if w > max_w.get(v, 0.0):
            max_w[v] = w
    if not max_w:
        raise GraphError("cannot sparsify a graph with no edges")
    active = sorted(max_w)
    remap = {u: i for i, u in enumerate(active)}
    threshold = min(max_w.values())
    weighted = WeightedGraph(
        len(active),
        {(remap[u], remap[v]): w for (u, v), w in g.weights.items()},
    )
    kept = frozenset(
        pair for pair, w in weighted.weights.items() if w >= threshold
    )
    return ProjectionResult(weighted, threshold,
                            Graph(len(active), kept), tuple(active))
