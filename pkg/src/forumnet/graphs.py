"""Simple undirected graphs, weighted graphs and bipartite incidence structures.

Node identities are dense integer indices throughout; string IDs from raw
data are mapped to indices at ingestion time and never reach graph math.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field


class GraphError(ValueError):
    """Invalid graph construction input."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: no self-loops, no duplicate edges."""

    node_count: int
    edges: frozenset[tuple[int, int]]  # each pair stored as (min, max)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self) -> list[list[int]]:
        """Sorted adjacency lists."""
        adj: list[list[int]] = [[] for _ in range(self.node_count)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for lst in adj:
            lst.sort()
        return adj

    def degrees(self) -> list[int]:
        deg = [0] * self.node_count
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with positive real edge weights."""

    node_count: int
    weights: dict[tuple[int, int], float] = field(default_factory=dict)

    @property
    def edge_count(self) -> int:
        return len(self.weights)

    def weighted_degrees(self) -> list[float]:
        wd = [0.0] * self.node_count
        for (u, v), w in self.weights.items():
            wd[u] += w
            wd[v] += w
        return wd

    def degrees(self) -> list[int]:
        deg = [0] * self.node_count
        for u, v in self.weights:
            deg[u] += 1
            deg[v] += 1
        return deg


@dataclass(frozen=True)
class BipartiteGraph:
    """User-thread incidence with per-pair post counts (absent means zero)."""

    user_count: int
    thread_count: int
    incidence: dict[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        for (u, t), c in self.incidence.items():
            if not (0 <= u < self.user_count and 0 <= t < self.thread_count):
                raise GraphError(f"incidence key out of bounds: ({u}, {t})")
            if c < 1:
                raise GraphError(f"incidence count must be >= 1, got {c} at ({u}, {t})")


def _check_pair(u: int, v: int, node_count: int) -> tuple[int, int]:
    if not (0 <= u < node_count) or not (0 <= v < node_count):
        raise GraphError(f"edge endpoint out of range: ({u}, {v}) with {node_count} nodes")
    if u == v:
        raise GraphError(f"self-loop not allowed: ({u}, {v})")
    return (u, v) if u < v else (v, u)


def build_graph(node_count, edge_list) -> Graph:
    """Build a simple graph, rejecting self-loops and duplicate edges."""
    if node_count < 0:
        raise GraphError("node_count must be non-negative")
    edges: set[tuple[int, int]] = set()
    for u, v in edge_list:
        pair = _check_pair(u, v, node_count)
        if pair in edges:
            raise GraphError(f"duplicate edge: ({u}, {v})")
        edges.add(pair)
    return Graph(node_count, frozenset(edges))


def build_weighted_graph(node_count, weighted_edges) -> WeightedGraph:
    """Build a weighted graph from (u, v, w) triples; weights must be > 0."""
    if node_count < 0:
        raise GraphError("node_count must be non-negative")
    weights: dict[tuple[int, int], float] = {}
    for u, v, w in weighted_edges:
        pair = _check_pair(u, v, node_count)
        if pair in weights:
            raise GraphError(f"duplicate edge: ({u}, {v})")
        if not w > 0:
            raise GraphError(f"edge weight must be positive: ({u}, {v}, {w})")
        weights[pair] = float(w)
    return WeightedGraph(node_count, weights)


def graph_stats(g) -> dict:
    """Degree sequence, density and isolated-node count.

    Density is |E| / C(n, 2) for n >= 2 and 0 for degenerate graphs.
    For weighted graphs the weighted degree sequence is included too.
    """
    deg = g.degrees()
    n = g.node_count
    m = g.edge_count
    density = 0.0 if n < 2 else m / (n * (n - 1) / 2)
    stats = {
        "degrees": deg,
        "density": density,
        "isolated": sum(1 for d in deg if d == 0),
    }
    if isinstance(g, WeightedGraph):
        stats["weighted_degrees"] = g.weighted_degrees()
    return stats


# Pair bit order for <=4 node adjacency bitmasks, shared with the orbit census.
PAIR_ORDER = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def adjacency_mask(node_count: int, edges) -> int:
    """Pack the adjacency of a graph on <=4 nodes into a bitmask."""
    bit = {p: i for i, p in enumerate(PAIR_ORDER)}
    mask = 0
    for u, v in edges:
        mask |= 1 << bit[(u, v) if u < v else (v, u)]
    return mask


def canonical_small(g: Graph) -> tuple[int, int]:
    """Canonical identifier for graphs with at most 4 nodes.

    Returns (node_count, minimum adjacency bitmask over all node
    permutations), so two small graphs get equal identifiers iff they
    are isomorphic.
    """
    n = g.node_count
    if n > 4:
        raise GraphError(f"canonical_small requires <= 4 nodes, got {n}")
    best = None
    for perm in itertools.permutations(range(n)):
        mask = adjacency_mask(n, ((perm[u], perm[v]) for u, v in g.edges))
        if best is None or mask < best:
            best = mask
    return (n, best if best is not None else 0)


def read_edge_list(lines):
    """Parse the `u v [w]` edge-list text format (0-based, `#` comments).

    Returns (node_count, edges) where edges are (u, v) pairs or (u, v, w)
    triples when any line carries a weight.
    """
    edges = []
    weighted = False
    max_node = -1
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphError(f"line {lineno}: expected 'u v [w]', got {raw!r}")
        u, v = int(parts[0]), int(parts[1])
        max_node = max(max_node, u, v)
        if len(parts) == 3:
            weighted = True
            edges.append((u, v, float(parts[2])))
        else:
            edges.append((u, v))
    if weighted:
        edges = [e if len(e) == 3 else (e[0], e[1], 1.0) for e in edges]
    return max_node + 1, edges


def write_edge_list(g) -> str:
    """Serialize a Graph or WeightedGraph to the edge-list text format."""
    lines = []
    if isinstance(g, WeightedGraph):
        for (u, v), w in sorted(g.weights.items()):
            lines.append(f"{u} {v} {w!r}")
    else:
        for u, v in sorted(g.edges):
            lines.append(f"{u} {v}")
    return "\n".join(lines) + ("\n" if lines else "")
