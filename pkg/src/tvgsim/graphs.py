"""Static undirected graph kernel and dominating-set combinatorics.

Vertices are opaque string identifiers ordered by (length, byte value), which
gives a strict total order over ids matching ``[A-Za-z0-9_]+``.  Edges are
canonical ordered pairs (smaller endpoint first).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Iterable, Iterator, Optional, Tuple

from .errors import CapacityError, DomainError

VertexId = str
Edge = Tuple[VertexId, VertexId]

# Exponential oracles are for desk-scale verification only.
SUBGRAPH_EDGE_CAP = 16
SUBSET_VERTEX_CAP = 12


def vertex_key(v: VertexId):
    return (len(v), v)


def edge_key(e: Edge):
    return (vertex_key(e[0]), vertex_key(e[1]))


def make_edge(u: VertexId, v: VertexId) -> Edge:
    if u == v:
        raise DomainError(f"self-loop on vertex {u!r}")
    return (u, v) if vertex_key(u) < vertex_key(v) else (v, u)


@dataclass(frozen=True)
class StaticGraph:
    vertices: FrozenSet[VertexId]
    edges: FrozenSet[Edge]

    @staticmethod
    def of(vertices: Iterable[VertexId], edges: Iterable[Tuple[VertexId, VertexId]]) -> "StaticGraph":
        vs = frozenset(vertices)
        es = frozenset(make_edge(u, v) for (u, v) in edges)
        for (u, v) in es:
            if u not in vs or v not in vs:
                raise DomainError(f"edge ({u!r}, {v!r}) has an endpoint outside the vertex set")
        return StaticGraph(vs, es)

    def sorted_vertices(self):
        return sorted(self.vertices, key=vertex_key)

    def sorted_edges(self):
        return sorted(self.edges, key=edge_key)

    def neighbors(self, v: VertexId) -> set:
        if v not in self.vertices:
            raise DomainError(f"unknown vertex {v!r}")
        return {u if w == v else w for (u, w) in self.edges if v in (u, w)}

    def has_edge(self, u: VertexId, v: VertexId) -> bool:
        return make_edge(u, v) in self.edges

    def with_edge(self, u: VertexId, v: VertexId) -> "StaticGraph":
        return StaticGraph(self.vertices | {u, v}, self.edges | {make_edge(u, v)})

    def union(self, other: "StaticGraph") -> "StaticGraph":
        return StaticGraph(self.vertices | other.vertices, self.edges | other.edges)

    def subgraph_with_edges(self, edges: Iterable[Edge]) -> "StaticGraph":
        """Spanning subgraph: same vertices, the given subset of edges."""
        es = frozenset(edges)
        extra = es - self.edges
        if extra:
            raise DomainError(f"edges not in graph: {sorted(extra, key=edge_key)}")
        return StaticGraph(self.vertices, es)

    def component_of(self, v: VertexId) -> "StaticGraph":
        """Induced subgraph on the connected component containing v."""
        if v not in self.vertices:
            raise DomainError(f"unknown vertex {v!r}")
        adj = self._adjacency()
        seen = {v}
        queue = deque([v])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        es = frozenset(e for e in self.edges if e[0] in seen and e[1] in seen)
        return StaticGraph(frozenset(seen), es)

    def _adjacency(self):
        adj = {v: set() for v in self.vertices}
        for (u, v) in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


def is_connected(g: StaticGraph) -> bool:
    if not g.vertices:
        raise DomainError("connectivity is undefined on an empty vertex set")
    adj = g._adjacency()
    start = next(iter(g.vertices))
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen) == len(g.vertices)


def _bfs_distances(adj, source):
    dist = {source: 0}
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def diameter(g: StaticGraph) -> int:
    if not is_connected(g):
        raise DomainError("diameter is undefined on a disconnected graph")
    adj = g._adjacency()
    best = 0
    for v in g.vertices:
        dist = _bfs_distances(adj, v)
        best = max(best, max(dist.values()))
    return best


def is_cut_set(g: StaticGraph, f: Iterable[Edge]) -> bool:
    fs = frozenset(make_edge(u, v) for (u, v) in f)
    extra = fs - g.edges
    if extra:
        raise DomainError(f"cut-set candidate contains edges not in graph: {sorted(extra, key=edge_key)}")
    if not is_connected(g):
        raise DomainError("cut-set test requires a connected graph")
    return not is_connected(g.subgraph_with_edges(g.edges - fs))


def is_dominating(g: StaticGraph, m: Iterable[VertexId]) -> bool:
    ms = frozenset(m)
    extra = ms - g.vertices
    if extra:
        raise DomainError(f"dominating-set candidate contains unknown vertices: {sorted(extra, key=vertex_key)}")
    adj = g._adjacency()
    return all(v in ms or adj[v] & ms for v in g.vertices)


def is_minimal_dominating(g: StaticGraph, m: Iterable[VertexId]) -> bool:
    # Removing any single member breaks domination; equivalent to the
    # no-strict-subset condition because domination is monotone.
    ms = frozenset(m)
    if not is_dominating(g, ms):
        return False
    return all(not is_dominating(g, ms - {v}) for v in ms)


@lru_cache(maxsize=None)
def _enumerate_mds_cached(g: StaticGraph) -> Tuple[FrozenSet[VertexId], ...]:
    verts = g.sorted_vertices()
    n = len(verts)
    index = {v: i for i, v in enumerate(verts)}
    closed = []
    for i, v in enumerate(verts):
        mask = 1 << i
        for u in g.neighbors(v):
            mask |= 1 << index[u]
        closed.append(mask)
    full = (1 << n) - 1
    result = []
    for size in range(1, n + 1):
        for combo in itertools.combinations(range(n), size):
            cover = 0
            for i in combo:
                cover |= closed[i]
            if cover != full:
                continue
            minimal = True
            for drop in combo:
                sub = 0
                for i in combo:
                    if i != drop:
                        sub |= closed[i]
                if sub == full:
                    minimal = False
                    break
            if minimal:
                result.append(frozenset(verts[i] for i in combo))
    return tuple(result)


def enumerate_minimal_dominating_sets(g: StaticGraph, max_vertices: int = SUBSET_VERTEX_CAP):
    """All minimal dominating sets, ordered by cardinality then lexicographically
    on the sorted identifier lists."""
    if not g.vertices:
        raise DomainError("no dominating sets on an empty vertex set")
    if len(g.vertices) > max_vertices:
        raise CapacityError(
            f"subset scan capped at {max_vertices} vertices, got {len(g.vertices)}"
        )
    return list(_enumerate_mds_cached(g))


def enumerate_connected_spanning_subgraphs(
    g: StaticGraph, max_edges: int = SUBGRAPH_EDGE_CAP
) -> Iterator[StaticGraph]:
    """Every spanning subgraph (V, E') with E' subset of E connected on all of V."""
    if not is_connected(g):
        raise DomainError("spanning subgraphs require a connected graph")
    edges = g.sorted_edges()
    if len(edges) > max_edges:
        raise CapacityError(
            f"spanning-subgraph enumeration capped at {max_edges} edges, got {len(edges)}"
        )
    n = len(g.vertices)
    for size in range(max(n - 1, 0), len(edges) + 1):
        for combo in itertools.combinations(edges, size):
            sub = g.subgraph_with_edges(combo)
            if is_connected(sub):
                yield sub


def is_smds_bruteforce(g: StaticGraph, m: Iterable[VertexId], max_edges: int = SUBGRAPH_EDGE_CAP) -> bool:
    ms = frozenset(m)
    return all(
        is_minimal_dominating(sub, ms)
        for sub in enumerate_connected_spanning_subgraphs(g, max_edges)
    )


def is_smds_via_cutsets(g: StaticGraph, m: Iterable[VertexId]) -> bool:
    ms = frozenset(m)
    if not is_connected(g):
        raise DomainError("cut-set characterization requires a connected graph")
    if not is_minimal_dominating(g, ms):
        raise DomainError("cut-set characterization requires a minimal dominating set")
    for p in g.vertices - ms:
        dominators = {make_edge(p, q) for q in g.neighbors(p) & ms}
        if not is_cut_set(g, dominators):
            return False
    return True


def smds_witness(g: StaticGraph, m: Iterable[VertexId]) -> Optional[VertexId]:
    """First dominated vertex (in id order) whose dominator edges are not a
    cut-set, or None when the candidate passes the characterization."""
    ms = frozenset(m)
    for p in sorted(g.vertices - ms, key=vertex_key):
        dominators = {make_edge(p, q) for q in g.neighbors(p) & ms}
        if not is_cut_set(g, dominators):
            return p
    return None


@lru_cache(maxsize=None)
def _find_smds_cached(g: StaticGraph) -> Optional[FrozenSet[VertexId]]:
    for candidate in _enumerate_mds_cached(g):
        if is_smds_via_cutsets(g, candidate):
            return candidate
    return None


def find_smds(g: StaticGraph, max_vertices: int = SUBSET_VERTEX_CAP) -> Optional[FrozenSet[VertexId]]:
    """First minimal dominating set (in canonical order) passing the cut-set
    characterization, or None when the graph admits no such set."""
    if not is_connected(g):
        raise DomainError("strong-MDS search requires a connected graph")
    if len(g.vertices) > max_vertices:
        raise CapacityError(
            f"subset scan capped at {max_vertices} vertices, got {len(g.vertices)}"
        )
    return _find_smds_cached(g)
