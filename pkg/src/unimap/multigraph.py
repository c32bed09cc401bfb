"""Finite undirected multigraphs stored as dart pairs.

Edge ``e`` joins ``ends[e] = (u, v)`` and owns darts ``2e`` (at ``u``) and
``2e + 1`` (at ``v``), so ``twin(d) == d ^ 1``. Ids are dense integers and
never change once a graph is built; subgraph extraction returns explicit id
maps back to the parent.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import kernels


class GraphError(ValueError):
    """Malformed graph or violated precondition."""


class MultiGraph:
    """Immutable finite multigraph without self-loops."""

    def __init__(self, n_vertices: int, edges: Iterable[Sequence[int]] = ()):
        ends = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if n_vertices < 0:
            raise GraphError("negative vertex count")
        if ends.size and (ends.min() < 0 or ends.max() >= n_vertices):
            raise GraphError("edge endpoint outside vertex range")
        loops = np.flatnonzero(ends[:, 0] == ends[:, 1])
        if loops.size:
            raise GraphError(f"self-loop on edge {int(loops[0])}")
        ends.setflags(write=False)
        self._n = int(n_vertices)
        self._ends = ends

    # -- basic accessors -------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return self._n

    @property
    def n_edges(self) -> int:
        return self._ends.shape[0]

    @property
    def n_darts(self) -> int:
        return 2 * self._ends.shape[0]

    @property
    def ends(self) -> np.ndarray:
        return self._ends

    def vertices(self) -> range:
        return range(self._n)

    def edges(self) -> range:
        return range(self.n_edges)

    def endpoints(self, e: int) -> tuple[int, int]:
        u, v = self._ends[e]
        return int(u), int(v)

    def dart_vertex(self, d: int) -> int:
        return int(self._ends[d >> 1, d & 1])

    @staticmethod
    def twin(d: int) -> int:
        return d ^ 1

    @staticmethod
    def dart_edge(d: int) -> int:
        return d >> 1

    def dart_at(self, e: int, v: int) -> int:
        u, w = self.endpoints(e)
        if v == u:
            return 2 * e
        if v == w:
            return 2 * e + 1
        raise GraphError(f"vertex {v} is not an endpoint of edge {e}")

    def other_end(self, e: int, v: int) -> int:
        u, w = self.endpoints(e)
        return w if v == u else u

    @cached_property
    def _darts_at(self) -> tuple[tuple[int, ...], ...]:
        buckets: list[list[int]] = [[] for _ in range(self._n)]
        for d in range(self.n_darts):
            buckets[self.dart_vertex(d)].append(d)
        return tuple(tuple(b) for b in buckets)

    def darts_at(self, v: int) -> tuple[int, ...]:
        """Darts at ``v`` in increasing id order."""
        return self._darts_at[v]

    def degree(self, v: int) -> int:
        return len(self._darts_at[v])

    def degrees(self) -> np.ndarray:
        return np.bincount(self._ends.ravel(), minlength=self._n)

    def neighbors(self, v: int) -> list[int]:
        return sorted({self.dart_vertex(d ^ 1) for d in self._darts_at[v]})

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(indptr, indices, slot_edge)`` with one slot per dart."""
        deg = self.degrees()
        indptr = np.zeros(self._n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        indices = np.empty(self.n_darts, dtype=np.int64)
        slot_edge = np.empty(self.n_darts, dtype=np.int64)
        for v in range(self._n):
            for j, d in enumerate(self._darts_at[v]):
                indices[indptr[v] + j] = self.dart_vertex(d ^ 1)
                slot_edge[indptr[v] + j] = d >> 1
        return indptr, indices, slot_edge

    @cached_property
    def bundles(self) -> dict[tuple[int, int], tuple[int, ...]]:
        """Edge ids grouped by unordered endpoint pair ``(min, max)``."""
        out: dict[tuple[int, int], list[int]] = defaultdict(list)
        for e in range(self.n_edges):
            u, v = self.endpoints(e)
            out[(min(u, v), max(u, v))].append(e)
        return {k: tuple(v) for k, v in out.items()}

    def bundle_of(self, e: int) -> tuple[int, ...]:
        u, v = self.endpoints(e)
        return self.bundles[(min(u, v), max(u, v))]

    def is_simple(self) -> bool:
        return len(self.bundles) == self.n_edges

    def simplify(self) -> tuple[MultiGraph, list[int]]:
        """Collapse bundles; returns the simple graph and, per simple edge,
        the smallest original edge id of its bundle."""
        pairs = sorted(self.bundles)
        return MultiGraph(self._n, pairs), [self.bundles[p][0] for p in pairs]

    # -- subgraphs -------------------------------------------------------

    def induced_subgraph(self, vertices: Iterable[int]) -> tuple[MultiGraph, list[int], list[int]]:
        """Subgraph on ``vertices`` (kept in increasing order) with every edge
        having both ends inside. Returns ``(graph, vertex_ids, edge_ids)``
        mapping local ids to ids of ``self``."""
        keep = sorted(set(int(v) for v in vertices))
        local = {v: i for i, v in enumerate(keep)}
        edge_ids = [e for e in range(self.n_edges)
                    if int(self._ends[e, 0]) in local and int(self._ends[e, 1]) in local]
        sub = MultiGraph(len(keep), [(local[int(self._ends[e, 0])], local[int(self._ends[e, 1])])
                                     for e in edge_ids])
        return sub, keep, edge_ids

    def edge_subgraph(self, edge_ids: Iterable[int]) -> tuple[MultiGraph, list[int], list[int]]:
        """Subgraph spanned by ``edge_ids`` (and their endpoints only)."""
        eids = sorted(set(int(e) for e in edge_ids))
        verts = sorted({int(x) for e in eids for x in self._ends[e]})
        local = {v: i for i, v in enumerate(verts)}
        sub = MultiGraph(len(verts), [(local[int(self._ends[e, 0])], local[int(self._ends[e, 1])])
                                      for e in eids])
        return sub, verts, eids

    def without_edges(self, removed: Iterable[int]) -> tuple[MultiGraph, list[int]]:
        """Same vertex set, ``removed`` edges dropped; returns the edge id map."""
        gone = set(removed)
        kept = [e for e in range(self.n_edges) if e not in gone]
        return MultiGraph(self._n, [tuple(self._ends[e]) for e in kept]), kept

    # -- connectivity ----------------------------------------------------

    def components(self) -> list[list[int]]:
        label = self.component_labels()
        groups: dict[int, list[int]] = defaultdict(list)
        for v in range(self._n):
            groups[int(label[v])].append(v)
        return [groups[k] for k in sorted(groups)]

    def component_labels(self) -> np.ndarray:
        label = np.full(self._n, -1, dtype=np.int64)
        indptr, indices, _ = self.csr
        c = 0
        for s in range(self._n):
            if label[s] >= 0:
                continue
            dist = kernels.bfs_distances(indptr, indices, s, -1)
            label[dist >= 0] = c
            c += 1
        return label

    def is_connected(self) -> bool:
        if self._n == 0:
            return True
        indptr, indices, _ = self.csr
        return bool((kernels.bfs_distances(indptr, indices, 0, -1) >= 0).all())

    def distances_from(self, x: int, limit: int = -1) -> np.ndarray:
        indptr, indices, _ = self.csr
        return kernels.bfs_distances(indptr, indices, int(x), int(limit))

    # -- misc ------------------------------------------------------------

    def relabeled(self, perm: Sequence[int]) -> MultiGraph:
        """Vertex ``v`` becomes ``perm[v]``; edge ids unchanged."""
        p = np.asarray(perm, dtype=np.int64)
        return MultiGraph(self._n, p[self._ends])

    def to_networkx(self):
        import networkx as nx

        G = nx.MultiGraph()
        G.add_nodes_from(range(self._n))
        for e in range(self.n_edges):
            u, v = self.endpoints(e)
            G.add_edge(u, v, key=e)
        return G

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, MultiGraph) and self._n == other._n
                and np.array_equal(self._ends, other._ends))

    def __hash__(self) -> int:
        return hash((self._n, self._ends.tobytes()))

    def __repr__(self) -> str:
        return f"MultiGraph(n_vertices={self._n}, n_edges={self.n_edges})"


@dataclass(frozen=True)
class RootedGraph:
    graph: MultiGraph
    root: int

    def __post_init__(self):
        if not 0 <= self.root < self.graph.n_vertices:
            raise GraphError(f"root {self.root} not a vertex")


@dataclass(frozen=True)
class Ball:
    """Induced ball; ``vertex_ids``/``edge_ids`` map back to the parent graph
    and ``dist[i]`` is the distance of local vertex ``i`` from the centre."""

    graph: MultiGraph
    vertex_ids: list[int]
    edge_ids: list[int]
    dist: np.ndarray
    center: int  # local id

    def rooted(self) -> RootedGraph:
        return RootedGraph(self.graph, self.center)


def _check_vertex(g: MultiGraph, x: int) -> None:
    if not 0 <= x < g.n_vertices:
        raise GraphError(f"unknown vertex {x}")


def ball(g: MultiGraph, x: int, r: int) -> Ball:
    _check_vertex(g, x)
    if r < 0:
        raise GraphError("radius must be nonnegative")
    dist = g.distances_from(x, r)
    inside = np.flatnonzero(dist >= 0)
    sub, vids, eids = g.induced_subgraph(inside.tolist())
    return Ball(sub, vids, eids, dist[inside], vids.index(x))


def r_closure(g: MultiGraph, R: int) -> MultiGraph:
    """Simple graph on V(g) joining vertices at distance 1..R."""
    if R < 1:
        raise GraphError("closure radius must be positive")
    indptr, indices, _ = g.csr
    pairs = []
    for u in range(g.n_vertices):
        dist = kernels.bfs_distances(indptr, indices, u, R)
        for v in np.flatnonzero(dist > 0):
            if v > u:
                pairs.append((u, int(v)))
    return MultiGraph(g.n_vertices, pairs)


@dataclass(frozen=True)
class BlockCut:
    blocks: list[tuple[int, ...]]          # edge ids per block, sorted
    block_vertices: list[tuple[int, ...]]  # vertex ids per block, sorted
    cutvertices: frozenset[int]

    def blocks_at(self, v: int) -> list[int]:
        return [i for i, vs in enumerate(self.block_vertices) if v in vs]


def blocks_and_cutvertices(g: MultiGraph) -> BlockCut:
    """Block-cut decomposition by the edge-stack lowpoint DFS.

    Parallel edges are handled by skipping only the tree edge itself (not all
    edges to the parent), so a bundle forms a 2-connected block.
    """
    if not g.is_connected():
        raise GraphError("graph is disconnected")
    n = g.n_vertices
    if g.n_edges == 0:
        return BlockCut([], [], frozenset())
    disc = [-1] * n
    low = [0] * n
    blocks: list[tuple[int, ...]] = []
    cut: set[int] = set()
    edge_stack: list[int] = []
    timer = 0
    root = 0
    disc[root] = 0
    # frames: (vertex, parent edge, iterator over darts)
    stack = [(root, -1, iter(g.darts_at(root)))]
    root_children = 0
    while stack:
        v, pe, it = stack[-1]
        advanced = False
        for d in it:
            e = d >> 1
            if e == pe:
                continue
            w = g.dart_vertex(d ^ 1)
            if disc[w] < 0:
                timer += 1
                disc[w] = low[w] = timer
                edge_stack.append(e)
                stack.append((w, e, iter(g.darts_at(w))))
                if v == root:
                    root_children += 1
                advanced = True
                break
            if disc[w] < disc[v]:
                edge_stack.append(e)
                low[v] = min(low[v], disc[w])
        if advanced:
            continue
        stack.pop()
        if stack:
            p = stack[-1][0]
            low[p] = min(low[p], low[v])
            if low[v] >= disc[p]:
                if p != root:
                    cut.add(p)
                comp = []
                while True:
                    e = edge_stack.pop()
                    comp.append(e)
                    if e == pe:
                        break
                blocks.append(tuple(sorted(comp)))
    if root_children > 1:
        cut.add(root)
    blocks.sort()
    bverts = [tuple(sorted({x for e in b for x in g.endpoints(e)})) for b in blocks]
    return BlockCut(blocks, bverts, frozenset(cut))


def is_k_connected(g: MultiGraph, k: int) -> bool:
    """k-connectivity of the simplification (k in 1, 2, 3)."""
    if k not in (1, 2, 3):
        raise GraphError("k must be 1, 2 or 3")
    s, _ = g.simplify()
    if s.n_vertices < k + 1 or not s.is_connected():
        return False
    if k == 1:
        return True
    indptr, indices, _ = s.csr
    if kernels.articulation_point(indptr, indices, -1) != -1:
        return False
    if k == 2:
        return True
    u, v = kernels.separation_pair(indptr, indices)
    return u < 0


# -- text format -----------------------------------------------------------

def graph_to_text(g: MultiGraph) -> str:
    lines = [f"graph {g.n_vertices}"]
    lines += [f"e {e} {u} {v}" for e, (u, v) in enumerate(map(g.endpoints, g.edges()))]
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> MultiGraph:
    n = None
    edges: dict[int, tuple[int, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "graph" and len(parts) == 2:
                if n is not None:
                    raise GraphError("duplicate header")
                n = int(parts[1])
            elif parts[0] == "e" and len(parts) == 4:
                if n is None:
                    raise GraphError("edge before header")
                e, u, v = map(int, parts[1:])
                if e in edges:
                    raise GraphError(f"duplicate edge id {e}")
                edges[e] = (u, v)
            else:
                raise GraphError(f"unrecognised line: {raw!r}")
        except ValueError as exc:
            raise GraphError(f"line {lineno}: {exc}") from None
    if n is None:
        raise GraphError("missing 'graph <n>' header")
    if sorted(edges) != list(range(len(edges))):
        raise GraphError("edge ids must be 0..m-1")
    return MultiGraph(n, [edges[e] for e in range(len(edges))])


def read_graph(path) -> MultiGraph:
    with open(path) as fh:
        return graph_from_text(fh.read())


def write_graph(g: MultiGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(graph_to_text(g))
