"""Small named graphs and random families used by the tests and the CLI."""

from __future__ import annotations

from itertools import combinations

import networkx as nx
import numpy as np
from scipy.spatial import Delaunay

from .multigraph import MultiGraph


def from_networkx(G) -> MultiGraph:
    """Relabel nodes 0..n-1 in sorted order; parallel edges survive."""
    nodes = sorted(G.nodes())
    idx = {v: i for i, v in enumerate(nodes)}
    return MultiGraph(len(nodes), [(idx[u], idx[v]) for u, v in G.edges()])


def complete_graph(n: int) -> MultiGraph:
    return MultiGraph(n, list(combinations(range(n), 2)))


def complete_bipartite(a: int, b: int) -> MultiGraph:
    return MultiGraph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def cycle_graph(n: int) -> MultiGraph:
    if n == 2:
        return MultiGraph(2, [(0, 1), (0, 1)])
    return MultiGraph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> MultiGraph:
    return MultiGraph(n, [(i, i + 1) for i in range(n - 1)])


def wheel(n: int) -> MultiGraph:
    """Hub 0 joined to a rim cycle 1..n-1 (n vertices in total)."""
    rim = n - 1
    return MultiGraph(n, [(0, i) for i in range(1, n)]
                      + [(i, i % rim + 1) for i in range(1, n)])


def prism() -> MultiGraph:
    return MultiGraph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)])


def octahedron() -> MultiGraph:
    return MultiGraph(6, [(u, v) for u, v in combinations(range(6), 2) if v - u != 3])


def cube() -> MultiGraph:
    return MultiGraph(8, [(u, u ^ (1 << b)) for u in range(8) for b in range(3) if u < u ^ (1 << b)])


def icosahedron() -> MultiGraph:
    return from_networkx(nx.icosahedral_graph())


def dodecahedron() -> MultiGraph:
    return from_networkx(nx.dodecahedral_graph())


def theta(k: int = 3, length: int = 2) -> MultiGraph:
    """Two poles joined by ``k`` internally disjoint paths of ``length`` edges."""
    edges = []
    n = 2
    for _ in range(k):
        prev = 0
        for _ in range(length - 1):
            edges.append((prev, n))
            prev = n
            n += 1
        edges.append((prev, 1))
    return MultiGraph(n, edges)


def bowtie() -> MultiGraph:
    return MultiGraph(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])


def two_triangles() -> MultiGraph:
    """Two triangles sharing the edge 0-1."""
    return MultiGraph(4, [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3)])


def grid_window(a: int, b: int) -> MultiGraph:
    idx = lambda i, j: i * b + j
    edges = [(idx(i, j), idx(i, j + 1)) for i in range(a) for j in range(b - 1)]
    edges += [(idx(i, j), idx(i + 1, j)) for i in range(a - 1) for j in range(b)]
    return MultiGraph(a * b, edges)


def triangular_torus(n: int) -> MultiGraph:
    """n x n torus triangulated by one diagonal per square; 6-regular for n >= 3."""
    idx = lambda i, j: (i % n) * n + (j % n)
    edges = set()
    for i in range(n):
        for j in range(n):
            for a, b in ((0, 1), (1, 0), (1, 1)):
                u, v = idx(i, j), idx(i + a, j + b)
                edges.add((min(u, v), max(u, v)))
    return MultiGraph(n * n, sorted(edges))


def stacked_triangulation(n: int, rng_seed) -> MultiGraph:
    """Random stacked triangulation: start from a triangle and insert each new
    vertex into a uniformly chosen inner face."""
    if n < 4:
        raise ValueError("need at least 4 vertices")
    rng = np.random.default_rng(rng_seed)
    edges = [(0, 1), (1, 2), (0, 2)]
    faces = [(0, 1, 2)]
    # the outer face stays (0, 1, 2); the first insertion creates three inner faces
    for v in range(3, n):
        a, b, c = faces.pop(int(rng.integers(len(faces))))
        edges += [(a, v), (b, v), (c, v)]
        faces += [(a, b, v), (b, c, v), (a, c, v)]
    return MultiGraph(n, edges)


def delaunay_window(n: int, rng_seed) -> MultiGraph:
    """Delaunay triangulation of ``n`` uniform points in the unit square."""
    rng = np.random.default_rng(rng_seed)
    tri = Delaunay(rng.random((n, 2)))
    edges = set()
    for s in tri.simplices:
        for u, v in combinations(sorted(int(x) for x in s), 2):
            edges.add((u, v))
    return MultiGraph(n, sorted(edges))


def _planar(n, edges) -> bool:
    G = nx.Graph()
    G.add_nodes_from(range(n))
    G.add_edges_from(edges)
    return nx.check_planarity(G)[0]


def random_2connected_planar(rng_seed, max_edges: int = 12, min_edges: int = 3) -> MultiGraph:
    """Random 2-connected planar multigraph built from a cycle by ears and
    parallel copies, rejecting steps that break planarity."""
    rng = np.random.default_rng(rng_seed)
    target = int(rng.integers(max(min_edges, 3), max_edges + 1))
    k = int(rng.integers(2, min(5, target) + 1))
    n = k
    edges = [(i, (i + 1) % k) for i in range(k)] if k > 2 else [(0, 1), (0, 1)]
    tries = 0
    while len(edges) < target and tries < 200:
        tries += 1
        room = target - len(edges)
        if rng.random() < 0.25:
            u, v = edges[int(rng.integers(len(edges)))]
            edges.append((u, v))
            continue
        u, v = (int(x) for x in rng.choice(n, size=2, replace=False))
        inner = int(rng.integers(0, min(2, room - 1) + 1))
        path = [u] + list(range(n, n + inner)) + [v]
        new = list(zip(path, path[1:]))
        if _planar(n + inner, edges + new):
            edges += new
            n += inner
    return MultiGraph(n, edges)


def random_connected_planar(rng_seed, n: int = 12, extra: int = 6) -> MultiGraph:
    """Random tree on ``n`` vertices plus up to ``extra`` planar-preserving
    edges (parallel edges allowed)."""
    rng = np.random.default_rng(rng_seed)
    edges = [(int(rng.integers(v)), v) for v in range(1, n)]
    for _ in range(extra):
        u, v = (int(x) for x in rng.choice(n, size=2, replace=False))
        if _planar(n, edges + [(u, v)]):
            edges.append((u, v))
    return MultiGraph(n, edges)


NAMED = {
    "K4": lambda: complete_graph(4),
    "K5": lambda: complete_graph(5),
    "K33": lambda: complete_bipartite(3, 3),
    "prism": prism,
    "octahedron": octahedron,
    "cube": cube,
    "W5": lambda: wheel(5),
    "W6": lambda: wheel(6),
    "icosahedron": icosahedron,
    "dodecahedron": dodecahedron,
    "theta3": lambda: theta(3, 2),
    "bowtie": bowtie,
    "two-triangles": two_triangles,
    "C5": lambda: cycle_graph(5),
}
