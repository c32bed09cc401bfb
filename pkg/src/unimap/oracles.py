"""Local-access oracles for infinite (and finite) graphs.

An oracle answers neighbour queries around an origin and hands out iid
uniform labels derived from a seed. Vertex ids are hashable and mutually
comparable within one oracle; an edge id is the sorted pair of its endpoints
(all shipped infinite graphs are simple).
"""

from __future__ import annotations

import hashlib
import struct
from functools import lru_cache

import numpy as np

from .multigraph import MultiGraph


class HorizonExhausted(RuntimeError):
    """A query reached past the oracle's exploration horizon."""


def _hash64(obj) -> int:
    h = hashlib.blake2b(repr(obj).encode(), digest_size=8).digest()
    return struct.unpack("<Q", h)[0]


def vertex_hash(seed, v) -> int:
    return _hash64((int(seed), v))


def label_array(hashes, salt) -> np.ndarray:
    """Uniform [0, 1) labels from per-vertex hashes and a round salt.

    The salt hash is xored in and the result goes through the splitmix64
    finaliser, so every (seed, salt, vertex) triple gets its own label.
    """
    z = np.asarray(hashes, dtype=np.uint64) ^ np.uint64(_hash64(salt))
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53


def uniform_label(seed, salt, v) -> float:
    return float(label_array(np.array([vertex_hash(seed, v)], dtype=np.uint64), salt)[0])


class GraphOracle:
    """Base class; subclasses implement ``_neighbors`` and ``distance``."""

    name = "oracle"
    exponential_growth = False

    def __init__(self, seed: int = 0, horizon: int = 64):
        self.seed = int(seed)
        self.horizon = int(horizon)
        self._adj = {}

    @property
    def origin(self):
        raise NotImplementedError

    def _neighbors(self, v) -> list:
        raise NotImplementedError

    def distance(self, x, y) -> int:
        raise NotImplementedError

    def neighbors(self, v) -> list[tuple[tuple, object]]:
        """``(edge_id, neighbour)`` pairs, sorted."""
        got = self._adj.get(v)
        if got is None:
            if self.distance(self.origin, v) > self.horizon:
                raise HorizonExhausted(f"{self.name}: vertex {v!r} beyond horizon {self.horizon}")
            got = sorted(((min(v, w), max(v, w)), w) for w in self._neighbors(v))
            self._adj[v] = got
        return got

    def label(self, v, salt=0) -> float:
        return uniform_label(self.seed, salt, v)

    def escape_radius(self, R: int) -> int:
        """Default distance at which a component counts as infinite."""
        if self.exponential_growth:
            return R + 4
        return max(4 * R, 16)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(seed={self.seed}, horizon={self.horizon})"


class PathOracle(GraphOracle):
    """Bi-infinite path on the integers."""

    name = "path"

    @property
    def origin(self):
        return 0

    def _neighbors(self, v):
        return [v - 1, v + 1]

    def distance(self, x, y):
        return abs(x - y)


class LadderOracle(GraphOracle):
    """Z x K2: vertices ``(i, side)``."""

    name = "ladder"

    @property
    def origin(self):
        return (0, 0)

    def _neighbors(self, v):
        i, s = v
        return [(i - 1, s), (i + 1, s), (i, 1 - s)]

    def distance(self, x, y):
        return abs(x[0] - y[0]) + (x[1] != y[1])


class GridOracle(GraphOracle):
    """Square lattice Z^2 (one-ended)."""

    name = "grid"

    @property
    def origin(self):
        return (0, 0)

    def _neighbors(self, v):
        i, j = v
        return [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)]

    def distance(self, x, y):
        return abs(x[0] - y[0]) + abs(x[1] - y[1])


class TriangularHalfPlaneOracle(GraphOracle):
    """Triangular lattice in axial coordinates ``(q, r)`` restricted to r >= 0."""

    name = "tri-halfplane"
    _steps = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))

    @property
    def origin(self):
        return (0, 0)

    def _neighbors(self, v):
        q, r = v
        return [(q + a, r + b) for a, b in self._steps if r + b >= 0]

    def distance(self, x, y):
        dq, dr = y[0] - x[0], y[1] - x[1]
        return (abs(dq) + abs(dr) + abs(dq + dr)) // 2


def _lcp(a, b) -> int:
    n = 0
    for s, t in zip(a, b):
        if s != t:
            break
        n += 1
    return n


class RegularTreeOracle(GraphOracle):
    """3-regular tree; a vertex is its child-index path from the root."""

    name = "tree3"
    exponential_growth = True

    @property
    def origin(self):
        return ()

    def _neighbors(self, v):
        out = [v + (c,) for c in (range(3) if not v else range(2))]
        if v:
            out.append(v[:-1])
        return out

    def distance(self, x, y):
        k = _lcp(x, y)
        return len(x) + len(y) - 2 * k


class TreeTimesEdgeOracle(RegularTreeOracle):
    """3-regular tree times a single edge: vertices ``(path, side)``."""

    name = "tree-x-edge"

    @property
    def origin(self):
        return ((), 0)

    def _neighbors(self, v):
        w, s = v
        return [(u, s) for u in RegularTreeOracle._neighbors(self, w)] + [(w, 1 - s)]

    def distance(self, x, y):
        return RegularTreeOracle.distance(self, x[0], y[0]) + (x[1] != y[1])


class FreeProductTrianglesOracle(GraphOracle):
    """Cayley graph of Z3 * Z3 with generators a, a^2, b, b^2: a tree of triangles.

    A vertex is a reduced word, a tuple of syllables ``(letter, exponent)``
    with alternating letters and exponents in {1, 2}.
    """

    name = "freeprod-triangle"
    exponential_growth = True

    @property
    def origin(self):
        return ()

    def _neighbors(self, v):
        out = []
        for letter in ("a", "b"):
            for k in (1, 2):
                if v and v[-1][0] == letter:
                    e = (v[-1][1] + k) % 3
                    out.append(v[:-1] + ((letter, e),) if e else v[:-1])
                else:
                    out.append(v + ((letter, k),))
        return out

    def distance(self, x, y):
        k = _lcp(x, y)
        rx, ry = x[k:], y[k:]
        if rx and ry and rx[0][0] == ry[0][0]:
            return len(rx) + len(ry) - 1
        return len(rx) + len(ry)


class FiniteGraphOracle(GraphOracle):
    """Oracle view of a finite :class:`MultiGraph` (simple graphs only)."""

    name = "finite"

    def __init__(self, g: MultiGraph, origin: int = 0, seed: int = 0):
        super().__init__(seed, horizon=max(g.n_vertices, 1))
        if not g.is_simple():
            raise ValueError("oracle edge ids need a simple graph")
        self.g = g
        self._origin = origin

    @property
    def origin(self):
        return self._origin

    def _neighbors(self, v):
        return self.g.neighbors(v)

    def distance(self, x, y):
        d = self._dist_from(x)[y]
        return int(d) if d >= 0 else 10**9

    @lru_cache(maxsize=None)
    def _dist_from(self, x):
        return self.g.distances_from(x)


ORACLES = {
    cls.name: cls for cls in (
        PathOracle, LadderOracle, GridOracle, TriangularHalfPlaneOracle,
        RegularTreeOracle, TreeTimesEdgeOracle, FreeProductTrianglesOracle)
}


def make_oracle(name: str, seed: int = 0, horizon: int = 64) -> GraphOracle:
    try:
        cls = ORACLES[name]
    except KeyError:
        raise KeyError(f"unknown oracle {name!r}; choose from {sorted(ORACLES)}") from None
    return cls(seed=seed, horizon=horizon)


def window_graph(oracle: GraphOracle, radius: int, center=None):
    """Finite induced ball of the oracle graph as a :class:`MultiGraph`.

    Returns ``(graph, vertices)`` with ``vertices[i]`` the oracle id of local
    vertex ``i`` (BFS order, centre first).
    """
    center = oracle.origin if center is None else center
    order = [center]
    dist = {center: 0}
    head = 0
    while head < len(order):
        v = order[head]
        head += 1
        if dist[v] == radius:
            continue
        for _, w in oracle.neighbors(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                order.append(w)
    local = {v: i for i, v in enumerate(order)}
    edges = sorted({(min(local[v], local[w]), max(local[v], local[w]))
                    for v in order for _, w in oracle.neighbors(v) if w in local}) \
        if radius > 0 else []
    return MultiGraph(len(order), edges), order


def random_walk_roots(oracle: GraphOracle, n: int, max_len: int, rng) -> list:
    """Endpoints of lazy random walks from the origin (root sampling proxy)."""
    roots = []
    for _ in range(n):
        v = oracle.origin
        for _ in range(int(rng.integers(0, max_len + 1))):
            nb = oracle.neighbors(v)
            v = nb[int(rng.integers(len(nb)))][1]
        roots.append(v)
    return roots


