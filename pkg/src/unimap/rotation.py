"""Rotation systems: per-vertex cyclic orders of darts.

A rotation is stored as a successor array ``succ`` indexed by dart id:
``succ[d]`` is the dart following ``d`` clockwise around its vertex.

Faces are the orbits of ``d -> succ[twin(d)]``: leave along ``d``, arrive at
the far end on ``twin(d)`` and continue with the dart after it. This is the
only tracing convention used anywhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from math import factorial
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .multigraph import GraphError, MultiGraph


class RotationError(ValueError):
    pass


class RotationSystem:
    def __init__(self, graph: MultiGraph, succ: Sequence[int]):
        succ = np.asarray(succ, dtype=np.int64).copy()
        if succ.shape != (graph.n_darts,):
            raise RotationError("successor array has wrong length")
        if succ.size and (succ.min() < 0 or succ.max() >= succ.size):
            raise RotationError("successor out of dart range")
        for v in graph.vertices():
            darts = graph.darts_at(v)
            if darts and sorted(self._orbit(succ, darts[0])) != list(darts):
                raise RotationError(f"rotation at {v} is not a single cycle over its darts")
        succ.setflags(write=False)
        self.graph = graph
        self.succ = succ

    @staticmethod
    def _orbit(succ, d0):
        out = [int(d0)]
        d = succ[d0]
        while d != d0 and len(out) <= succ.shape[0]:
            out.append(int(d))
            d = succ[d]
        return out

    @classmethod
    def from_orders(cls, graph: MultiGraph,
                    orders: Mapping[int, Sequence[int]] | Sequence[Sequence[int]]) -> RotationSystem:
        """Build from cyclic dart lists, one per vertex."""
        succ = np.arange(graph.n_darts)
        items = orders.items() if isinstance(orders, Mapping) else enumerate(orders)
        covered = set()
        for v, cyc in items:
            cyc = [int(d) for d in cyc]
            if sorted(cyc) != list(graph.darts_at(v)):
                raise RotationError(f"order at vertex {v} does not list exactly its darts")
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                succ[a] = b
            covered.add(v)
        missing = [v for v in graph.vertices() if graph.degree(v) and v not in covered]
        if missing:
            raise RotationError(f"no order given for vertex {missing[0]}")
        return cls(graph, succ)

    @classmethod
    def from_neighbor_orders(cls, graph: MultiGraph,
                             orders: Mapping[int, Sequence[int]]) -> RotationSystem:
        """Build from cyclic neighbour orders; each bundle is laid out
        consecutively, in increasing edge id at the smaller endpoint and in
        decreasing edge id at the larger one."""
        dart_orders = {}
        for v, nbrs in orders.items():
            seq = []
            for w in nbrs:
                bundle = graph.bundles[(min(v, w), max(v, w))]
                if v > w:
                    bundle = bundle[::-1]
                seq.extend(graph.dart_at(e, v) for e in bundle)
            dart_orders[v] = seq
        return cls.from_orders(graph, dart_orders)

    # -- queries ---------------------------------------------------------

    def order_at(self, v: int) -> tuple[int, ...]:
        """Cyclic order at ``v`` starting from its smallest dart."""
        darts = self.graph.darts_at(v)
        if not darts:
            return ()
        return tuple(self._orbit(self.succ, darts[0]))

    def neighbor_order_at(self, v: int) -> tuple[int, ...]:
        return tuple(self.graph.dart_vertex(d ^ 1) for d in self.order_at(v))

    def pred(self) -> np.ndarray:
        p = np.empty_like(self.succ)
        p[self.succ] = np.arange(self.succ.shape[0])
        return p

    def face_permutation(self) -> np.ndarray:
        return self.succ[np.arange(self.succ.shape[0]) ^ 1]

    def restricted(self, v: int, darts) -> tuple[int, ...]:
        """Cyclic order at ``v`` restricted to ``darts``."""
        keep = set(darts)
        return tuple(d for d in self.order_at(v) if d in keep)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, RotationSystem) and self.graph == other.graph
                and np.array_equal(self.succ, other.succ))

    def __hash__(self) -> int:
        return hash(self.succ.tobytes())

    def __repr__(self) -> str:
        return f"RotationSystem({self.graph!r})"


@dataclass(frozen=True)
class FaceSet:
    faces: list[tuple[int, ...]]

    def __len__(self) -> int:
        return len(self.faces)

    def lengths(self) -> list[int]:
        return [len(f) for f in self.faces]


def trace_faces(rs: RotationSystem) -> FaceSet:
    """Partition the darts into closed face walks.

    Each face lists its darts in traversal order starting from its smallest
    dart; faces are sorted by that dart.
    """
    phi = rs.face_permutation()
    seen = np.zeros(phi.shape[0], dtype=bool)
    faces = []
    for start in range(phi.shape[0]):
        if seen[start]:
            continue
        walk = []
        d = start
        while not seen[d]:
            seen[d] = True
            walk.append(int(d))
            d = phi[d]
        if d != start:
            raise RotationError("face walk failed to close")
        faces.append(tuple(walk))
    return FaceSet(faces)


def n_faces(rs: RotationSystem) -> int:
    if rs.graph.n_edges == 0:
        return 1
    return int(kernels.count_face_orbits(rs.succ))


def genus(rs: RotationSystem) -> int:
    g = rs.graph
    if g.n_vertices == 0 or not g.is_connected():
        raise GraphError("genus needs a connected nonempty graph")
    chi = g.n_vertices - g.n_edges + n_faces(rs)
    twice = 2 - chi
    if twice < 0 or twice % 2:
        raise RotationError(f"impossible Euler characteristic {chi}")
    return twice // 2


def is_planar_rotation(rs: RotationSystem) -> bool:
    return genus(rs) == 0


def invert(rs: RotationSystem) -> RotationSystem:
    return RotationSystem(rs.graph, rs.pred())


def _cyclic_run(order: Sequence[int], members: set[int]) -> list[int] | None:
    """The members of ``order`` as one cyclic interval, or None."""
    k = len(order)
    pos = [i for i, d in enumerate(order) if d in members]
    if len(pos) == k:
        return list(order)
    starts = [i for i in pos if order[(i - 1) % k] not in members]
    if len(starts) != 1:
        return None
    s = starts[0]
    return [order[(s + j) % k] for j in range(len(pos))]


def randomize_bundles(rs: RotationSystem, rng_seed) -> RotationSystem:
    """Shuffle every parallel bundle by an independent uniform permutation.

    The shuffle relabels the edges of a bundle (the same relabelling at both
    endpoints), so the face structure, and hence the genus, is unchanged.
    """
    g = rs.graph
    rng = np.random.default_rng(rng_seed)
    succ = rs.succ.copy()
    for (u, v), bundle in sorted(g.bundles.items()):
        if len(bundle) < 2:
            continue
        runs = {}
        for x in (u, v):
            darts = {g.dart_at(e, x) for e in bundle}
            run = _cyclic_run(rs.order_at(x), darts)
            if run is None:
                raise RotationError(f"bundle {u}-{v} is not consecutive at {x}")
            runs[x] = run
        run_edges = [d >> 1 for d in runs[u]]
        perm = rng.permutation(len(bundle))
        relabel = {run_edges[i]: run_edges[int(perm[i])] for i in range(len(bundle))}
        for x in (u, v):
            # read the current order: another bundle may already have relabelled x
            order = RotationSystem._orbit(succ, g.darts_at(x)[0])
            new =[g.dart_at(relabel[d >> 1], x) if (d >> 1) in relabel else d for d in order]
            for a, b in zip(new, new[1:] + new[:1]):
                succ[a] = b
    return RotationSystem(g, succ)


# -- exhaustive enumeration ------------------------------------------------

def rotation_tables(g: MultiGraph):
    """Kernel inputs listing every cyclic order at every vertex.

    A vertex of degree k has (k-1)! cyclic orders: its smallest dart first,
    followed by each permutation of the others.
    """
    degs = [g.degree(v) for v in g.vertices()]
    tab, tab_start, n_choices = [], [], []
    for v in g.vertices():
        darts = g.darts_at(v)
        tab_start.append(len(tab))
        if not darts:
            n_choices.append(1)
            continue
        count = 0
        for rest in permutations(darts[1:]):
            tab.extend((darts[0],) + rest)
            count += 1
        n_choices.append(count)
    as_arr = lambda x: np.asarray(x, dtype=np.int64)
    return as_arr(degs), as_arr(tab), as_arr(tab_start), as_arr(n_choices)


def count_rotation_systems(g: MultiGraph) -> int:
    total = 1
    for v in g.vertices():
        total *= factorial(max(g.degree(v) - 1, 0))
    return total


def enumerate_genus(g: MultiGraph, target_genus: int = 0, keep: int = 16):
    """Genus histogram over all rotation systems of a connected graph.

    Returns ``(hist, hits)`` where ``hist[k]`` counts rotation systems of genus
    ``k`` and ``hits`` holds up to ``keep`` systems of ``target_genus``.
    """
    if not g.is_connected():
        raise GraphError("genus enumeration needs a connected graph")
    degs, tab, tab_start, n_choices = rotation_tables(g)
    chi_wo_faces = g.n_vertices - g.n_edges
    target_faces = 2 - 2 * target_genus - chi_wo_faces
    if g.n_edges == 0:
        return {0: 1}, [RotationSystem(g, [])]
    face_hist, choice_rows, n_hits = kernels.enumerate_rotation_faces(
        g.n_darts, tab_start, degs, tab, tab_start, n_choices, target_faces, keep)
    hist = {}
    for f in np.flatnonzero(face_hist):
        hist[(2 - chi_wo_faces - int(f)) // 2] = int(face_hist[f])
    hits = []
    for row in choice_rows[:min(n_hits, keep)]:
        orders = {}
        for v in g.vertices():
            k = int(degs[v])
            if k:
                base = int(tab_start[v]) + int(row[v]) * k
                orders[v] = tab[base:base + k].tolist()
        hits.append(RotationSystem.from_orders(g, orders))
    return dict(sorted(hist.items())), hits


# -- text format -----------------------------------------------------------

def rotation_to_text(rs: RotationSystem) -> str:
    lines = []
    for v in rs.graph.vertices():
        order = rs.order_at(v)
        lines.append(f"r {v}:" + "".join(f" {d}" for d in order))
    return "\n".join(lines) + "\n"


def rotation_from_text(text: str, graph: MultiGraph) -> RotationSystem:
    orders = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(":")
        parts = head.split()
        if len(parts) != 2 or parts[0] != "r":
            raise RotationError(f"unrecognised line: {raw!r}")
        v = int(parts[1])
        if v in orders:
            raise RotationError(f"vertex {v} listed twice")
        orders[v] = [int(d) for d in rest.split()]
    return RotationSystem.from_orders(graph, {v: o for v, o in orders.items() if o})
