"""Planar rotation systems assembled from 3-block embeddings.

Each 3-block gets its own planar rotation (uniform chirality for 3-connected
blocks, uniform cyclic order for multilinks), the rotations are glued along
tree links, and blocks meeting at a cutvertex are interleaved by
:func:`sigma_v`. Randomness flows from one root seed; per-block and
per-cutvertex seeds are hashed from stable ids.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .blocktree import (CYCLE, MULTILINK, THREE_CONNECTED, AmalgamSpec, Amalgam,
                        ThreeBlockTree, check_tree, decompose_3blocks, edge_amalgam)
from .multigraph import GraphError, MultiGraph, blocks_and_cutvertices
from .planar3 import planar_embed, uniform_planar_embedding
from .rotation import RotationSystem, genus


class NonPlanarError(GraphError):
    def __init__(self, witness):
        super().__init__(f"graph is not planar; obstruction edges {witness}")
        self.witness = witness


def subseed(seed, *keys) -> int:
    h = hashlib.blake2b(repr((int(seed),) + keys).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def merge_embeddings(A: MultiGraph, piA: RotationSystem, B: MultiGraph, piB: RotationSystem,
                     f: AmalgamSpec, check: bool = True) -> tuple[RotationSystem, Amalgam]:
    """Rotation on the edge amalgam of two planar rotations.

    At each glued vertex the rotation of A read after ``f_a`` is followed by
    the rotation of B read after ``f_b``; all other vertices keep theirs.
    """
    if check and (genus(piA) != 0 or genus(piB) != 0):
        raise GraphError("merge_embeddings needs planar inputs")
    am = edge_amalgam(A, B, f)
    G = am.graph

    def lift(d, edge_map):
        return 2 * edge_map[d >> 1] + (d & 1)

    def after(rs, v, dart):
        order = rs.order_at(v)
        i = order.index(dart)
        return order[i + 1:] + order[:i]

    orders = {}
    for x in range(A.n_vertices):
        if x not in (f.a_tail, f.a_head) and A.degree(x):
            orders[am.a_vertices[x]] = [lift(d, am.a_edges) for d in piA.order_at(x)]
    for x in range(B.n_vertices):
        if x not in (f.b_tail, f.b_head) and B.degree(x):
            orders[am.b_vertices[x]] = [lift(d, am.b_edges) for d in piB.order_at(x)]
    for xa, xb in ((f.a_tail, f.b_tail), (f.a_head, f.b_head)):
        seq = [lift(d, am.a_edges) for d in after(piA, xa, A.dart_at(f.f_a, xa))]
        seq += [lift(d, am.b_edges) for d in after(piB, xb, B.dart_at(f.f_b, xb))]
        if seq:
            orders[am.a_vertices[xa]] = seq
    return RotationSystem.from_orders(G, orders), am


def block_rotation(kind: str, g: MultiGraph, seed, chirality: str = "coin") -> RotationSystem:
    """Planar rotation of a single 3-block, drawn per the block's kind."""
    rng = np.random.default_rng(seed)
    if kind == CYCLE:
        return RotationSystem.from_orders(g, {v: g.darts_at(v) for v in g.vertices()})
    if kind == MULTILINK:
        perm = rng.permutation(g.n_edges).tolist()
        return RotationSystem.from_orders(g, {0: [g.dart_at(e, 0) for e in perm],
                                              1: [g.dart_at(e, 1) for e in reversed(perm)]})
    if kind == THREE_CONNECTED:
        return uniform_planar_embedding(g, int(rng.integers(0, 2**63)), chirality)
    raise GraphError(f"unknown block kind {kind!r}")


def block_seed(seed, T: ThreeBlockTree, alpha: int) -> int:
    b = T.blocks[alpha]
    return subseed(seed, "block", b.kind, tuple(sorted(b.real_edges())), b.vertex_ids)


def choose_block_rotations(T: ThreeBlockTree, rng_seed, chirality: str = "coin") -> list[RotationSystem]:
    return [block_rotation(b.kind, b.graph, block_seed(rng_seed, T, i), chirality)
            for i, b in enumerate(T.blocks)]


@dataclass
class EmbeddedBlockTree:
    T: ThreeBlockTree
    pi: list[RotationSystem]

    def __post_init__(self):
        for i, (b, rs) in enumerate(zip(self.T.blocks, self.pi)):
            if rs.graph != b.graph or genus(rs) != 0:
                raise GraphError(f"block {i} rotation is not a planar rotation of the block")


def bfs_link_order(T: ThreeBlockTree) -> list[int]:
    """Tree links in BFS order from block 0."""
    incident = {i: [] for i in range(len(T.blocks))}
    for li, lk in enumerate(T.links):
        incident[lk.alpha].append(li)
        incident[lk.beta].append(li)
    seen = {0}
    order = []
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for li in incident[a]:
            lk = T.links[li]
            b = lk.beta if lk.alpha == a else lk.alpha
            if b not in seen:
                seen.add(b)
                order.append(li)
                queue.append(b)
    return order


def fold_embeddings(E: EmbeddedBlockTree, order: Sequence[int] | None = None,
                    target: MultiGraph | None = None) -> RotationSystem:
    """Merge block rotations along the tree links in ``order``.

    The result is expressed on ``target`` (default: the reconstruction with
    original vertex ids), whose edge ``e`` must be real edge ``e``.
    """
    T = E.T
    check_tree(T)
    order = bfs_link_order(T) if order is None else list(order)
    cluster = list(range(len(T.blocks)))
    state = {i: (b.graph, E.pi[i]) for i, b in enumerate(T.blocks)}
    vmap = [list(range(b.graph.n_vertices)) for b in T.blocks]
    emap = [list(range(b.graph.n_edges)) for b in T.blocks]
    for li in order:
        lk = T.links[li]
        ca, cb = cluster[lk.alpha], cluster[lk.beta]
        s = lk.spec
        spec = AmalgamSpec(emap[lk.alpha][s.f_a], vmap[lk.alpha][s.a_tail], vmap[lk.alpha][s.a_head],
                           emap[lk.beta][s.f_b], vmap[lk.beta][s.b_tail], vmap[lk.beta][s.b_head])
        (GA, piA), (GB, piB) = state[ca], state[cb]
        rs, am = merge_embeddings(GA, piA, GB, piB, spec, check=False)
        for i in range(len(T.blocks)):
            if cluster[i] == ca:
                vmap[i] = [am.a_vertices[x] for x in vmap[i]]
                emap[i] = [am.a_edges[x] if x >= 0 else -1 for x in emap[i]]
            elif cluster[i] == cb:
                vmap[i] = [am.b_vertices[x] for x in vmap[i]]
                emap[i] = [am.b_edges[x] if x >= 0 else -1 for x in emap[i]]
                cluster[i] = ca
        state[ca] = (am.graph, rs)
        del state[cb]
    ((G, rs),) = state.values()

    name = [None] * G.n_vertices
    real = [None] * G.n_edges
    for i, b in enumerate(T.blocks):
        for lv, x in enumerate(vmap[i]):
            name[x] = b.vertex_ids[lv]
        for le, x in enumerate(emap[i]):
            if x >= 0:
                real[x] = b.edge_ids[le]
    if target is None:
        ends = [None] * T.n_real
        for x in range(G.n_edges):
            u, v = G.endpoints(x)
            ends[real[x]] = (name[u], name[v])
        target = MultiGraph(T.n_vertices, ends)
    orders = {}
    for y in range(G.n_vertices):
        if G.degree(y):
            orders[name[y]] = [target.dart_at(real[d >> 1], name[y]) for d in rs.order_at(y)]
    return RotationSystem.from_orders(target, orders)


def embed_block_tree(T: ThreeBlockTree, rng_seed, chirality: str = "coin",
                     order: Sequence[int] | None = None,
                     target: MultiGraph | None = None) -> RotationSystem:
    """Planar rotation of Gamma(T) from randomly embedded 3-blocks."""
    E = EmbeddedBlockTree(T, choose_block_rotations(T, rng_seed, chirality))
    return fold_embeddings(E, order, target)


def sigma_v(blocks_at_v: Sequence[Sequence[int]], rng_seed) -> list[int]:
    """Interleave the cyclic orders of several blocks at a cutvertex.

    Each block's darts stay contiguous, read cyclically from a uniform start;
    block 0 comes first and the others follow in uniformly random order.
    """
    if not blocks_at_v:
        raise GraphError("sigma_v needs at least one block")
    rng = np.random.default_rng(rng_seed)
    k = len(blocks_at_v)
    listings = []
    for seq in blocks_at_v:
        seq = list(seq)
        s = int(rng.integers(len(seq)))
        listings.append(seq[s:] + seq[:s])
    follow = (rng.permutation(k - 1) + 1).tolist() if k > 1 else []
    out = list(listings[0])
    for i in follow:
        out.extend(listings[i])
    return out


def embed_graph(g: MultiGraph, rng_seed, chirality: str = "coin") -> RotationSystem:
    """Planar rotation system of a connected planar multigraph.

    Bridges and 2-edge bundles are embedded directly; every other block goes
    through its 3-block tree. Cutvertices are resolved with :func:`sigma_v`.
    Raises :class:`NonPlanarError` carrying a Kuratowski witness.
    """
    if g.n_vertices == 0 or not g.is_connected():
        raise GraphError("graph must be connected and nonempty")
    res = planar_embed(g)
    if not res.planar:
        raise NonPlanarError(res.witness)
    if g.n_edges == 0:
        return RotationSystem(g, [])
    bc = blocks_and_cutvertices(g)
    per_vertex: dict[int, list[list[int]]] = {v: [] for v in g.vertices()}
    for bi, bedges in enumerate(bc.blocks):
        sub, vids, eids = g.edge_subgraph(bedges)
        if sub.n_edges >= 3:
            T = decompose_3blocks(sub)
            seed = subseed(rng_seed, "2block", tuple(eids))
            rs = embed_block_tree(T, seed, chirality, target=sub)
            orders = [rs.order_at(v) for v in sub.vertices()]
        else:
            orders = [sub.darts_at(v) for v in sub.vertices()]
        for lv, darts in enumerate(orders):
            per_vertex[vids[lv]].append([g.dart_at(eids[d >> 1], vids[lv]) for d in darts])
    final = {}
    for v, lists in per_vertex.items():
        if not lists:
            continue
        if len(lists) == 1:
            final[v] = lists[0]
        else:
            final[v] = sigma_v(lists, subseed(rng_seed, "cut", v))
    return RotationSystem.from_orders(g, final)
