"""3-block trees of 2-connected multigraphs and their edge amalgams.

Blocks are stored with local dense ids plus maps to the original graph:
``vertex_ids[i]`` is the original vertex, ``edge_ids[j]`` the global edge id.
Real edges keep their id from the input graph (``< n_real``); virtual edges
get ids ``>= n_real``, one per side of each tree link.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .multigraph import GraphError, MultiGraph, is_k_connected

CYCLE = "cycle"
MULTILINK = "multilink"
THREE_CONNECTED = "three_connected"
KINDS = (CYCLE, MULTILINK, THREE_CONNECTED)


class BlockTreeError(ValueError):
    pass


@dataclass(frozen=True)
class AmalgamSpec:
    """Oriented edge ``f_a`` of A (tail -> head) glued onto ``f_b`` of B."""

    f_a: int
    a_tail: int
    a_head: int
    f_b: int
    b_tail: int
    b_head: int

    def swapped(self) -> AmalgamSpec:
        return AmalgamSpec(self.f_b, self.b_tail, self.b_head, self.f_a, self.a_tail, self.a_head)


@dataclass(frozen=True)
class Amalgam:
    graph: MultiGraph
    a_vertices: list[int]
    b_vertices: list[int]
    a_edges: list[int]  # -1 for the deleted edge
    b_edges: list[int]


def _check_spec_side(g: MultiGraph, f: int, tail: int, head: int, side: str) -> None:
    if not 0 <= f < g.n_edges:
        raise BlockTreeError(f"amalgam edge {f} not in {side}")
    if tail == head or {tail, head} != set(g.endpoints(f)):
        raise BlockTreeError(f"tail/head do not match the endpoints of edge {f} in {side}")


def edge_amalgam(A: MultiGraph, B: MultiGraph, f: AmalgamSpec) -> Amalgam:
    """Glue ``A`` and ``B`` along ``f`` and delete the two glued edges.

    A keeps its vertex ids; B's unmerged vertices follow in order. Edges of A
    (minus ``f_a``) come first, then those of B (minus ``f_b``).
    """
    _check_spec_side(A, f.f_a, f.a_tail, f.a_head, "A")
    _check_spec_side(B, f.f_b, f.b_tail, f.b_head, "B")
    a_vertices = list(range(A.n_vertices))
    b_vertices = []
    nxt = A.n_vertices
    for v in range(B.n_vertices):
        if v == f.b_tail:
            b_vertices.append(f.a_tail)
        elif v == f.b_head:
            b_vertices.append(f.a_head)
        else:
            b_vertices.append(nxt)
            nxt += 1
    edges, a_edges, b_edges = [], [], []
    for e in range(A.n_edges):
        if e == f.f_a:
            a_edges.append(-1)
            continue
        a_edges.append(len(edges))
        edges.append(A.endpoints(e))
    for e in range(B.n_edges):
        if e == f.f_b:
            b_edges.append(-1)
            continue
        u, v = B.endpoints(e)
        b_edges.append(len(edges))
        edges.append((b_vertices[u], b_vertices[v]))
    return Amalgam(MultiGraph(nxt, edges), a_vertices, b_vertices, a_edges, b_edges)


@dataclass(frozen=True)
class Block:
    kind: str
    graph: MultiGraph
    vertex_ids: tuple[int, ...]
    edge_ids: tuple[int, ...]
    virtual: frozenset[int]  # local edge ids

    def real_edges(self) -> list[int]:
        return [self.edge_ids[e] for e in range(self.graph.n_edges) if e not in self.virtual]

    def local_vertex(self, v: int) -> int:
        return self.vertex_ids.index(v)

    def local_edge(self, gid: int) -> int:
        return self.edge_ids.index(gid)


@dataclass(frozen=True)
class TreeLink:
    alpha: int
    beta: int
    spec: AmalgamSpec  # f_a and tails/heads local to alpha, f_b local to beta


@dataclass
class ThreeBlockTree:
    blocks: list[Block]
    links: list[TreeLink]
    n_real: int
    n_vertices: int

    def neighbors(self, alpha: int) -> list[int]:
        out = []
        for lk in self.links:
            if lk.alpha == alpha:
                out.append(lk.beta)
            elif lk.beta == alpha:
                out.append(lk.alpha)
        return sorted(out)

    def kind_counts(self) -> dict[str, int]:
        counts = {k: 0 for k in KINDS}
        for b in self.blocks:
            counts[b.kind] += 1
        return counts

    def n_virtual(self) -> int:
        return sum(len(b.virtual) for b in self.blocks)


# -- decomposition ---------------------------------------------------------

def _piece_graph(piece: dict[int, tuple[int, int]]):
    verts = sorted({x for uv in piece.values() for x in uv})
    local = {v: i for i, v in enumerate(verts)}
    eids = sorted(piece)
    g = MultiGraph(len(verts), [(local[piece[e][0]], local[piece[e][1]]) for e in eids])
    return g, verts, eids


def _is_cycle(g: MultiGraph) -> bool:
    return g.n_vertices >= 3 and bool((g.degrees() == 2).all()) and g.is_connected()


def decompose_3blocks(g: MultiGraph) -> ThreeBlockTree:
    """Split a 2-connected multigraph into its 3-block tree.

    Bundles are split off as multilinks, then separation pairs (found by
    deleting one vertex and scanning for articulation points) split the rest
    until every piece is a cycle, a multilink or 3-connected. Finally adjacent
    cycles and adjacent multilinks are merged back, which yields the unique
    tree. Output ordering is canonical.
    """
    if g.n_edges < 3:
        raise GraphError("need at least 3 edges")
    if g.n_vertices < 2 or not is_k_connected(g, 2) and not (g.n_vertices == 2 and g.is_connected()):
        raise GraphError("graph is not 2-connected")

    m = g.n_edges
    next_virtual = [m]
    links: list[tuple[int, int, int, int]] = []  # (virt_a, virt_b, u, v)

    def new_virtual_pair(u, v):
        a, b = next_virtual[0], next_virtual[0] + 1
        next_virtual[0] += 2
        links.append((a, b, u, v))
        return a, b

    queue = deque([{e: g.endpoints(e) for e in range(m)}])
    done: list[tuple[str, dict[int, tuple[int, int]]]] = []
    while queue:
        piece = queue.popleft()
        verts = {x for uv in piece.values() for x in uv}
        if len(verts) == 2:
            done.append((MULTILINK, piece))
            continue
        groups = defaultdict(list)
        for e, (u, v) in piece.items():
            groups[(min(u, v), max(u, v))].append(e)
        split_bundle = False
        for (u, v), es in sorted(groups.items()):
            if len(es) >= 2:
                a, b = new_virtual_pair(u, v)
                ml = {e: piece.pop(e) for e in es}
                ml[a] = (u, v)
                piece[b] = (u, v)
                done.append((MULTILINK, ml))
                split_bundle = True
        if split_bundle:
            queue.append(piece)
            continue
        pg, pverts, peids = _piece_graph(piece)
        if _is_cycle(pg):
            done.append((CYCLE, piece))
            continue
        indptr, indices, _ = pg.csr
        su, sv = kernels.separation_pair(indptr, indices)
        if su < 0:
            done.append((THREE_CONNECTED, piece))
            continue
        if sv < 0:
            raise GraphError("piece lost 2-connectivity during splitting")
        # the component of pg - {su, sv} holding the smallest other vertex
        start = min(x for x in range(pg.n_vertices) if x not in (su, sv))
        comp = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in pg.neighbors(x):
                if y not in comp and y not in (su, sv):
                    comp.add(y)
                    stack.append(y)
        side = {}
        for j, e in enumerate(peids):
            x, y = pg.endpoints(j)
            if x in comp or y in comp:
                side[e] = piece.pop(e)
        u, v = pverts[su], pverts[sv]
        a, b = new_virtual_pair(u, v)
        side[a] = (u, v)
        piece[b] = (u, v)
        queue.append(side)
        queue.append(piece)

    # merge adjacent pieces of equal kind (cycles, multilinks)
    kinds = [k for k, _ in done]
    pieces = [p for _, p in done]
    owner = {}
    for i, p in enumerate(pieces):
        for e in p:
            owner[e] = i
    alive_links = []
    for a, b, u, v in links:
        pa, pb = owner[a], owner[b]
        if kinds[pa] == kinds[pb] and kinds[pa] in (CYCLE, MULTILINK):
            del pieces[pa][a]
            del pieces[pb][b]
            for e, uv in pieces[pb].items():
                pieces[pa][e] = uv
                owner[e] = pa
            pieces[pb] = None
        else:
            alive_links.append((a, b, u, v))
    final = [(kinds[i], p) for i, p in enumerate(pieces) if p is not None]
    return _canonical_tree(final, alive_links, owner, m, g.n_vertices)


def _canonical_tree(final, links, owner, m, n_vertices) -> ThreeBlockTree:
    def key(item):
        kind, piece = item
        return (kind, tuple(sorted(e for e in piece if e < m)),
                tuple(sorted({x for uv in piece.values() for x in uv})))

    order = sorted(range(len(final)), key=lambda i: key(final[i]))
    pieces = [final[i] for i in order]

    # partner piece of each virtual edge
    partner = {}
    for a, b, u, v in links:
        partner[a] = b
        partner[b] = a
    piece_of = {}
    for j, (_, p) in enumerate(pieces):
        for e in p:
            piece_of[e] = j

    # renumber virtual edges: by block, then endpoint pair, then partner block
    renum = {}
    nxt = m
    for j, (_, p) in enumerate(pieces):
        virt = [e for e in p if e >= m]
        virt.sort(key=lambda e: (tuple(sorted(p[e])), piece_of[partner[e]]))
        for e in virt:
            renum[e] = nxt
            nxt += 1

    blocks = []
    for kind, p in pieces:
        relabelled = {renum.get(e, e): uv for e, uv in p.items()}
        bg, bverts, beids = _piece_graph(relabelled)
        virtual = frozenset(i for i, e in enumerate(beids) if e >= m)
        blocks.append(Block(kind, bg, tuple(bverts), tuple(beids), virtual))

    tree_links = []
    for a, b, u, v in links:
        ia, ib = piece_of[a], piece_of[b]
        ga, gb = renum[a], renum[b]
        if ia > ib:
            ia, ib, ga, gb = ib, ia, gb, ga
        A, B = blocks[ia], blocks[ib]
        spec = AmalgamSpec(A.local_edge(ga), A.local_vertex(u), A.local_vertex(v),
                           B.local_edge(gb), B.local_vertex(u), B.local_vertex(v))
        tree_links.append(TreeLink(ia, ib, spec))
    tree_links.sort(key=lambda lk: (lk.alpha, lk.beta))
    return ThreeBlockTree(blocks, tree_links, m, n_vertices)


# -- validation ------------------------------------------------------------

def check_tree(T: ThreeBlockTree) -> None:
    """Raise :class:`BlockTreeError` unless every 3-block tree invariant holds."""
    nb = len(T.blocks)
    if nb == 0:
        raise BlockTreeError("empty tree")
    for i, b in enumerate(T.blocks):
        g = b.graph
        if g.n_edges < 3:
            raise BlockTreeError(f"block {i} has fewer than 3 edges")
        if b.kind == CYCLE and not _is_cycle(g):
            raise BlockTreeError(f"block {i} is not a cycle")
        if b.kind == MULTILINK and g.n_vertices != 2:
            raise BlockTreeError(f"block {i} is not a multilink")
        if b.kind == THREE_CONNECTED and not (g.is_simple() and is_k_connected(g, 3)):
            raise BlockTreeError(f"block {i} is not 3-connected")
        if b.kind not in KINDS:
            raise BlockTreeError(f"block {i} has unknown kind {b.kind!r}")
    if len(T.links) != nb - 1:
        raise BlockTreeError("link count is not blocks - 1")
    used = defaultdict(int)
    adj = defaultdict(list)
    for lk in T.links:
        A, B = T.blocks[lk.alpha], T.blocks[lk.beta]
        if A.kind == B.kind and A.kind in (CYCLE, MULTILINK):
            raise BlockTreeError(f"adjacent {A.kind} blocks {lk.alpha}, {lk.beta}")
        s = lk.spec
        _check_spec_side(A.graph, s.f_a, s.a_tail, s.a_head, f"block {lk.alpha}")
        _check_spec_side(B.graph, s.f_b, s.b_tail, s.b_head, f"block {lk.beta}")
        used[(lk.alpha, s.f_a)] += 1
        used[(lk.beta, s.f_b)] += 1
        adj[lk.alpha].append(lk.beta)
        adj[lk.beta].append(lk.alpha)
    for (i, e), c in used.items():
        if c > 1:
            raise BlockTreeError(f"edge {e} of block {i} used by {c} links")
        if e not in T.blocks[i].virtual:
            raise BlockTreeError(f"linked edge {e} of block {i} not flagged virtual")
    if sum(len(b.virtual) for b in T.blocks) != 2 * len(T.links):
        raise BlockTreeError("virtual edges not matched one-to-one with links")
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if len(seen) != nb:
        raise BlockTreeError("links do not connect the blocks")


# -- reconstruction --------------------------------------------------------

@dataclass
class Reconstruction:
    graph: MultiGraph
    vertex_maps: list[list[int]]  # per block: local vertex -> result vertex
    edge_maps: list[list[int]]    # per block: local edge -> result edge (-1 virtual)


def reconstruct_with_maps(T: ThreeBlockTree, order: Sequence[int] | None = None) -> Reconstruction:
    """Amalgamate along every link, in ``order`` (indices into ``T.links``).

    Each block starts as its own cluster; a link glues two clusters with
    :func:`edge_amalgam`. The result's edge ``e`` is real edge ``e``; vertex
    ids are the amalgam's own, not the original ones.
    """
    check_tree(T)
    order = list(range(len(T.links))) if order is None else list(order)
    if sorted(order) != list(range(len(T.links))):
        raise BlockTreeError("order must be a permutation of the links")
    cluster = list(range(len(T.blocks)))
    graphs = {i: b.graph for i, b in enumerate(T.blocks)}
    vmap = [list(range(b.graph.n_vertices)) for b in T.blocks]
    emap = [list(range(b.graph.n_edges)) for b in T.blocks]
    for li in order:
        lk = T.links[li]
        ca, cb = cluster[lk.alpha], cluster[lk.beta]
        s = lk.spec
        spec = AmalgamSpec(emap[lk.alpha][s.f_a], vmap[lk.alpha][s.a_tail], vmap[lk.alpha][s.a_head],
                           emap[lk.beta][s.f_b], vmap[lk.beta][s.b_tail], vmap[lk.beta][s.b_head])
        am = edge_amalgam(graphs[ca], graphs[cb], spec)
        for i in range(len(T.blocks)):
            if cluster[i] == ca:
                vmap[i] = [am.a_vertices[x] for x in vmap[i]]
                emap[i] = [am.a_edges[x] if x >= 0 else -1 for x in emap[i]]
            elif cluster[i] == cb:
                vmap[i] = [am.b_vertices[x] for x in vmap[i]]
                emap[i] = [am.b_edges[x] if x >= 0 else -1 for x in emap[i]]
                cluster[i] = ca
        graphs[ca] = am.graph
        del graphs[cb]
    (final,) = graphs.values()
    # renumber result edges to real ids
    real_of = {}
    for i, b in enumerate(T.blocks):
        for le, x in enumerate(emap[i]):
            if le not in b.virtual:
                real_of[x] = b.edge_ids[le]
    if sorted(real_of.values()) != list(range(T.n_real)) or len(real_of) != final.n_edges:
        raise BlockTreeError("real edges do not survive reconstruction one-to-one")
    ends = [None] * T.n_real
    for x, rid in real_of.items():
        ends[rid] = final.endpoints(x)
    emap = [[real_of[x] if x >= 0 else -1 for x in em] for em in emap]
    return Reconstruction(MultiGraph(final.n_vertices, ends), vmap, emap)


def reconstruct(T: ThreeBlockTree, order: Sequence[int] | None = None,
                original_ids: bool = True) -> MultiGraph:
    """Gamma(T): the graph of non-virtual edges after all amalgams.

    With ``original_ids`` the result vertices are renamed to the ids recorded
    in the blocks; otherwise the amalgam's own numbering is kept.
    """
    rec = reconstruct_with_maps(T, order)
    if not original_ids:
        return rec.graph
    name = [None] * rec.graph.n_vertices
    for i, b in enumerate(T.blocks):
        for lv, x in enumerate(rec.vertex_maps[i]):
            if name[x] is None:
                name[x] = b.vertex_ids[lv]
            elif name[x] != b.vertex_ids[lv]:
                raise BlockTreeError("amalgam merged vertices with different original ids")
    n = max(T.n_vertices, max(name) + 1)
    return MultiGraph(n, [(name[u], name[v]) for u, v in rec.graph.ends.tolist()])


def _canonical_form(T: ThreeBlockTree, rec: Reconstruction) -> tuple:
    # a result vertex is named by its smallest (block, local vertex) member
    name: dict[int, tuple[int, int]] = {}
    for i, vm in enumerate(rec.vertex_maps):
        for lv, x in enumerate(vm):
            if x not in name or (i, lv) < name[x]:
                name[x] = (i, lv)
    return tuple(tuple(sorted((name[u], name[v]))) for u, v in rec.graph.ends.tolist())


def order_invariance_check(T: ThreeBlockTree, trials: int, rng_seed) -> bool:
    """Reconstruct along ``trials`` random link orders and compare the results
    under the canonical naming of vertices by their block members."""
    rng = np.random.default_rng(rng_seed)
    ref = _canonical_form(T, reconstruct_with_maps(T))
    for _ in range(trials):
        order = rng.permutation(len(T.links)).tolist()
        if _canonical_form(T, reconstruct_with_maps(T, order)) != ref:
            return False
    return True


def isomorphic_with_edge_ids(g: MultiGraph, h: MultiGraph) -> bool:
    """Is there a vertex bijection mapping every edge ``e`` of ``h`` onto edge
    ``e`` of ``g``? Isolated vertices are matched freely."""
    if g.n_vertices != h.n_vertices or g.n_edges != h.n_edges:
        return False
    if sorted(g.degrees().tolist()) != sorted(h.degrees().tolist()):
        return False
    cand = {}
    for e in range(h.n_edges):
        pair = set(g.endpoints(e))
        for x in h.endpoints(e):
            cand[x] = cand.get(x, pair) & pair
            if not cand[x]:
                return False
    order = sorted(cand, key=lambda x: len(cand[x]))
    phi: dict[int, int] = {}
    used: set[int] = set()

    def consistent(x):
        for d in h.darts_at(x):
            e = d >> 1
            y = h.dart_vertex(d ^ 1)
            if y in phi and {phi[x], phi[y]} != set(g.endpoints(e)):
                return False
        return True

    def search(i):
        if i == len(order):
            return True
        x = order[i]
        for c in sorted(cand[x]):
            if c in used:
                continue
            phi[x] = c
            used.add(c)
            if consistent(x) and search(i + 1):
                return True
            del phi[x]
            used.discard(c)
        return False

    return search(0)


# -- text format -----------------------------------------------------------

def tree_to_text(T: ThreeBlockTree) -> str:
    lines = [f"blocktree {T.n_vertices} {T.n_real}"]
    for i, b in enumerate(T.blocks):
        lines.append(f"block {i} {b.kind}")
        for le in range(b.graph.n_edges):
            u, v = b.graph.endpoints(le)
            lines.append(f"e {b.edge_ids[le]} {b.vertex_ids[u]} {b.vertex_ids[v]}")
        for le in sorted(b.virtual):
            lines.append(f"vedge {i} {b.edge_ids[le]}")
    for lk in T.links:
        A, B, s = T.blocks[lk.alpha], T.blocks[lk.beta], lk.spec
        lines.append(
            f"tlink {lk.alpha} {lk.beta} "
            f"{A.edge_ids[s.f_a]} {A.vertex_ids[s.a_tail]} {A.vertex_ids[s.a_head]} "
            f"{B.edge_ids[s.f_b]} {B.vertex_ids[s.b_tail]} {B.vertex_ids[s.b_head]}")
    return "\n".join(lines) + "\n"


def tree_from_text(text: str) -> ThreeBlockTree:
    header = None
    raw_blocks: list[dict] = []
    raw_links = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        p = line.split()
        if p[0] == "blocktree":
            header = (int(p[1]), int(p[2]))
        elif p[0] == "block":
            if int(p[1]) != len(raw_blocks):
                raise BlockTreeError("block ids must be consecutive")
            raw_blocks.append({"kind": p[2], "edges": {}, "virtual": set()})
        elif p[0] == "e":
            raw_blocks[-1]["edges"][int(p[1])] = (int(p[2]), int(p[3]))
        elif p[0] == "vedge":
            raw_blocks[int(p[1])]["virtual"].add(int(p[2]))
        elif p[0] == "tlink":
            raw_links.append(tuple(int(x) for x in p[1:]))
        else:
            raise BlockTreeError(f"unrecognised line: {raw!r}")
    if header is None:
        raise BlockTreeError("missing blocktree header")
    blocks = []
    for rb in raw_blocks:
        bg, bverts, beids = _piece_graph(rb["edges"])
        virtual = frozenset(beids.index(e) for e in rb["virtual"])
        blocks.append(Block(rb["kind"], bg, tuple(bverts), tuple(beids), virtual))
    links = []
    for a, b, fa, at, ah, fb, bt, bh in raw_links:
        A, B = blocks[a], blocks[b]
        links.append(TreeLink(a, b, AmalgamSpec(A.local_edge(fa), A.local_vertex(at), A.local_vertex(ah),
                                                B.local_edge(fb), B.local_vertex(bt), B.local_vertex(bh))))
    T = ThreeBlockTree(blocks, links, header[1], header[0])
    check_tree(T)
    return T
