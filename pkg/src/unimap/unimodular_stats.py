"""Mass transport, rooted-ball statistics and uniform spanning trees on finite graphs."""

from __future__ import annotations

import math
import struct
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from numbers import Rational
from typing import Callable

import numpy as np
from scipy import stats

from . import kernels
from .amalgam_embed import subseed
from .multigraph import GraphError, MultiGraph, ball
from .oracles import GraphOracle, window_graph

Transport = Callable[[MultiGraph, int, int], object]


# -- mass transport ---------------------------------------------------------

@dataclass(frozen=True)
class MTPResult:
    lhs: object
    rhs: object
    equal: bool


def _checked(value, o, x):
    if isinstance(value, (bool, np.bool_)):
        value = int(value)
    if isinstance(value, (int, np.integer)):
        value = int(value)
    elif isinstance(value, Rational):
        value = Fraction(value)
    else:
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"transport f({o}, {x}) is not finite")
    if value < 0:
        raise ValueError(f"transport f({o}, {x}) is negative")
    return value


def mtp_check(g: MultiGraph, f: Transport, tol: float = 1e-12) -> MTPResult:
    """Both sides of the mass-transport identity under a uniform root.

    ``lhs`` averages the mass sent out of each vertex, ``rhs`` the mass
    received. Integer and rational values are summed exactly; otherwise the
    comparison uses ``tol``.
    """
    n = g.n_vertices
    if n == 0:
        raise GraphError("empty graph")
    out = [0] * n
    inn = [0] * n
    exact = True
    for o in range(n):
        for x in range(n):
            val = _checked(f(g, o, x), o, x)
            exact = exact and not isinstance(val, float)
            out[o] += val
            inn[x] += val
    if exact:
        lhs, rhs = Fraction(sum(out), n), Fraction(sum(inn), n)
        return MTPResult(lhs, rhs, lhs == rhs)
    lhs, rhs = math.fsum(out) / n, math.fsum(inn) / n
    return MTPResult(lhs, rhs, abs(lhs - rhs) <= tol)


def _dist_table(g: MultiGraph) -> np.ndarray:
    cache = getattr(g, "_unimap_dist", None)
    if cache is None:
        indptr, indices, _ = g.csr
        cache = kernels.all_pairs_distances(indptr, indices)
        object.__setattr__(g, "_unimap_dist", cache)
    return cache


def f_adjacency(g: MultiGraph, o: int, x: int) -> int:
    return int(_dist_table(g)[o, x] == 1)


def f_degree_weighted(g: MultiGraph, o: int, x: int) -> int:
    """deg(o) when x is a neighbour of o (neighbours counted once)."""
    return len(set(g.neighbors(o))) if _dist_table(g)[o, x] == 1 else 0


def f_ball_size(g: MultiGraph, o: int, x: int) -> int:
    """|B(x, 1)| when x lies within distance 1 of o."""
    d = _dist_table(g)
    return int((d[x] == 0).sum() + (d[x] == 1).sum()) if 0 <= d[o, x] <= 1 else 0


BUILTIN_TRANSPORTS: dict[str, Transport] = {
    "adjacency": f_adjacency,
    "degree-weighted": f_degree_weighted,
    "ball-size": f_ball_size,
}


def random_transport(rng_seed, dist_cap: int = 3, max_value: int = 9) -> Transport:
    """A random integer transport depending only on (deg o, deg x, distance).

    Those three quantities are invariant under isomorphisms of the
    doubly-rooted graph, so the function is a valid transport.
    """
    rng = np.random.default_rng(rng_seed)
    table = {}

    def f(g, o, x):
        d = int(_dist_table(g)[o, x])
        d = dist_cap + 1 if d < 0 else min(d, dist_cap)
        key = (g.degree(o), g.degree(x), d)
        if key not in table:
            table[key] = int(rng.integers(0, max_value + 1))
        return table[key]

    return f


# -- canonical rooted balls -------------------------------------------------

def _refine(n, adj, colors):
    """Colour refinement; colours are ranks of canonical signatures."""
    while True:
        sigs = []
        for v in range(n):
            nb = Counter(colors[w] for w in adj[v])
            sigs.append((colors[v], tuple(sorted(nb.items()))))
        ranks = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if len(ranks) == len(set(colors)):
            return new
        colors = new


def _code_for_order(n, mult, order, extra):
    words = [n] + [extra[v] for v in order]
    for i in range(n):
        for j in range(i + 1, n):
            words.append(mult.get((min(order[i], order[j]), max(order[i], order[j])), 0))
    return words


def canonical_code(g: MultiGraph, root: int) -> bytes:
    """Code of the rooted graph ``(g, root)``, equal iff rooted-isomorphic.

    Colour refinement seeded by distance to the root, then individualisation
    of the first non-trivial cell with branch-and-bound on the resulting
    adjacency words (edge multiplicities included).
    """
    n = g.n_vertices
    dist = g.distances_from(root)
    adj = [g.neighbors(v) for v in range(n)]
    mult = Counter((min(u, v), max(u, v)) for u, v in g.ends.tolist())
    extra = [int(d) if d >= 0 else n for d in dist]  # unreachable sorts last
    base = [(int(d), g.degree(v)) for v, d in enumerate(dist)]
    ranks = {s: i for i, s in enumerate(sorted(set(base)))}
    colors = _refine(n, adj, [ranks[s] for s in base])
    best = [None]

    def search(colors):
        cells = Counter(colors)
        if len(cells) == n:
            order = sorted(range(n), key=lambda v: colors[v])
            word = _code_for_order(n, mult, order, extra)
            if best[0] is None or word < best[0]:
                best[0] = word
            return
        target = min(c for c, k in cells.items() if k > 1)
        for v in [v for v in range(n) if colors[v] == target]:
            split = [2 * c + (1 if (c == target and u != v) else 0) for u, c in enumerate(colors)]
            search(_refine(n, adj, split))

    search(colors)
    return struct.pack(f">{len(best[0])}I", *best[0])


@dataclass(frozen=True)
class BallSummary:
    code: bytes
    radius: int

    def hex(self) -> str:
        return self.code.hex()


def ball_summary(g: MultiGraph, root: int, r: int) -> BallSummary:
    b = ball(g, root, r)
    return BallSummary(canonical_code(b.graph, b.center), r)


@dataclass
class EmpiricalBallDistribution:
    r: int
    counts: dict
    n: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.n:
            raise ValueError("counts do not sum to the sample size")

    def freq(self, code: bytes) -> Fraction:
        return Fraction(self.counts.get(code, 0), self.n)

    def to_text(self) -> str:
        lines = [f"balls r={self.r} n={self.n}"]
        for code in sorted(self.counts):
            lines.append(f"{code.hex()} {self.counts[code]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> EmpiricalBallDistribution:
        rows = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not rows:
            raise ValueError("empty ball distribution")
        head = rows[0].split()
        if len(head) != 3 or head[0] != "balls" or not head[1].startswith("r=") \
                or not head[2].startswith("n="):
            raise ValueError(f"bad header {rows[0]!r}")
        counts = {}
        for row in rows[1:]:
            code, count = row.split()
            counts[bytes.fromhex(code)] = int(count)
        return cls(int(head[1][2:]), counts, int(head[2][2:]))


def sample_balls(source, r: int, n_samples: int | None = None, rng_seed=0) -> EmpiricalBallDistribution:
    """Empirical law of the r-ball around a root.

    For a finite graph, ``n_samples=None`` takes every vertex once (the exact
    uniform-root law); otherwise roots are drawn uniformly with replacement.
    For an oracle the law is the point mass at its origin.
    """
    if isinstance(source, GraphOracle):
        g, _ = window_graph(source, r)
        code = canonical_code(g, 0)
        n = 1 if n_samples is None else int(n_samples)
        return EmpiricalBallDistribution(r, {code: n}, n)
    g = source
    if g.n_vertices == 0:
        raise GraphError("empty graph")
    if n_samples is None:
        roots = range(g.n_vertices)
    else:
        rng = np.random.default_rng(rng_seed)
        roots = rng.integers(0, g.n_vertices, size=int(n_samples)).tolist()
    memo = {}
    counts = Counter()
    for v in roots:
        if v not in memo:
            memo[v] = ball_summary(g, v, r).code
        counts[memo[v]] += 1
    return EmpiricalBallDistribution(r, dict(counts), sum(counts.values()))


def tv_distance(p: EmpiricalBallDistribution, q: EmpiricalBallDistribution) -> Fraction:
    """Total variation distance, exact."""
    if p.r != q.r:
        raise ValueError("radius mismatch")
    codes = set(p.counts) | set(q.counts)
    return sum((abs(p.freq(c) - q.freq(c)) for c in codes), Fraction(0)) / 2


def local_weak_distance(g: MultiGraph, o: int, h: MultiGraph, o2: int, r_max: int = 8) -> Fraction:
    """inf{2^-r : B(g,o,r) and B(h,o2,r) are rooted-isomorphic}, with r capped at ``r_max``."""
    best = None
    for r in range(r_max + 1):
        if ball_summary(g, o, r).code != ball_summary(h, o2, r).code:
            break
        best = r
    return Fraction(1) if best is None else Fraction(1, 2**best)


# -- spanning trees ---------------------------------------------------------

def _bareiss_det(m: list[list[int]]) -> int:
    n = len(m)
    if n == 0:
        return 1
    a = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def spanning_tree_count(g: MultiGraph) -> int:
    """Matrix-tree theorem, exact integer determinant."""
    n = g.n_vertices
    if n == 0:
        return 0
    lap = [[0] * n for _ in range(n)]
    for u, v in g.ends.tolist():
        lap[u][u] += 1
        lap[v][v] += 1
        lap[u][v] -= 1
        lap[v][u] -= 1
    return _bareiss_det([row[1:] for row in lap[1:]])


def is_spanning_tree(g: MultiGraph, edges) -> bool:
    edges = list(edges)
    if len(edges) != g.n_vertices - 1 or len(set(edges)) != len(edges):
        return False
    parent = list(range(g.n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        u, v = g.endpoints(e)
        a, b = find(u), find(v)
        if a == b:
            return False
        parent[a] = b
    return True


def enumerate_spanning_trees(g: MultiGraph) -> list[tuple[int, ...]]:
    """Every spanning tree as a sorted edge-id tuple (brute force)."""
    return [c for c in combinations(range(g.n_edges), g.n_vertices - 1) if is_spanning_tree(g, c)]


def wilson_ust_batch(g: MultiGraph, n_samples: int, rng_seed) -> np.ndarray:
    """``n_samples`` independent uniform spanning trees, one sorted row each."""
    if g.n_vertices == 0 or not g.is_connected():
        raise GraphError("uniform spanning tree needs a connected nonempty graph")
    out = np.zeros((n_samples, max(g.n_vertices - 1, 0)), dtype=np.int64)
    if g.n_vertices == 1 or n_samples == 0:
        return out
    indptr, indices, slot_edge = g.csr
    rng = np.random.default_rng(rng_seed)
    done = 0
    chunk = max(1024, 8 * g.n_vertices * n_samples)
    while done < n_samples:
        done = int(kernels.wilson_batch(indptr, indices, slot_edge, n_samples, done, out,
                                        rng.random(chunk)))
    out.sort(axis=1)
    return out


def wilson_ust(g: MultiGraph, rng_seed) -> tuple[int, ...]:
    """A uniform spanning tree via loop-erased random walks, as sorted edge ids."""
    return tuple(int(e) for e in wilson_ust_batch(g, 1, rng_seed)[0])


@dataclass(frozen=True)
class UniformityTest:
    n_trees: int
    n_samples: int
    statistic: float
    p_value: float
    unseen: int

    def passes(self, level: float = 0.01) -> bool:
        return self.unseen == 0 and self.p_value > level


def ust_uniformity(g: MultiGraph, n_samples: int, rng_seed) -> UniformityTest:
    """Chi-square goodness of fit of Wilson samples against the uniform law."""
    trees = enumerate_spanning_trees(g)
    index = {t: i for i, t in enumerate(trees)}
    counts = np.zeros(len(trees), dtype=np.int64)
    unseen = 0
    for row in wilson_ust_batch(g, n_samples, rng_seed):
        i = index.get(tuple(row.tolist()))
        if i is None:
            unseen += 1
        else:
            counts[i] += 1
    if len(trees) == 1:
        return UniformityTest(1, n_samples, 0.0, 1.0, unseen)
    res = stats.chisquare(counts)
    return UniformityTest(len(trees), n_samples, float(res.statistic), float(res.pvalue), unseen)


def _labels_from_parts(g: MultiGraph, parts) -> np.ndarray:
    if isinstance(parts, np.ndarray) or (parts and not isinstance(parts[0], (list, tuple, set, frozenset))):
        labels = np.asarray(parts, dtype=np.int64)
    else:
        labels = np.full(g.n_vertices, -1, dtype=np.int64)
        for i, part in enumerate(parts):
            for v in part:
                if labels[v] >= 0:
                    raise GraphError(f"vertex {v} in two parts")
                labels[v] = i
    if labels.shape != (g.n_vertices,) or (labels < 0).any():
        raise GraphError("partition does not cover every vertex")
    return labels


def assemble_spanning_tree(g: MultiGraph, parts, rng_seed) -> tuple[int, ...]:
    """Spanning tree from per-part uniform trees plus one uniform edge per
    adjacent pair of parts.

    ``parts`` is a label per vertex or a list of vertex sets. Each part must
    induce a connected graph and the factor graph must be a tree.
    """
    labels = _labels_from_parts(g, parts)
    ids = sorted(set(labels.tolist()))
    between: dict[tuple[int, int], list[int]] = {}
    for e, (u, v) in enumerate(g.ends.tolist()):
        a, b = int(labels[u]), int(labels[v])
        if a != b:
            between.setdefault((min(a, b), max(a, b)), []).append(e)
    if len(between) != len(ids) - 1:
        raise GraphError("factor graph is not a tree")
    parent = {i: i for i in ids}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for a, b in between:
        ra, rb = find(a), find(b)
        if ra == rb:
            raise GraphError("factor graph is not a tree")
        parent[ra] = rb
    tree = []
    for i in ids:
        members = np.flatnonzero(labels == i).tolist()
        sub, verts, eids = g.induced_subgraph(members)
        if not sub.is_connected():
            raise GraphError(f"part {i} is not connected")
        tree.extend(eids[e] for e in wilson_ust(sub, subseed(rng_seed, "part", i)))
    rng = np.random.default_rng(subseed(rng_seed, "links"))
    for key in sorted(between):
        options = between[key]
        tree.append(options[int(rng.integers(len(options)))])
    return tuple(sorted(int(e) for e in tree))
