"""Randomized tree-like decomposition of an infinite graph seen through an oracle.

Stage ``R`` repeatedly samples an independent set ``I_R`` of the 2R-closure
from fresh iid labels and lets every member cut one uniformly chosen minimal
end-cut of its R-ball. Components count as infinite when they reach the
escape radius ``H_esc`` from the cut centre.

Everything runs on a finite :class:`Region` around the oracle origin: the
oracle is explored once, frozen into CSR arrays, and the per-centre searches
run in the kernels.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .amalgam_embed import subseed
from .multigraph import MultiGraph
from .oracles import (FiniteGraphOracle, GraphOracle, HorizonExhausted, label_array,
                      random_walk_roots, vertex_hash)

DEFAULT_F_MAX = 6
CUT_CAP = 4096


@dataclass(frozen=True)
class CutSet:
    edges: tuple
    center: object
    radius: int

    def __len__(self) -> int:
        return len(self.edges)


class Region:
    """The oracle graph on B(o, radius), frozen into integer arrays.

    Local vertex ``i`` is ``verts[i]``; vertices at depth < radius carry their
    full adjacency (``complete``), the outer sphere only its inward edges.
    """

    def __init__(self, oracle: GraphOracle, radius: int):
        self.oracle = oracle
        self.radius = int(radius)
        origin = oracle.origin
        verts = [origin]
        depth = {origin: 0}
        head = 0
        while head < len(verts):
            v = verts[head]
            head += 1
            if depth[v] == radius:
                continue
            for _, w in oracle.neighbors(v):
                if w not in depth:
                    depth[w] = depth[v] + 1
                    verts.append(w)
        self.verts = verts
        self.ids = {v: i for i, v in enumerate(verts)}
        self.depth = np.array([depth[v] for v in verts], dtype=np.int64)
        keys, ends = {}, []
        slots = [[] for _ in verts]
        for i, v in enumerate(verts):
            if depth[v] == radius:
                continue
            for key, w in oracle.neighbors(v):
                j = self.ids[w]
                e = keys.get(key)
                if e is None:
                    e = keys[key] = len(ends)
                    ends.append((min(i, j), max(i, j)))
                    slots[i].append((j, e))
                    slots[j].append((i, e))
        self.edge_ids = keys
        self.edge_keys = [None] * len(ends)
        for key, e in keys.items():
            self.edge_keys[e] = key
        self.ends = np.array(ends, dtype=np.int64).reshape(-1, 2)
        self.ends_u = np.ascontiguousarray(self.ends[:, 0])
        self.ends_v = np.ascontiguousarray(self.ends[:, 1])
        indptr = np.zeros(len(verts) + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(s) for s in slots])
        self.indptr = indptr
        self.indices = np.array([j for s in slots for j, _ in s], dtype=np.int64)
        self.slot_edge = np.array([e for s in slots for _, e in s], dtype=np.int64)
        self.complete = self.depth < radius
        self._hashes = {}
        self._work = None

    def workspace(self):
        if self._work is None:
            n, m = len(self.verts), self.ends.shape[0]
            self._work = (np.full(n, -1, dtype=np.int64), np.full(n, -1, dtype=np.int64),
                          np.full(n, -1, dtype=np.int64), np.zeros(m, dtype=np.bool_))
        return self._work

    @property
    def n_vertices(self) -> int:
        return len(self.verts)

    @property
    def n_edges(self) -> int:
        return self.ends.shape[0]

    def vid(self, v) -> int:
        try:
            return self.ids[v]
        except KeyError:
            raise HorizonExhausted(f"vertex {v!r} outside the explored region") from None

    def ball(self, i: int, r: int) -> np.ndarray:
        """Local ids within distance ``r`` of ``i`` (full graph)."""
        d = kernels.bfs_distances(self.indptr, self.indices, i, r)
        return np.flatnonzero(d >= 0)

    def hashes(self, ids: np.ndarray) -> np.ndarray:
        seed = self.oracle.seed
        cache = self._hashes.setdefault(seed, {})
        out = np.empty(len(ids), dtype=np.uint64)
        for k, i in enumerate(ids.tolist()):
            h = cache.get(i)
            if h is None:
                h = cache[i] = vertex_hash(seed, self.verts[i])
            out[k] = h
        return out

    def subgraph(self, radius: int) -> tuple[MultiGraph, np.ndarray]:
        """Induced graph on B(o, radius); returns it with its region edge ids."""
        keep = self.depth <= radius
        emask = keep[self.ends_u] & keep[self.ends_v]
        eids = np.flatnonzero(emask)
        # region vertices are in BFS order, so B(o, radius) is a prefix
        n = int(keep.sum())
        return MultiGraph(n, self.ends[eids]), eids


_REGIONS: dict = {}


def region_for(oracle: GraphOracle, radius: int) -> Region:
    """A region of at least ``radius`` around the origin, shared across calls.

    Shipped oracles with equal name and horizon describe the same graph, so
    their regions are reused; the seed only enters through labels.
    """
    if isinstance(oracle, FiniteGraphOracle):
        key = ("finite", id(oracle))
    else:
        key = (type(oracle), oracle.horizon)
    reg = _REGIONS.get(key)
    if reg is None or reg.radius < radius or (key[0] == "finite" and reg.oracle is not oracle):
        reg = Region(oracle, radius)
        _REGIONS[key] = reg
    if reg.oracle is not oracle:
        reg = _rebind(reg, oracle)
    return reg


def _rebind(reg: Region, oracle: GraphOracle) -> Region:
    clone = object.__new__(Region)
    clone.__dict__.update(reg.__dict__)
    clone.oracle = oracle
    return clone


def _cut_ids(reg: Region, x: int, R: int, f_max: int, H: int, removed: np.ndarray) -> list[tuple[int, ...]]:
    cand, eu, ev, comp0, esc, n_comp0, status = kernels.cut_problem(
        reg.indptr, reg.indices, reg.slot_edge, reg.ends_u, reg.ends_v, reg.complete,
        removed, x, R, H, *reg.workspace())
    if status < 0:
        raise HorizonExhausted(
            f"explored radius {reg.radius} too small for R={R}, H_esc={H} around {reg.verts[x]!r}")
    if cand.size == 0 or esc.sum() < 2:
        return []
    flat, starts, count = kernels.minimal_cut_sets(
        comp0.shape[0], eu, ev, comp0, esc, n_comp0, f_max, CUT_CAP)
    if count > CUT_CAP:
        raise RuntimeError(f"more than {CUT_CAP} minimal end-cuts; lower f_max")
    return [tuple(int(cand[k]) for k in flat[starts[c]:starts[c + 1]]) for c in range(count)]


def enumerate_min_endcuts(oracle: GraphOracle, x, R: int, f_max: int = DEFAULT_F_MAX,
                          H_esc: int | None = None, removed=()) -> list[CutSet]:
    """Minimal end-cuts of size at most ``f_max`` inside the R-ball of ``x``.

    ``removed`` holds oracle edge ids already deleted; the ball is taken in
    what remains. A component is infinite iff it reaches graph distance
    ``H_esc`` from ``x``. Cuts come ordered by size, then lexicographically.
    """
    if f_max < 1:
        raise ValueError("f_max must be at least 1")
    H = oracle.escape_radius(R) if H_esc is None else int(H_esc)
    if H <= R:
        raise ValueError("escape radius must exceed R")
    reg = region_for(oracle, oracle.distance(oracle.origin, x) + H + 1)
    mask = np.zeros(reg.n_edges, dtype=np.bool_)
    for key in removed:
        e = reg.edge_ids.get(key)
        if e is not None:
            mask[e] = True
    cuts = _cut_ids(reg, reg.vid(x), R, f_max, H, mask)
    out = sorted((tuple(sorted(reg.edge_keys[e] for e in c)) for c in cuts),
                 key=lambda c: (len(c), c))
    return [CutSet(c, x, R) for c in out]


# -- I_R --------------------------------------------------------------------

@dataclass
class Closure:
    """2R-closure neighbourhoods of a vertex list, as CSR over local ids."""
    members: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    ids: np.ndarray
    hashes: np.ndarray


def closure_of(reg: Region, members, R: int) -> Closure:
    members = np.asarray(members, dtype=np.int64)
    rows = []
    if members.size and reg.depth[members].max() + 2 * R >= reg.radius:
        raise HorizonExhausted("explored radius too small for the 2R-closure")
    for i in members.tolist():
        near = reg.ball(i, 2 * R)
        rows.append(near[near != i])
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([r.size for r in rows])
    indices = (np.concatenate(rows) if rows else np.zeros(0)).astype(np.int64)
    ids = np.union1d(members, indices)
    return Closure(members, indptr, indices, ids, reg.hashes(ids))


def _sample(reg: Region, cl: Closure, salt) -> np.ndarray:
    lab = np.zeros(reg.n_vertices)
    lab[cl.ids] = label_array(cl.hashes, salt)
    own = lab[cl.members]
    best = np.full(cl.members.size, -1.0)
    nonempty = np.diff(cl.indptr) > 0
    if cl.indices.size:
        red = np.maximum.reduceat(lab[cl.indices], cl.indptr[:-1][nonempty])
        best[nonempty] = red
    return cl.members[own > best]


def sample_I_R(oracle: GraphOracle, window, R: int, salt=0) -> list:
    """Members of ``window`` whose label beats every 2R-closure neighbour.

    Labels are ``oracle.label(v, salt)``; neighbours outside the window
    compete too, so the answer does not depend on where the window ends.
    """
    window = list(window)
    depth = max((oracle.distance(oracle.origin, v) for v in window), default=0)
    reg = region_for(oracle, depth + 2 * R + 1)
    cl = closure_of(reg, [reg.vid(v) for v in window], R)
    return [reg.verts[i] for i in _sample(reg, cl, salt).tolist()]


# -- schedule ---------------------------------------------------------------

@dataclass(frozen=True)
class StageSchedule:
    R: int
    M_R: int
    c_R: float
    reshuffles: int
    K_R: int
    N_R: int

    @property
    def log_M(self) -> int:
        return self.M_R.bit_length() - 1


def schedule_from_ball_sizes(R: int, sizes, N_prev: int = 0) -> StageSchedule:
    """Smallest power of two ``M_R = 2^k`` with P(|B(o,2R)| < k) > 1 - 2^-R."""
    sizes = np.sort(np.asarray(sizes, dtype=np.int64))
    target = 1.0 - 2.0**-R
    k = 1
    while np.searchsorted(sizes, k, side="left") / sizes.size <= target:
        k += 1
    c = 1.0 / k
    reshuffles = 1 if c >= 1.0 else max(1, math.ceil(-R / math.log2(1.0 - c)))
    M = 2**k
    return StageSchedule(R, M, c, reshuffles, M * reshuffles, N_prev + M * reshuffles)


def estimate_schedule(oracle: GraphOracle, R_max: int, n_roots: int = 500, seed=0,
                      walk_length: int = 8) -> list[StageSchedule]:
    """Stage parameters for R = 1..R_max from ball sizes at sampled roots."""
    rng = np.random.default_rng(subseed(seed, "roots"))
    roots = random_walk_roots(oracle, n_roots, walk_length, rng)
    reg = region_for(oracle, walk_length + 2 * R_max + 1)
    out = []
    N = 0
    memo = {}
    for R in range(1, R_max + 1):
        sizes = []
        for v in roots:
            key = (v, R)
            if key not in memo:
                memo[key] = reg.ball(reg.vid(v), 2 * R).size
            sizes.append(memo[key])
        s = schedule_from_ball_sizes(R, sizes, N)
        N = s.N_R
        out.append(s)
    return out


# -- decomposing subgraphs --------------------------------------------------

def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@dataclass(frozen=True)
class FactorGraph:
    labels: np.ndarray
    n_components: int
    edge_counts: dict
    internal: tuple

    @property
    def is_forest(self) -> bool:
        if self.internal:
            return False
        parent = list(range(self.n_components))
        for a, b in self.edge_counts:
            ra, rb = _find(parent, a), _find(parent, b)
            if ra == rb:
                return False
            parent[ra] = rb
        return True


def factor_graph(g: MultiGraph, removed) -> FactorGraph:
    """Components of ``g`` minus ``removed`` and the removed edges between them.

    ``internal`` lists removed edges whose ends stayed in one component.
    """
    removed = sorted(set(int(e) for e in removed))
    h, _ = g.without_edges(removed)
    labels = h.component_labels()
    counts = {}
    internal = []
    for e in removed:
        u, v = g.endpoints(e)
        a, b = int(labels[u]), int(labels[v])
        if a == b:
            internal.append(e)
        else:
            key = (min(a, b), max(a, b))
            counts[key] = counts.get(key, 0) + 1
    n = int(labels.max()) + 1 if labels.size else 0
    return FactorGraph(labels, n, dict(sorted(counts.items())), tuple(internal))


def is_decomposing(g: MultiGraph, removed) -> bool:
    """True iff the factor graph of ``g - removed`` is a forest.

    On a finite graph the inter-component edge sets are automatically
    finite; a removed edge inside one component counts as a loop.
    """
    return factor_graph(g, removed).is_forest


# -- the staged process -----------------------------------------------------

@dataclass
class StageReport:
    R: int
    schedule: StageSchedule
    rounds: int = 0
    steps: int = 0
    removed: int = 0


class DecompositionState:
    """Removed edges and counters for one run on a window around the origin."""

    def __init__(self, oracle: GraphOracle, window_radius: int, R_max: int,
                 f_max: int = DEFAULT_F_MAX, H_esc: int | None = None):
        self.oracle = oracle
        self.window_radius = int(window_radius)
        self.R_max = int(R_max)
        self.f_max = int(f_max)
        self.H_esc = H_esc
        H = max(self.escape(R) for R in range(1, R_max + 1))
        need = window_radius + max(H, 2 * R_max, R_max + 2) + 1
        self.region = region_for(oracle, need)
        reg = self.region
        self.window = np.flatnonzero(reg.depth <= window_radius)
        self.removed = np.zeros(reg.n_edges, dtype=np.bool_)
        g, eids = reg.subgraph(window_radius + R_max)
        self._fg_n = g.n_vertices
        self._fg_u = np.ascontiguousarray(g.ends[:, 0])
        self._fg_v = np.ascontiguousarray(g.ends[:, 1])
        self._fg_eids = eids
        self.stages: list[StageReport] = []
        self.forest_ok = True
        self.step_forest_ok = True
        self._cache = {}

    def escape(self, R: int) -> int:
        return self.oracle.escape_radius(R) if self.H_esc is None else int(self.H_esc)

    def cuts(self, x: int, R: int) -> list[tuple[int, ...]]:
        key = (x, R)
        got = self._cache.get(key)
        if got is None:
            got = self._cache[key] = _cut_ids(self.region, x, R, self.f_max, self.escape(R),
                                              self.removed)
        return got

    def remove(self, edges) -> None:
        self.removed[list(edges)] = True
        self._cache.clear()

    def removed_keys(self) -> list:
        return sorted(self.region.edge_keys[e] for e in np.flatnonzero(self.removed))

    def forest_check(self) -> bool:
        """Exact forest test of the factor graph on B(o, W + R_max)."""
        return bool(kernels.factor_forest(self._fg_n, self._fg_u, self._fg_v,
                                          self.removed[self._fg_eids]))

    def step_forest_check(self, edges) -> bool:
        """Forest test of the factor graph of the previous graph by the current
        one, i.e. only the edges removed in the last step count."""
        rem = self.removed[self._fg_eids]
        step = np.zeros(self.removed.shape[0], dtype=np.bool_)
        step[list(edges)] = True
        step = step[self._fg_eids]
        keep = ~rem | step
        return bool(kernels.factor_forest(self._fg_n, self._fg_u[keep], self._fg_v[keep], step[keep]))

    def window_factor(self, extra: int) -> FactorGraph:
        g, eids = self.region.subgraph(self.window_radius + extra)
        local = np.flatnonzero(self.removed[eids])
        return factor_graph(g, local)


def run_stage(state: DecompositionState, schedule: StageSchedule, rng_seed,
              check_every_step: bool = True) -> StageReport:
    """One stage: ``schedule.reshuffles`` rounds of at most ``M_R`` steps.

    Within a round, once a step removes nothing the graph is fixed and the
    remaining steps are no-ops, so the round ends there. After an idle round
    the whole window is checked, and the stage ends early if no window vertex
    has a cut left.
    """
    R = schedule.R
    reg = state.region
    rng = np.random.default_rng(subseed(rng_seed, "stage", R))
    cl = closure_of(reg, state.window, R)
    report = StageReport(R, schedule)
    for rnd in range(schedule.reshuffles):
        report.rounds += 1
        I = _sample(reg, cl, ("I", R, rnd)).tolist()
        step = 0
        while step < schedule.M_R:
            chosen = []
            for x in I:
                cuts = state.cuts(x, R)
                if cuts:
                    chosen.append(cuts[int(rng.integers(len(cuts)))])
            if not chosen:
                break
            flat = [e for c in chosen for e in c]
            if len(set(flat)) != len(flat):
                raise AssertionError("cuts chosen in one step overlap")
            state.remove(flat)
            report.removed += len(flat)
            step += 1
            if check_every_step:
                if not state.forest_check():
                    state.forest_ok = False
                if not state.step_forest_check(flat):
                    state.step_forest_ok = False
        report.steps += step
        if step == 0 and not any(state.cuts(x, R) for x in state.window.tolist()):
            break
    state.stages.append(report)
    return report


@dataclass
class ComponentInfo:
    size: int
    kind: str
    escapes: int


@dataclass
class DecompositionResult:
    state: DecompositionState
    schedules: list
    endcut_at_origin: dict
    components: list
    factor_edges: list
    forest: bool
    step_forest: bool

    def n_multi_escaping(self) -> int:
        return sum(c.kind == "multi-escape" for c in self.components)

    def report_lines(self) -> list[str]:
        lines = []
        for s in self.state.stages:
            lines.append(f"stage R={s.R} M_R=2^{s.schedule.log_M} reshuffles={s.schedule.reshuffles} "
                         f"rounds={s.rounds} steps={s.steps} removed={s.removed}")
        for R, flag in sorted(self.endcut_at_origin.items()):
            lines.append(f"endcut_at_origin R={R} {'yes' if flag else 'no'}")
        for i, c in enumerate(self.components):
            lines.append(f"component {i} size={c.size} kind={c.kind} escapes={c.escapes}")
        for a, b, k in self.factor_edges:
            lines.append(f"factor {a} {b} {k}")
        lines.append(f"forest={'OK' if self.forest else 'FAIL'} "
                     f"step_forest={'OK' if self.step_forest else 'FAIL'}")
        return lines


def classify_components(state: DecompositionState, reach: int) -> list[ComponentInfo]:
    """Classify the remaining components that meet B(o, W/2).

    Each is explored out to depth ``W + reach``. It is finite if it never gets
    there; otherwise ``escapes`` counts its pieces outside B(o, W) that do.
    """
    reg = state.region
    W = state.window_radius
    L = W + reach
    if L >= reg.radius:
        raise HorizonExhausted("explored radius too small to classify components")
    depth = reg.depth
    seen = np.zeros(reg.n_vertices, dtype=np.bool_)
    out = []

    def neighbours(v):
        for p in range(reg.indptr[v], reg.indptr[v + 1]):
            if not state.removed[reg.slot_edge[p]]:
                yield int(reg.indices[p])

    for s in np.flatnonzero(depth <= W // 2).tolist():
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        queue = deque([s])
        while queue:
            v = queue.popleft()
            if depth[v] >= L:
                continue
            for w in neighbours(v):
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        far = [v for v in comp if depth[v] >= L]
        if not far:
            out.append(ComponentInfo(len(comp), "finite", 0))
            continue
        outside = {v for v in comp if depth[v] > W}
        done = set()
        pieces = 0
        for v in far:
            if v in done:
                continue
            pieces += 1
            done.add(v)
            queue = deque([v])
            while queue:
                u = queue.popleft()
                for w in neighbours(u):
                    if w in outside and w not in done:
                        done.add(w)
                        queue.append(w)
        kind = "one-escape" if pieces == 1 else "multi-escape"
        out.append(ComponentInfo(len(comp), kind, pieces))
    return out


def decompose(oracle: GraphOracle, R_max: int, rng_seed, f_max: int = DEFAULT_F_MAX,
              H_esc: int | None = None, window_radius: int | None = None,
              schedules: list | None = None, classify_reach: int | None = None,
              check_every_step: bool = True) -> DecompositionResult:
    """Run stages R = 1..R_max on the window B(o, window_radius).

    The window defaults to radius ``2 R_max``. ``endcut_at_origin[R]`` records
    whether a minimal end-cut is left in B(o, R) right after stage R.
    """
    if R_max < 1:
        raise ValueError("R_max must be at least 1")
    W = 2 * R_max if window_radius is None else int(window_radius)
    schedules = schedules or estimate_schedule(oracle, R_max, seed=rng_seed)
    state = DecompositionState(oracle, W, R_max, f_max, H_esc)
    o = state.region.vid(oracle.origin)
    flags = {}
    for sched in schedules[:R_max]:
        run_stage(state, sched, rng_seed, check_every_step)
        flags[sched.R] = bool(state.cuts(o, sched.R))
    fac = state.window_factor(R_max)
    forest = state.forest_ok and state.forest_check() and fac.is_forest
    reach = R_max + 2 if classify_reach is None else classify_reach
    comps = classify_components(state, reach)
    edges = [(a, b, k) for (a, b), k in fac.edge_counts.items()]
    return DecompositionResult(state, schedules, flags, comps, edges, forest,
                               state.step_forest_ok)
