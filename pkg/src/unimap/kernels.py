"""Hot inner loops.

Every function here is written in the numba-compatible subset of Python and
wrapped with :func:`unimap._accel.njit`. With ``UNIMAP_DISABLE_NUMBA=1`` the
same source runs interpreted, which is what the benchmark compares against.

Graphs enter as CSR arrays: ``indptr`` (n+1), ``indices`` (neighbour per
slot) and, where edges matter, ``slot_edge`` (edge id per slot).
"""

import numpy as np

from ._accel import njit


# ---------------------------------------------------------------------------
# faces
# ---------------------------------------------------------------------------

@njit
def count_face_orbits(succ):
    """Number of orbits of d -> succ[d ^ 1] on darts 0..len(succ)-1."""
    n = succ.shape[0]
    seen = np.zeros(n, dtype=np.bool_)
    faces = 0
    for start in range(n):
        if seen[start]:
            continue
        faces += 1
        d = start
        while not seen[d]:
            seen[d] = True
            d = succ[d ^ 1]
    return faces


@njit
def face_labels(succ):
    """Face index per dart; faces numbered in order of their smallest dart."""
    n = succ.shape[0]
    label = np.full(n, -1, dtype=np.int64)
    faces = 0
    for start in range(n):
        if label[start] >= 0:
            continue
        d = start
        while label[d] < 0:
            label[d] = faces
            d = succ[d ^ 1]
        faces += 1
    return label


@njit
def enumerate_rotation_faces(n_darts, vert_darts_start, vert_deg, tab, tab_start,
                             n_choices, target_faces, keep):
    """Walk every rotation system given per-vertex tables of cyclic orders.

    ``tab[tab_start[i] + c * deg_i : ... + deg_i]`` is the c-th cyclic order of
    vertex i, listed as darts. Returns a histogram of face counts (index =
    number of faces) and up to ``keep`` choice vectors achieving
    ``target_faces``.
    """
    nv = vert_deg.shape[0]
    succ = np.arange(n_darts)
    counter = np.zeros(nv, dtype=np.int64)
    hist = np.zeros(n_darts + 2, dtype=np.int64)
    hits = np.zeros((keep, nv), dtype=np.int64)
    n_hits = 0

    for i in range(nv):
        k = vert_deg[i]
        base = tab_start[i]
        for j in range(k):
            succ[tab[base + j]] = tab[base + (j + 1) % k]

    while True:
        f = count_face_orbits(succ)
        hist[f] += 1
        if f == target_faces:
            if n_hits < keep:
                for i in range(nv):
                    hits[n_hits, i] = counter[i]
            n_hits += 1
        # mixed-radix increment; rewrite only vertices whose choice changed
        i = 0
        while i < nv:
            counter[i] += 1
            if counter[i] < n_choices[i]:
                break
            counter[i] = 0
            i += 1
        if i == nv:
            break
        for w in range(i + 1):
            k = vert_deg[w]
            base = tab_start[w] + counter[w] * k
            for j in range(k):
                succ[tab[base + j]] = tab[base + (j + 1) % k]
    return hist, hits, n_hits


# ---------------------------------------------------------------------------
# traversal and connectivity
# ---------------------------------------------------------------------------

@njit
def bfs_distances(indptr, indices, src, limit):
    """Graph distances from ``src``; -1 for unreached or beyond ``limit``."""
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    dist[src] = 0
    queue[0] = src
    head = 0
    tail = 1
    while head < tail:
        v = queue[head]
        head += 1
        if limit >= 0 and dist[v] >= limit:
            continue
        for p in range(indptr[v], indptr[v + 1]):
            w = indices[p]
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue[tail] = w
                tail += 1
    return dist


@njit
def all_pairs_distances(indptr, indices):
    n = indptr.shape[0] - 1
    out = np.empty((n, n), dtype=np.int64)
    for s in range(n):
        out[s] = bfs_distances(indptr, indices, s, -1)
    return out


@njit
def articulation_point(indptr, indices, skip):
    """First articulation point of the graph with vertex ``skip`` deleted.

    Returns -1 if there is none and the remainder is connected, -2 if the
    remainder is disconnected. ``skip = -1`` deletes nothing.
    """
    n = indptr.shape[0] - 1
    disc = np.full(n, -1, dtype=np.int64)
    low = np.zeros(n, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    it = np.zeros(n, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)

    root = 0
    if skip == 0:
        root = 1
    if root >= n:
        return -1
    timer = 0
    disc[root] = 0
    low[root] = 0
    it[root] = indptr[root]
    stack[0] = root
    top = 1
    root_children = 0
    found = -1
    while top > 0:
        v = stack[top - 1]
        if it[v] < indptr[v + 1]:
            w = indices[it[v]]
            it[v] += 1
            if w == skip:
                continue
            if disc[w] < 0:
                timer += 1
                disc[w] = timer
                low[w] = timer
                parent[w] = v
                it[w] = indptr[w]
                stack[top] = w
                top += 1
                if v == root:
                    root_children += 1
            elif w != parent[v]:
                if disc[w] < low[v]:
                    low[v] = disc[w]
        else:
            top -= 1
            p = parent[v]
            if p >= 0:
                if low[v] < low[p]:
                    low[p] = low[v]
                if p != root and low[v] >= disc[p] and found < 0:
                    found = p
    for v in range(n):
        if v != skip and disc[v] < 0:
            return -2
    if root_children > 1:
        return root
    return found


@njit
def separation_pair(indptr, indices):
    """A pair {u, v} whose removal disconnects the graph, or (-1, -1).

    Assumes the input is 2-connected; each vertex deletion is followed by an
    articulation-point scan of the remainder.
    """
    n = indptr.shape[0] - 1
    for u in range(n):
        a = articulation_point(indptr, indices, u)
        if a >= 0:
            if a < u:
                return a, u
            return u, a
        if a == -2:
            return u, -1
    return -1, -1


# ---------------------------------------------------------------------------
# minimal end-cuts on a piece graph
# ---------------------------------------------------------------------------

@njit
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit
def _splits_escaping(n_nodes, eu, ev, removed, comp0, escaping, n_comp0):
    parent = np.arange(n_nodes)
    for j in range(eu.shape[0]):
        if removed[j]:
            continue
        a = _find(parent, eu[j])
        b = _find(parent, ev[j])
        if a != b:
            parent[a] = b
    root_esc = np.zeros(n_nodes, dtype=np.bool_)
    for x in range(n_nodes):
        if escaping[x]:
            root_esc[_find(parent, x)] = True
    per_comp = np.zeros(n_comp0, dtype=np.int64)
    for x in range(n_nodes):
        if parent[x] == x and root_esc[x]:
            per_comp[comp0[x]] += 1
            if per_comp[comp0[x]] >= 2:
                return True
    return False


@njit
def minimal_cut_sets(n_nodes, eu, ev, comp0, escaping, n_comp0, f_max, cap):
    """Inclusion-minimal edge sets whose removal splits one component of the
    piece graph into at least two escaping parts.

    Candidates are visited by increasing size; supersets of cuts already found
    are skipped, and by monotonicity every other hit is minimal. Returns
    ``(flat, starts, count)``; ``count > cap`` signals overflow.
    """
    m = eu.shape[0]
    flat = np.empty(cap * f_max, dtype=np.int64)
    starts = np.zeros(cap + 1, dtype=np.int64)
    count = 0
    removed = np.zeros(m, dtype=np.bool_)
    idx = np.zeros(f_max, dtype=np.int64)
    for k in range(1, min(f_max, m) + 1):
        for j in range(k):
            idx[j] = j
        while True:
            for j in range(m):
                removed[j] = False
            for j in range(k):
                removed[idx[j]] = True
            superset = False
            for c in range(min(count, cap)):
                inside = True
                for p in range(starts[c], starts[c + 1]):
                    if not removed[flat[p]]:
                        inside = False
                        break
                if inside:
                    superset = True
                    break
            if not superset and _splits_escaping(n_nodes, eu, ev, removed, comp0,
                                                  escaping, n_comp0):
                if count < cap:
                    s = starts[count]
                    for j in range(k):
                        flat[s + j] = idx[j]
                    starts[count + 1] = s + k
                count += 1
                if count > cap:
                    return flat, starts, count
            # next combination
            j = k - 1
            while j >= 0 and idx[j] == m - k + j:
                j -= 1
            if j < 0:
                break
            idx[j] += 1
            for t in range(j + 1, k):
                idx[t] = idx[t - 1] + 1
    return flat, starts, count


# ---------------------------------------------------------------------------
# uniform spanning trees
# ---------------------------------------------------------------------------

@njit
def wilson_batch(indptr, indices, slot_edge, n_samples, start, out, uniforms):
    """Wilson's algorithm rooted at vertex 0, one tree per row of ``out``.

    Fills rows ``start..n_samples-1`` of ``out`` with edge ids, drawing from
    ``uniforms`` in order. Returns the first unfinished row, which is less than
    ``n_samples`` when the uniform buffer ran dry.
    """
    n = indptr.shape[0] - 1
    in_tree = np.zeros(n, dtype=np.bool_)
    nxt = np.zeros(n, dtype=np.int64)
    nxt_edge = np.zeros(n, dtype=np.int64)
    pos = 0
    n_u = uniforms.shape[0]
    for s in range(start, n_samples):
        for v in range(n):
            in_tree[v] = False
        in_tree[0] = True
        filled = 0
        for i in range(n):
            v = i
            while not in_tree[v]:
                if pos >= n_u:
                    return s
                deg = indptr[v + 1] - indptr[v]
                p = indptr[v] + int(uniforms[pos] * deg)
                pos += 1
                nxt[v] = indices[p]
                nxt_edge[v] = slot_edge[p]
                v = indices[p]
            v = i
            while not in_tree[v]:
                in_tree[v] = True
                out[s, filled] = nxt_edge[v]
                filled += 1
                v = nxt[v]
    return n_samples


# ---------------------------------------------------------------------------
# end-cut search on a frozen region
# ---------------------------------------------------------------------------

@njit
def _uf_find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit
def cut_problem(indptr, indices, slot_edge, ends_u, ends_v, complete, removed, x, R, H,
                dc, dg, parent, bedge):
    """Piece graph for the end-cut search around ``x``.

    The R-ball is taken in the graph minus ``removed``; pieces are the
    components of the region reachable from the ball without using ball
    edges, explored until graph distance ``H`` from ``x`` (such pieces escape).
    Returns ``(cand, eu, ev, comp0, escaping, n_comp0, status)`` where ``cand``
    lists the ball edges joining two different pieces and ``status`` is -1 if
    the search needed a vertex whose adjacency is not fully known.

    ``dc``, ``dg``, ``parent`` (all -1) and ``bedge`` (all False) are
    workspaces sized to the region; they are restored before returning.
    """
    status = 0
    # R-ball in the current graph
    ball = [x]
    dc[x] = 0
    head = 0
    while head < len(ball):
        v = ball[head]
        head += 1
        if dc[v] == R:
            continue
        if not complete[v]:
            status = -1
        for p in range(indptr[v], indptr[v + 1]):
            if removed[slot_edge[p]]:
                continue
            w = indices[p]
            if dc[w] < 0:
                dc[w] = dc[v] + 1
                ball.append(w)
    # distances from x in the full graph, up to H
    gq = [x]
    dg[x] = 0
    head = 0
    while head < len(gq):
        v = gq[head]
        head += 1
        if dg[v] == H:
            continue
        if not complete[v]:
            status = -1
        for p in range(indptr[v], indptr[v + 1]):
            w = indices[p]
            if dg[w] < 0:
                dg[w] = dg[v] + 1
                gq.append(w)
    be = []
    for v in ball:
        for p in range(indptr[v], indptr[v + 1]):
            e = slot_edge[p]
            if removed[e] or bedge[e] or dc[indices[p]] < 0:
                continue
            bedge[e] = True
            be.append(e)
    be_arr = np.sort(np.array(be, dtype=np.int64)) if len(be) else np.zeros(0, dtype=np.int64)
    # pieces: components of the region without ball edges
    region = list(ball)
    for v in ball:
        parent[v] = v
    head = 0
    while head < len(region):
        v = region[head]
        head += 1
        if dg[v] >= H or dg[v] < 0:
            continue
        if not complete[v]:
            status = -1
        for p in range(indptr[v], indptr[v + 1]):
            e = slot_edge[p]
            if removed[e] or bedge[e]:
                continue
            w = indices[p]
            if parent[w] < 0:
                parent[w] = w
                region.append(w)
            a = _uf_find(parent, v)
            b = _uf_find(parent, w)
            if a != b:
                parent[a] = b
    n_region = len(region)
    roots = np.empty(n_region, dtype=np.int64)
    for i in range(n_region):
        roots[i] = _uf_find(parent, region[i])
    uniq = np.unique(roots)
    n_pieces = uniq.shape[0]
    piece_of = np.searchsorted(uniq, roots)
    escaping = np.zeros(n_pieces, dtype=np.bool_)
    for i in range(n_region):
        v = region[i]
        if dg[v] >= H or dg[v] < 0:
            escaping[piece_of[i]] = True
    # piece index per region vertex, looked up through a sorted copy
    order = np.argsort(np.array(region, dtype=np.int64))
    sorted_region = np.array(region, dtype=np.int64)[order]

    n_be = be_arr.shape[0]
    cand = np.empty(n_be, dtype=np.int64)
    eu = np.empty(n_be, dtype=np.int64)
    ev = np.empty(n_be, dtype=np.int64)
    k = 0
    for i in range(n_be):
        e = be_arr[i]
        pa = piece_of[order[np.searchsorted(sorted_region, ends_u[e])]]
        pb = piece_of[order[np.searchsorted(sorted_region, ends_v[e])]]
        if pa != pb:
            cand[k] = e
            eu[k] = pa
            ev[k] = pb
            k += 1
    cand = cand[:k]
    eu = eu[:k]
    ev = ev[:k]

    p2 = np.arange(n_pieces)
    for i in range(k):
        a = _uf_find(p2, eu[i])
        b = _uf_find(p2, ev[i])
        if a != b:
            p2[a] = b
    comp0 = np.full(n_pieces, -1, dtype=np.int64)
    lab = np.full(n_pieces, -1, dtype=np.int64)
    n_comp0 = 0
    for i in range(n_pieces):
        r = _uf_find(p2, i)
        if lab[r] < 0:
            lab[r] = n_comp0
            n_comp0 += 1
        comp0[i] = lab[r]

    for v in ball:
        dc[v] = -1
    for v in gq:
        dg[v] = -1
    for v in region:
        parent[v] = -1
    for e in be:
        bedge[e] = False
    return cand, eu, ev, comp0, escaping, n_comp0, status


@njit
def factor_forest(n, eu, ev, removed):
    """True iff the removed edges join distinct components of the kept graph
    and, merged per component pair, form a forest on those components."""
    parent = np.arange(n)
    for e in range(eu.shape[0]):
        if not removed[e]:
            a = _uf_find(parent, eu[e])
            b = _uf_find(parent, ev[e])
            if a != b:
                parent[a] = b
    n_rem = 0
    for e in range(eu.shape[0]):
        if removed[e]:
            n_rem += 1
    keys = np.empty(n_rem, dtype=np.int64)
    k = 0
    for e in range(eu.shape[0]):
        if removed[e]:
            a = _uf_find(parent, eu[e])
            b = _uf_find(parent, ev[e])
            if a == b:
                return False
            if a > b:
                a, b = b, a
            keys[k] = a * n + b
            k += 1
    keys = np.unique(keys)
    p2 = np.arange(n)
    for i in range(keys.shape[0]):
        a = _uf_find(p2, keys[i] // n)
        b = _uf_find(p2, keys[i] % n)
        if a == b:
            return False
        p2[a] = b
    return True
