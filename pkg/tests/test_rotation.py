import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from unimap.generators import NAMED, complete_graph, cycle_graph, path_graph, theta
from unimap.multigraph import MultiGraph
from unimap.planar3 import planar_embed
from unimap.rotation import (RotationError, RotationSystem, count_rotation_systems, enumerate_genus,
                             genus, invert, n_faces, randomize_bundles, rotation_from_text,
                             rotation_to_text, trace_faces)

from strategies import multigraphs


def random_rotation(g, rnd):
    orders = {}
    for v in g.vertices():
        darts = list(g.darts_at(v))
        rnd.shuffle(darts)
        if darts:
            orders[v] = darts
    return RotationSystem.from_orders(g, orders)


def count_faces_by_hand(g, rs):
    """Independent face walk: leave along d, arrive at the twin, turn to its successor."""
    nxt = {}
    for v in g.vertices():
        order = list(rs.order_at(v))
        for a, b in zip(order, order[1:] + order[:1]):
            nxt[a] = b
    seen, faces = set(), 0
    for d in range(g.n_darts):
        if d in seen:
            continue
        faces += 1
        while d not in seen:
            seen.add(d)
            d = nxt[d ^ 1]
    return faces


@given(multigraphs(max_vertices=6, max_edges=10, connected=True), st.integers(0, 10**6))
def test_face_count_matches_hand_walk(g, s):
    rs = random_rotation(g, random.Random(s))
    # an edgeless graph is a sphere with one face
    assert n_faces(rs) == max(count_faces_by_hand(g, rs), 1)
    # Euler bound: genus is a nonnegative integer
    assert genus(rs) >= 0


@given(multigraphs(max_vertices=6, max_edges=10, connected=True), st.integers(0, 10**6))
def test_invert_preserves_faces_and_is_involution(g, s):
    rs = random_rotation(g, random.Random(s))
    assert invert(invert(rs)) == rs
    assert n_faces(invert(rs)) == n_faces(rs)


def test_face_lengths_sum_to_darts():
    g = complete_graph(4)
    fs = trace_faces(random_rotation(g, random.Random(1)))
    assert sum(fs.lengths()) == g.n_darts


def test_rejects_non_cycles():
    g = path_graph(3)
    with pytest.raises(RotationError):
        RotationSystem(g, [0, 1, 2])
    with pytest.raises(RotationError):
        RotationSystem(g, [0, 3, 1, 2])  # darts 1 and 2 sit at vertex 1 but 3 is at vertex 2


@pytest.mark.parametrize("name,hist0", [("K4", 2), ("prism", 2), ("octahedron", 2), ("cube", 2), ("W5", 2)])
def test_enumeration_histogram_totals(name, hist0):
    g = NAMED[name]()
    hist, hits = enumerate_genus(g, 0, keep=4)
    assert sum(hist.values()) == count_rotation_systems(g)
    assert hist[0] == hist0 and invert(hits[0]) == hits[1]


def test_k4_genus_histogram_frozen():
    # 2^4 = 16 rotation systems: 2 planar, 14 toroidal (no K4 embedding has genus 2 faces<2)
    hist, _ = enumerate_genus(complete_graph(4), 0)
    assert hist == {0: 2, 1: 14}


def test_cycle_has_single_planar_system():
    hist, _ = enumerate_genus(cycle_graph(6), 0)
    assert hist == {0: 1}


def test_text_roundtrip():
    g = theta(3, 2)
    rs = random_rotation(g, random.Random(0))
    assert rotation_from_text(rotation_to_text(rs), g) == rs


def test_randomize_bundles_keeps_genus():
    g = MultiGraph(3, [(0, 1), (0, 1), (0, 1), (1, 2), (1, 2), (0, 2)])
    rs = planar_embed(g).rs
    assert genus(rs) == 0
    for s in range(20):
        assert genus(randomize_bundles(rs, s)) == 0


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_randomize_bundles_property(gseed, s):
    from unimap.generators import random_2connected_planar
    g = random_2connected_planar(gseed)
    rs = planar_embed(g).rs
    out = randomize_bundles(rs, s)
    assert genus(out) == 0
    assert sorted(trace_faces(out).lengths()) == sorted(trace_faces(rs).lengths())
