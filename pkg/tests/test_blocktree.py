import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from unimap.blocktree import (CYCLE, MULTILINK, THREE_CONNECTED, AmalgamSpec, BlockTreeError,
                              check_tree, decompose_3blocks, edge_amalgam, isomorphic_with_edge_ids,
                              order_invariance_check, reconstruct, tree_from_text, tree_to_text)
from unimap.generators import NAMED, cycle_graph, random_2connected_planar, theta, wheel
from unimap.multigraph import GraphError, MultiGraph

HAND = {
    "K4": NAMED["K4"](),
    "prism": NAMED["prism"](),
    "two-triangles": NAMED["two-triangles"](),
    "theta3": theta(3, 2),
    "theta4x3": theta(4, 3),
    "C5": cycle_graph(5),
    "C5-chord": MultiGraph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]),
    "triple-edge": MultiGraph(2, [(0, 1)] * 3),
    "W6": wheel(6),
    "cube": NAMED["cube"](),
    "K4-doubled": MultiGraph(4, [(0, 1), (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (2, 3)]),
}

# (cycle, multilink, three_connected): hand-derived from the Tutte splits
EXPECTED_KINDS = {
    "K4": (0, 0, 1),
    "two-triangles": (2, 1, 0),
    "theta3": (3, 1, 0),
    "C5": (1, 0, 0),
    "C5-chord": (2, 1, 0),
    "triple-edge": (0, 1, 0),
    "K4-doubled": (0, 2, 1),
}


def kinds(T):
    c = T.kind_counts()
    return c[CYCLE], c[MULTILINK], c[THREE_CONNECTED]


@pytest.mark.parametrize("name", sorted(HAND))
def test_hand_roundtrip(name):
    g = HAND[name]
    T = decompose_3blocks(g)
    check_tree(T)
    assert isomorphic_with_edge_ids(g, reconstruct(T))
    assert isomorphic_with_edge_ids(g, reconstruct(tree_from_text(tree_to_text(T))))


@pytest.mark.parametrize("name", sorted(EXPECTED_KINDS))
def test_kind_counts(name):
    assert kinds(decompose_3blocks(HAND[name])) == EXPECTED_KINDS[name]


def test_edge_bookkeeping():
    for g in HAND.values():
        T = decompose_3blocks(g)
        assert sum(b.graph.n_edges for b in T.blocks) == g.n_edges + 2 * len(T.links)
        assert len(T.links) == len(T.blocks) - 1


@given(st.integers(0, 10**7))
def test_random_roundtrip(seed):
    g = random_2connected_planar(seed)
    T = decompose_3blocks(g)
    check_tree(T)
    assert isomorphic_with_edge_ids(g, reconstruct(T))


@given(st.integers(0, 10**7), st.integers(0, 10**6))
def test_decomposition_invariant_under_vertex_relabel(seed, s):
    g = random_2connected_planar(seed)
    perm = list(range(g.n_vertices))
    random.Random(s).shuffle(perm)
    h = g.relabeled(perm)
    a, b = decompose_3blocks(g), decompose_3blocks(h)
    assert kinds(a) == kinds(b)
    assert sorted(sorted(x.real_edges()) for x in a.blocks) == sorted(sorted(x.real_edges()) for x in b.blocks)


@given(st.integers(0, 10**7))
def test_no_adjacent_blocks_of_same_kind(seed):
    T = decompose_3blocks(random_2connected_planar(seed))
    for lk in T.links:
        ka, kb = T.blocks[lk.alpha].kind, T.blocks[lk.beta].kind
        assert not (ka == kb and ka in (CYCLE, MULTILINK))


@given(st.integers(0, 10**7))
def test_reconstruction_order_free(seed):
    assert order_invariance_check(decompose_3blocks(random_2connected_planar(seed)), 4, seed)


def test_rejects_small_or_separable():
    with pytest.raises(GraphError):
        decompose_3blocks(MultiGraph(2, [(0, 1), (0, 1)]))
    with pytest.raises(GraphError):
        decompose_3blocks(NAMED["bowtie"]())


def test_edge_amalgam_of_two_triangles():
    t = cycle_graph(3)
    am = edge_amalgam(t, t, AmalgamSpec(0, 0, 1, 0, 0, 1))
    assert am.graph.n_vertices == 4 and am.graph.n_edges == 4
    assert am.a_edges[0] == -1 and am.b_edges[0] == -1
    with pytest.raises(BlockTreeError):
        edge_amalgam(t, t, AmalgamSpec(0, 0, 2, 0, 0, 1))


def test_isomorphism_with_edge_ids():
    g = MultiGraph(3, [(0, 1), (1, 2)])
    assert isomorphic_with_edge_ids(g, MultiGraph(3, [(2, 0), (0, 1)]))
    assert isomorphic_with_edge_ids(g, MultiGraph(3, [(0, 1), (0, 2)]))
    assert not isomorphic_with_edge_ids(MultiGraph(4, [(0, 1), (1, 2)]), MultiGraph(4, [(0, 1), (2, 3)]))
    assert not isomorphic_with_edge_ids(MultiGraph(2, [(0, 1), (0, 1)]), MultiGraph(3, [(0, 1), (1, 2)]))
