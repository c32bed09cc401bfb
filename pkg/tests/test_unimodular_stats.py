import random
from fractions import Fraction
from itertools import combinations

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unimap.generators import NAMED, complete_graph, cycle_graph, grid_window, path_graph, theta
from unimap.multigraph import GraphError, MultiGraph
from unimap.oracles import make_oracle
from unimap.unimodular_stats import (BUILTIN_TRANSPORTS, EmpiricalBallDistribution, assemble_spanning_tree,
                                     ball_summary, canonical_code, enumerate_spanning_trees,
                                     is_spanning_tree, local_weak_distance, mtp_check, random_transport,
                                     sample_balls, spanning_tree_count, tv_distance, ust_uniformity,
                                     wilson_ust, wilson_ust_batch)

from strategies import multigraphs


# -- mass transport ----------------------------------------------------------------

def test_mtp_single_edge():
    r = mtp_check(MultiGraph(2, [(0, 1)]), BUILTIN_TRANSPORTS["adjacency"])
    assert (r.lhs, r.rhs, r.equal) == (1, 1, True)


@given(multigraphs(max_vertices=8, connected=True), st.integers(0, 2**32))
def test_mtp_exact_on_random_transports(g, seed):
    r = mtp_check(g, random_transport(seed))
    assert r.equal and isinstance(r.lhs, Fraction)


def test_mtp_builtin_values_frozen():
    # adjacency sends deg(o): mean degree 2|E|/|V|
    g = NAMED["bowtie"]()
    assert mtp_check(g, BUILTIN_TRANSPORTS["adjacency"]).lhs == Fraction(12, 5)


def test_mtp_rejects_negative_and_nan():
    with pytest.raises(ValueError):
        mtp_check(path_graph(2), lambda g, o, x: -1)
    with pytest.raises(ValueError):
        mtp_check(path_graph(2), lambda g, o, x: float("nan"))


def test_mtp_float_path():
    r = mtp_check(cycle_graph(5), lambda g, o, x: 0.1 * (o != x))
    assert r.equal and isinstance(r.lhs, float)


# -- canonical codes -----------------------------------------------------------------

def rooted_iso_nx(g, a, h, b):
    G, H = nx.MultiGraph(), nx.MultiGraph()
    G.add_nodes_from((v, {"root": v == a}) for v in g.vertices())
    H.add_nodes_from((v, {"root": v == b}) for v in h.vertices())
    G.add_edges_from(g.endpoints(e) for e in g.edges())
    H.add_edges_from(h.endpoints(e) for e in h.edges())
    return nx.is_isomorphic(G, H, node_match=lambda x, y: x["root"] == y["root"])


@given(multigraphs(max_vertices=9, max_edges=14, connected=True), st.integers(0, 10**6))
def test_code_invariant_under_relabel(g, s):
    perm = list(range(g.n_vertices))
    random.Random(s).shuffle(perm)
    root = s % g.n_vertices
    assert canonical_code(g, root) == canonical_code(g.relabeled(perm), perm[root])


@settings(max_examples=150)
@given(multigraphs(max_vertices=6, max_edges=8, connected=True),
       multigraphs(max_vertices=6, max_edges=8, connected=True))
def test_code_equality_matches_networkx(g, h):
    for a in g.vertices():
        for b in h.vertices():
            assert (canonical_code(g, a) == canonical_code(h, b)) == rooted_iso_nx(g, a, h, b)


def test_code_separates_hard_pairs():
    # cospectral-style: the 3-prism and K3,3 are both 3-regular on 6 vertices
    assert canonical_code(NAMED["prism"](), 0) != canonical_code(NAMED["K33"](), 0)
    # two 4-cycles vs an 8-cycle (both 2-regular): colour refinement alone cannot tell
    two_c4 = MultiGraph(8, [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4)])
    assert canonical_code(two_c4, 0) != canonical_code(cycle_graph(8), 0)
    # multiplicities count
    assert canonical_code(MultiGraph(2, [(0, 1)]), 0) != canonical_code(MultiGraph(2, [(0, 1)] * 2), 0)


# -- ball statistics -----------------------------------------------------------------

@pytest.mark.parametrize("n", [50, 100, 200])
def test_path_vs_oracle_tv(n):
    p = sample_balls(path_graph(n), 3)
    q = sample_balls(make_oracle("path"), 3)
    assert tv_distance(p, q) == Fraction(6, n)


def test_path_ball_types_frozen():
    # r=1 on P_100: interior vertices (98) and the two ends (2)
    d = sample_balls(path_graph(100), 1)
    assert sorted(d.counts.values()) == [2, 98]
    assert len(sample_balls(path_graph(100), 3).counts) == 4


def test_distribution_text_roundtrip():
    d = sample_balls(grid_window(4, 5), 2)
    assert EmpiricalBallDistribution.from_text(d.to_text()) == d
    assert tv_distance(d, d) == 0
    for bad in ("", "balls r=1\n", "balls r=1 n=2\nab 1\n"):
        with pytest.raises(ValueError):
            EmpiricalBallDistribution.from_text(bad)


def test_sampled_roots_deterministic():
    g = grid_window(6, 6)
    assert sample_balls(g, 1, 200, 3) == sample_balls(g, 1, 200, 3)


def test_tv_radius_mismatch():
    with pytest.raises(ValueError):
        tv_distance(sample_balls(path_graph(5), 1), sample_balls(path_graph(5), 2))


def test_local_weak_distance():
    assert local_weak_distance(cycle_graph(10), 0, cycle_graph(12), 0) == Fraction(1, 2**4)
    # the r=1 balls differ (C3 has an edge between the neighbours)
    assert local_weak_distance(path_graph(3), 1, cycle_graph(3), 0) == 1
    assert local_weak_distance(path_graph(5), 2, cycle_graph(8), 0) == Fraction(1, 4)
    assert local_weak_distance(cycle_graph(9), 0, cycle_graph(9), 4, r_max=6) == Fraction(1, 64)


def test_ball_summary_hex():
    assert ball_summary(path_graph(3), 1, 1).hex() == ball_summary(path_graph(5), 2, 1).hex()


# -- spanning trees -----------------------------------------------------------------

@given(multigraphs(max_vertices=5, max_edges=8, connected=True))
def test_matrix_tree_matches_enumeration(g):
    trees = enumerate_spanning_trees(g)
    assert spanning_tree_count(g) == len(trees)
    assert all(is_spanning_tree(g, t) for t in trees)


def test_tree_counts_frozen():
    # Cayley n^(n-2); cycle n; theta(3,2) has 3 * 2^2 = 12
    assert spanning_tree_count(complete_graph(5)) == 125
    assert spanning_tree_count(cycle_graph(7)) == 7
    assert spanning_tree_count(theta(3, 2)) == 12
    assert spanning_tree_count(MultiGraph(2, [(0, 1)] * 3)) == 3


@given(multigraphs(max_vertices=6, connected=True), st.integers(0, 2**32))
def test_wilson_outputs_spanning_trees(g, seed):
    for t in wilson_ust_batch(g, 20, seed):
        assert is_spanning_tree(g, t.tolist())
    assert wilson_ust(g, seed) == wilson_ust(g, seed)


def test_wilson_uniform_on_k4():
    t = ust_uniformity(complete_graph(4), 16000, 1)
    assert t.n_trees == 16 and t.unseen == 0 and t.passes()


def test_assemble_on_partition():
    g = grid_window(4, 4)
    parts = [[0, 1, 4, 5], [2, 3, 6, 7], [8, 9, 12, 13], [10, 11, 14, 15]]
    # factor graph is a 4-cycle: rejected
    with pytest.raises(GraphError):
        assemble_spanning_tree(g, parts, 0)
    parts = [list(range(8)), [8, 9, 12, 13], [10, 11, 14, 15]]
    # parts 1 and 2 both touch part 0 and each other: triangle, rejected
    with pytest.raises(GraphError):
        assemble_spanning_tree(g, parts, 0)
    parts = [list(range(4)), list(range(4, 12)), list(range(12, 16))]
    for s in range(10):
        assert is_spanning_tree(g, assemble_spanning_tree(g, parts, s))


def test_assemble_rejects_disconnected_part():
    g = path_graph(4)
    with pytest.raises(GraphError):
        assemble_spanning_tree(g, [[0, 2], [1], [3]], 0)
