import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from unimap.generators import NAMED, delaunay_window, stacked_triangulation
from unimap.multigraph import GraphError, MultiGraph
from unimap.planar3 import planar_embed, uniform_planar_embedding, whitney_census, whitney_check
from unimap.rotation import genus, invert

WHITNEY_CORPUS = ("K4", "prism", "octahedron", "cube", "W5", "W6")


@pytest.mark.parametrize("name", WHITNEY_CORPUS)
def test_two_embeddings(name):
    assert whitney_check(NAMED[name]())


def test_census_counts_frozen():
    # (deg-1)! products: K4 has 2^4, the cube 2^8, the octahedron 6^6
    assert whitney_census(NAMED["K4"]())["rotation_systems"] == 16
    assert whitney_census(NAMED["cube"]())["rotation_systems"] == 256
    c = whitney_census(NAMED["octahedron"]())
    assert c["rotation_systems"] == 6**6 and c["genus_histogram"][0] == 2


def test_whitney_rejects_non_3connected():
    with pytest.raises(GraphError):
        whitney_check(NAMED["C5"]())


@pytest.mark.parametrize("name", ["K5", "K33"])
def test_kuratowski_witness(name):
    res = planar_embed(NAMED[name]())
    assert not res.planar and res.rs is None
    g = NAMED[name]()
    H = nx.Graph([g.endpoints(e) for e in res.witness])
    assert not nx.check_planarity(H)[0]


@pytest.mark.parametrize("g", [stacked_triangulation(40, 1), delaunay_window(60, 2), NAMED["icosahedron"]()])
def test_planar_embed_genus_zero(g):
    assert genus(planar_embed(g).rs) == 0


@given(st.integers(0, 2**32))
def test_uniform_embedding_is_one_of_two(seed):
    g = NAMED["prism"]()
    ref = planar_embed(g).rs
    rs = uniform_planar_embedding(g, seed)
    assert rs in (ref, invert(ref))
    assert uniform_planar_embedding(g, seed, "fix") == ref


def test_chirality_coin_is_fair():
    g = NAMED["K4"]()
    ref = planar_embed(g).rs
    hits = sum(uniform_planar_embedding(g, s) == ref for s in range(400))
    assert 160 < hits < 240  # binomial(400, 1/2) within 4 sd


def test_bundles_laid_out_planar():
    g = MultiGraph(4, [(0, 1), (0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)])
    assert genus(uniform_planar_embedding(g, 3)) == 0
