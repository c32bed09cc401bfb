"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from unimap.multigraph import MultiGraph


@st.composite
def multigraphs(draw, max_vertices=7, max_edges=12, connected=False, loops=False):
    n = draw(st.integers(1, max_vertices))
    edges = []
    if connected:
        for v in range(1, n):
            edges.append((draw(st.integers(0, v - 1)), v))
    extra = draw(st.integers(0, max(0, max_edges - len(edges))))
    for _ in range(extra):
        u = draw(st.integers(0, n - 1))
        v = draw(st.integers(0, n - 1))
        if u == v and not loops:
            continue
        edges.append((u, v))
    return MultiGraph(n, edges)
