"""Planar rotation systems and Whitney uniqueness for 3-connected graphs."""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .multigraph import GraphError, MultiGraph, is_k_connected
from .rotation import (RotationSystem, count_rotation_systems, enumerate_genus,
                       invert, randomize_bundles)

WHITNEY_MAX_VERTICES = 8
WHITNEY_MAX_EDGES = 14


@dataclass(frozen=True)
class EmbeddingResult:
    rs: RotationSystem | None
    planar: bool
    witness: list[int] | None = field(default=None)


def _simple_nx(g: MultiGraph) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(g.vertices())
    G.add_edges_from(g.bundles)
    return G


def planar_embed(g: MultiGraph) -> EmbeddingResult:
    """Genus-0 rotation system of ``g`` or a Kuratowski witness.

    The simple skeleton is embedded with the left-right planarity test from
    networkx; bundles are then laid out consecutively. The witness lists the
    smallest edge id of every skeleton edge of a K5 or K3,3 subdivision.
    """
    if not g.is_connected():
        raise GraphError("graph is disconnected")
    planar, emb = nx.check_planarity(_simple_nx(g), counterexample=True)
    if not planar:
        witness = sorted(g.bundles[(min(u, v), max(u, v))][0] for u, v in emb.edges())
        return EmbeddingResult(None, False, witness)
    orders = {v: list(emb.neighbors_cw_order(v)) for v in g.vertices() if g.degree(v)}
    return EmbeddingResult(RotationSystem.from_neighbor_orders(g, orders), True)


def whitney_check(g: MultiGraph) -> bool:
    """Exhaustively confirm the two-embedding theorem on a small graph.

    Enumerates every rotation system of the simplification and returns True
    iff exactly two have genus 0 and they are inverse to each other.
    """
    s, _ = g.simplify()
    if s.n_vertices > WHITNEY_MAX_VERTICES and s.n_edges > WHITNEY_MAX_EDGES:
        raise GraphError(
            f"enumeration guard exceeded ({s.n_vertices} vertices, {s.n_edges} edges)")
    if not is_k_connected(s, 3):
        raise GraphError("not 3-connected")
    hist, hits = enumerate_genus(s, 0, keep=3)
    if hist.get(0, 0) != 2:
        return False
    return invert(hits[0]) == hits[1]


def whitney_census(g: MultiGraph) -> dict:
    """Counts behind :func:`whitney_check`, for reporting."""
    s, _ = g.simplify()
    hist, _ = enumerate_genus(s, 0, keep=2)
    return {"rotation_systems": count_rotation_systems(s), "genus_histogram": hist}


def uniform_planar_embedding(g: MultiGraph, rng_seed, chirality: str = "coin") -> RotationSystem:
    """One of the two planar embeddings of a 3-connected planar graph, each
    with probability 1/2, with bundles shuffled uniformly.

    ``chirality='fix'`` always keeps the embedding returned by
    :func:`planar_embed`; bundles are still shuffled.
    """
    if chirality not in ("coin", "fix"):
        raise ValueError("chirality must be 'coin' or 'fix'")
    if not is_k_connected(g, 3):
        raise GraphError("not 3-connected")
    res = planar_embed(g)
    if not res.planar:
        raise GraphError("graph is not planar")
    rng = np.random.default_rng(rng_seed)
    flip, bundle_seed = rng.integers(0, 2), rng.integers(0, 2**63)
    rs = res.rs
    if chirality == "coin" and flip:
        rs = invert(rs)
    return randomize_bundles(rs, int(bundle_seed))
