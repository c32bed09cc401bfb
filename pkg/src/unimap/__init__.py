"""Planar embeddings, 3-block trees and end-cut decompositions of unimodular graphs."""

from .multigraph import GraphError, MultiGraph, graph_from_text, graph_to_text, read_graph
from .rotation import RotationSystem, genus, n_faces
from .amalgam_embed import NonPlanarError, embed_graph
from .blocktree import decompose_3blocks
from .enddecomp import decompose, enumerate_min_endcuts
from .oracles import HorizonExhausted, make_oracle

__version__ = "0.1.0"
