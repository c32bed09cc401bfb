"""The numba kernels and the plain-Python fallback must agree bit for bit."""

import os
import subprocess
import sys

PROBE = r"""
from unimap._accel import backend
from unimap.enddecomp import decompose, enumerate_min_endcuts
from unimap.generators import NAMED, complete_graph, delaunay_window
from unimap.multigraph import is_k_connected, r_closure
from unimap.oracles import make_oracle
from unimap.rotation import enumerate_genus, n_faces
from unimap.amalgam_embed import embed_graph
from unimap.unimodular_stats import wilson_ust_batch
print(backend())
print(enumerate_genus(NAMED["prism"](), 0)[0])
print(n_faces(embed_graph(delaunay_window(40, 1), 3)))
print(is_k_connected(NAMED["cube"](), 3), r_closure(NAMED["cube"](), 2).n_edges)
print(wilson_ust_batch(complete_graph(5), 5, 7).tolist())
print([c.edges for c in enumerate_min_endcuts(make_oracle("ladder"), (0, 0), 2, 4)])
print(decompose(make_oracle("ladder", 3), 2, 3).report_lines())
"""


def _probe(disable):
    env = dict(os.environ)
    env.pop("UNIMAP_DISABLE_NUMBA", None)
    if disable:
        env["UNIMAP_DISABLE_NUMBA"] = "1"
    proc = subprocess.run([sys.executable, "-c", PROBE], capture_output=True, text=True, env=env,
                          timeout=600)
    assert proc.returncode == 0, proc.stderr
    return proc.stdout.splitlines()


def test_fallback_matches_numba():
    fast, slow = _probe(False), _probe(True)
    assert fast[0] == "numba" and slow[0] == "python"
    assert fast[1:] == slow[1:]
