"""Time the hot kernels with numba and with the plain-Python fallback.

Each backend runs in its own interpreter because the switch is read at
import time. Usage: ``python3 benchmarks/bench_kernels.py [--repeat N]``.
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
from unimap._accel import backend
from unimap.enddecomp import decompose, enumerate_min_endcuts, estimate_schedule
from unimap.generators import NAMED, complete_graph, delaunay_window
from unimap.multigraph import is_k_connected, r_closure
from unimap.oracles import make_oracle
from unimap.rotation import enumerate_genus
from unimap.unimodular_stats import wilson_ust_batch

repeat = int(sys.argv[1])
tri = delaunay_window(400, 0)
ladder_sched = estimate_schedule(make_oracle("ladder"), 2, n_roots=100)
cases = {
    "enumerate_rotation_faces (cube)": lambda: enumerate_genus(NAMED["cube"](), 0),
    "bfs closure R=2 (400-vertex triangulation)": lambda: r_closure(tri, 2),
    "separation pair scan (icosahedron)": lambda: is_k_connected(NAMED["icosahedron"](), 3),
    "wilson_batch (K5, 2000 trees)": lambda: wilson_ust_batch(complete_graph(5), 2000, 1),
    "min end-cuts (freeprod R=2)": lambda: enumerate_min_endcuts(make_oracle("freeprod-triangle"), (), 2, 4),
    "decompose (ladder R_max=2)": lambda: decompose(make_oracle("ladder", 1), 2, 1, schedules=ladder_sched),
}
out = {"backend": backend(), "times": {}}
for name, fn in cases.items():
    fn()  # warm-up: compilation / cache load and region construction
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    out["times"][name] = best
print(json.dumps(out))
"""


def run(disable: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("UNIMAP_DISABLE_NUMBA", None)
    if disable:
        env["UNIMAP_DISABLE_NUMBA"] = "1"
    proc = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    fast = run(False, args.repeat)
    slow = run(True, args.repeat)
    width = max(map(len, fast["times"]))
    print(f"{'kernel':<{width}}  {fast['backend']:>10}  {slow['backend']:>10}  speedup")
    for name, t in fast["times"].items():
        s = slow["times"][name]
        print(f"{name:<{width}}  {t * 1e3:8.2f}ms  {s * 1e3:8.2f}ms  {s / t:7.1f}x")


if __name__ == "__main__":
    main()
