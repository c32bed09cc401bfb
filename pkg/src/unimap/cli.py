"""Command-line entry point: ``unimap {embed,blocktree,decompose,stats}``.

Exit codes: 0 ok, 1 a requested check failed, 2 bad input, 3 non-planar
graph, 4 graph not 2-connected, 5 oracle horizon exhausted.
"""

from __future__ import annotations

import argparse
import sys
from collections import Counter
from fractions import Fraction

from .amalgam_embed import NonPlanarError, embed_graph
from .blocktree import (BlockTreeError, decompose_3blocks, isomorphic_with_edge_ids,
                        reconstruct, tree_from_text, tree_to_text)
from .enddecomp import decompose, estimate_schedule
from .multigraph import GraphError, is_k_connected, read_graph
from .oracles import ORACLES, HorizonExhausted, make_oracle
from .rotation import genus, n_faces, rotation_to_text
from .unimodular_stats import (BUILTIN_TRANSPORTS, EmpiricalBallDistribution, mtp_check,
                               sample_balls, spanning_tree_count, tv_distance, wilson_ust_batch)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NONPLANAR, EXIT_NOT2CONN, EXIT_HORIZON = 0, 1, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _load_graph(path):
    try:
        return read_graph(path)
    except OSError as exc:
        raise CliError(EXIT_INPUT, f"cannot read {path}: {exc.strerror}") from None
    except GraphError as exc:
        raise CliError(EXIT_INPUT, f"{path}: {exc}") from None


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return repr(x)


class Output:
    """Report lines go to stdout; the main artifact goes to ``--out`` if set."""

    def __init__(self, out_path):
        self.out_path = out_path

    def artifact(self, text: str) -> None:
        if self.out_path:
            with open(self.out_path, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


# -- commands ---------------------------------------------------------------

def cmd_embed(args, out: Output) -> int:
    g = _load_graph(args.graph)
    try:
        rs = embed_graph(g, args.seed, args.chirality)
    except NonPlanarError as exc:
        print(f"nonplanar obstruction edges: {' '.join(map(str, exc.witness))}", file=sys.stderr)
        return EXIT_NONPLANAR
    except GraphError as exc:
        raise CliError(EXIT_INPUT, str(exc)) from None
    out.artifact(rotation_to_text(rs))
    print(f"genus={genus(rs)} faces={n_faces(rs)}")
    return EXIT_OK


def cmd_blocktree(args, out: Output) -> int:
    g = _load_graph(args.graph)
    if g.n_edges < 3 or not is_k_connected(g, 2):
        print("graph is not 2-connected with at least 3 edges", file=sys.stderr)
        return EXIT_NOT2CONN
    try:
        T = decompose_3blocks(g)
    except (BlockTreeError, GraphError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NOT2CONN
    text = tree_to_text(T)
    out.artifact(text)
    counts = T.kind_counts()
    print(f"blocks={len(T.blocks)} " + " ".join(f"{k}={counts.get(k, 0)}" for k in sorted(counts)))
    if args.roundtrip:
        ok = isomorphic_with_edge_ids(g, reconstruct(tree_from_text(text)))
        print("OK" if ok else "FAIL")
        return EXIT_OK if ok else EXIT_FAIL
    return EXIT_OK


def cmd_decompose(args, out: Output) -> int:
    if args.oracle not in ORACLES:
        raise CliError(EXIT_INPUT, f"unknown oracle {args.oracle!r}; choose from {', '.join(sorted(ORACLES))}")
    try:
        schedules = estimate_schedule(make_oracle(args.oracle, 0, args.horizon), args.R_max,
                                      seed=args.seed)
        lines = []
        summary = Counter()
        for k in range(args.runs):
            seed = args.seed + k
            res = decompose(make_oracle(args.oracle, seed, args.horizon), args.R_max, seed,
                            f_max=args.f_max, H_esc=args.H_esc, window_radius=args.window,
                            schedules=schedules)
            if args.runs == 1:
                lines += res.report_lines()
            else:
                multi = res.n_multi_escaping()
                flags = " ".join(f"endcut_R{R}={'yes' if v else 'no'}"
                                 for R, v in sorted(res.endcut_at_origin.items()))
                lines.append(f"run seed={seed} components={len(res.components)} multi_escape={multi} "
                             f"{flags} forest={'OK' if res.forest else 'FAIL'} "
                             f"step_forest={'OK' if res.step_forest else 'FAIL'}")
                summary["no_multi"] += multi == 0
                summary["forest"] += res.forest
                summary["step_forest"] += res.step_forest
                for R, v in res.endcut_at_origin.items():
                    summary[f"endcut_R{R}"] += v
        if args.runs > 1:
            lines.append(f"summary runs={args.runs} no_multi_escape={summary['no_multi']} "
                         f"forest_ok={summary['forest']} step_forest_ok={summary['step_forest']} "
                         + " ".join(f"endcut_R{R}={summary[f'endcut_R{R}']}"
                                    for R in range(1, args.R_max + 1)))
    except HorizonExhausted as exc:
        print(f"horizon exhausted: {exc}", file=sys.stderr)
        return EXIT_HORIZON
    out.artifact("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_stats(args, out: Output) -> int:
    if args.which == "mtp":
        g = _load_graph(args.graph)
        if g.n_vertices == 0:
            raise CliError(EXIT_INPUT, "empty graph")
        res = mtp_check(g, BUILTIN_TRANSPORTS[args.f])
        out.artifact(f"lhs={_fmt(res.lhs)} rhs={_fmt(res.rhs)} equal={'yes' if res.equal else 'no'}\n")
        return EXIT_OK
    if args.which == "balls":
        if (args.graph is None) == (args.oracle is None):
            raise CliError(EXIT_INPUT, "give exactly one of a graph file or --oracle")
        if args.oracle is not None:
            if args.oracle not in ORACLES:
                raise CliError(EXIT_INPUT, f"unknown oracle {args.oracle!r}")
            try:
                dist = sample_balls(make_oracle(args.oracle, args.seed), args.r, args.samples)
            except HorizonExhausted as exc:
                print(f"horizon exhausted: {exc}", file=sys.stderr)
                return EXIT_HORIZON
        else:
            g = _load_graph(args.graph)
            if g.n_vertices == 0:
                raise CliError(EXIT_INPUT, "empty graph")
            dist = sample_balls(g, args.r, args.samples, args.seed)
        out.artifact(dist.to_text())
        return EXIT_OK
    if args.which == "tv":
        dists = []
        for path in (args.p, args.q):
            try:
                with open(path) as fh:
                    dists.append(EmpiricalBallDistribution.from_text(fh.read()))
            except OSError as exc:
                raise CliError(EXIT_INPUT, f"cannot read {path}: {exc.strerror}") from None
            except ValueError as exc:
                raise CliError(EXIT_INPUT, f"{path}: {exc}") from None
        try:
            d = tv_distance(*dists)
        except ValueError as exc:
            raise CliError(EXIT_INPUT, str(exc)) from None
        out.artifact(f"tv={_fmt(d)} ({float(d):.6f})\n")
        return EXIT_OK
    if args.which == "ust":
        g = _load_graph(args.graph)
        if g.n_vertices == 0 or not g.is_connected():
            raise CliError(EXIT_INPUT, "graph must be connected")
        rows = wilson_ust_batch(g, args.samples, args.seed)
        counts = Counter(tuple(r.tolist()) for r in rows)
        lines = [f"trees={spanning_tree_count(g)} samples={args.samples} distinct={len(counts)}"]
        for tree in sorted(counts):
            lines.append(" ".join(map(str, tree)) + f" : {counts[tree]}")
        out.artifact("\n".join(lines) + "\n")
        return EXIT_OK
    raise CliError(EXIT_INPUT, f"unknown stats command {args.which!r}")


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_u64, default=argparse.SUPPRESS,
                        help="64-bit unsigned seed (default 0)")
    common.add_argument("--out", default=argparse.SUPPRESS,
                        help="write the main output here instead of stdout")

    p = argparse.ArgumentParser(prog="unimap", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--out", default=None)
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("embed", parents=[common], help="planar rotation system of a graph file")
    e.add_argument("graph")
    e.add_argument("--chirality", choices=("coin", "fix"), default="coin")
    e.set_defaults(func=cmd_embed)

    b = sub.add_parser("blocktree", parents=[common], help="3-block tree of a 2-connected graph")
    b.add_argument("graph")
    b.add_argument("--roundtrip", action="store_true", help="rebuild from the tree file and compare")
    b.set_defaults(func=cmd_blocktree)

    d = sub.add_parser("decompose", parents=[common], help="end-cut decomposition on an oracle")
    d.add_argument("--oracle", required=True, help=", ".join(sorted(ORACLES)))
    d.add_argument("--R-max", dest="R_max", type=int, default=2)
    d.add_argument("--f-max", dest="f_max", type=int, default=6)
    d.add_argument("--H-esc", dest="H_esc", type=int, default=None,
                   help="escape radius (default: oracle-specific)")
    d.add_argument("--window", type=int, default=None, help="window radius (default 2*R_max)")
    d.add_argument("--horizon", type=int, default=64)
    d.add_argument("--runs", type=int, default=1, help="batch over seeds seed..seed+runs-1")
    d.set_defaults(func=cmd_decompose)

    s = sub.add_parser("stats", help="mass transport, ball statistics, spanning trees")
    ss = s.add_subparsers(dest="which", required=True)
    m = ss.add_parser("mtp", parents=[common])
    m.add_argument("graph")
    m.add_argument("--f", choices=sorted(BUILTIN_TRANSPORTS), default="adjacency")
    bl = ss.add_parser("balls", parents=[common])
    bl.add_argument("graph", nargs="?")
    bl.add_argument("--oracle", default=None)
    bl.add_argument("--r", type=int, default=2)
    bl.add_argument("--samples", type=int, default=None,
                    help="number of uniform roots (default: every vertex once)")
    t = ss.add_parser("tv", parents=[common])
    t.add_argument("p")
    t.add_argument("q")
    u = ss.add_parser("ust", parents=[common])
    u.add_argument("graph")
    u.add_argument("--samples", type=int, default=1000)
    s.set_defaults(func=cmd_stats)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, Output(args.out))
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
