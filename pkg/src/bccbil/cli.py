"""Command-line interface.

Exit codes: 0 success, 2 bad flags, 3 enumeration guard refused, 4 I/O or
malformed input file.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import formats
from .bench import rows_to_csv, run_bench
from .epsnet import Exact, Sampled
from .errors import GuardError, InvalidInputError
from .exact import max_agree_exact
from .graph import count_agreements, from_ratings, generate_planted
from .solver import SolverConfig, bcc_ptas, kbcc, kbcc_core, kbcc_parameters, ptas_parameters

EXIT_FLAGS = 2
EXIT_GUARD = 3
EXIT_IO = 4


class FlagError(Exception):
    pass


def _dump(obj, out=None):
    text = json.dumps(obj, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def cmd_gen(args):
    if not 0.0 <= args.p <= 1.0:
        raise FlagError(f"--p must lie in [0, 1], got {args.p}")
    if args.k_true < 1 or args.m < 1 or args.n < 1:
        raise FlagError("--m, --n and --k-true must be >= 1")
    g, planted = generate_planted(args.m, args.n, args.k_true, args.p, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    graph_path = out / "instance.tsv"
    planted_path = out / "planted.json"
    formats.write_edge_list(g, graph_path)
    formats.write_clustering(planted, planted_path)
    _dump({"planted_agreements": count_agreements(g, planted), "graph": str(graph_path), "planted": str(planted_path)})


def _candidate_mode(args, eps_default=None):
    if args.eps is not None and args.budget is not None:
        raise FlagError("--eps and --budget are mutually exclusive")
    if args.exact or args.eps is not None:
        eps = args.eps if args.eps is not None else eps_default
        if eps is None:
            raise FlagError("exact search needs --eps")
        return Exact(eps, anchored=not args.full_product)
    return Sampled(args.budget if args.budget is not None else 10_000)


def cmd_solve(args):
    if args.budget is not None and args.budget < 1:
        raise FlagError("--budget must be >= 1")
    if args.mode == "core":
        if args.delta is not None:
            raise FlagError("--delta cannot be combined with --mode core")
        if args.k is None or args.r is None:
            raise FlagError("--mode core needs --k and --r")
        if args.eps is not None and not 0.0 < args.eps < 1.0:
            raise FlagError("--eps must lie in (0, 1)")
        try:
            cfg = SolverConfig(k=args.k, r=args.r, mode=_candidate_mode(args), seed=args.seed, finalize_on=args.finalize)
        except InvalidInputError as exc:
            raise FlagError(str(exc)) from exc
        g = formats.read_edge_list(args.input)
        report = kbcc_core(g, cfg)
    else:
        if args.delta is None:
            raise FlagError(f"--mode {args.mode} needs --delta")
        if args.r is not None or args.eps is not None:
            raise FlagError("--delta cannot be combined with --r or --eps")
        if not 0.0 < args.delta < 1.0:
            raise FlagError("--delta must lie in (0, 1)")
        if args.mode == "kbcc" and (args.k is None or args.k < 2):
            raise FlagError("--mode kbcc needs --k >= 2")
        if args.mode == "ptas" and args.k is not None:
            raise FlagError("--mode ptas derives k from --delta; drop --k")
        mode = "exact" if args.exact else Sampled(args.budget if args.budget is not None else 10_000)
        if args.exact and args.full_product:
            mode = None
        g = formats.read_edge_list(args.input)
        if args.mode == "kbcc":
            if mode is None:
                mode = Exact(kbcc_parameters(args.k, args.delta)[0], anchored=False)
            report = kbcc(g, args.k, args.delta, mode=mode, seed=args.seed, finalize_on=args.finalize)
        else:
            if mode is None:
                mode = Exact(ptas_parameters(args.delta)[1], anchored=False)
            report = bcc_ptas(g, args.delta, mode=mode, seed=args.seed, finalize_on=args.finalize)
    _dump(report.to_dict(timings=args.timings), args.out)


def cmd_exact(args):
    if args.k < 1:
        raise FlagError("--k must be >= 1")
    g = formats.read_edge_list(args.input)
    opt, best = max_agree_exact(g, args.k)
    _dump({"opt": opt, **formats.clustering_to_dict(best)}, args.out)


def cmd_eval(args):
    g = formats.read_edge_list(args.input)
    c = formats.read_clustering(args.clustering)
    _dump({"agreements": count_agreements(g, c)}, args.out)


def cmd_bench(args):
    if any(not 0.0 <= p <= 1.0 for p in args.p):
        raise FlagError("--p values must lie in [0, 1]")
    if args.instances < 1 or args.budget < 1 or args.r < 1 or any(k < 1 for k in args.k):
        raise FlagError("--instances, --budget, --r and --k must be >= 1")
    rows = run_bench(args.m, args.n, args.k_true, args.p, args.instances, args.k, args.r, args.budget, args.seed)
    csv_text = rows_to_csv(rows, timings=args.timings)
    payload = {
        "m": args.m,
        "n": args.n,
        "k_true": args.k_true,
        "r": args.r,
        "budget": args.budget,
        "seed": args.seed,
        "rows": [row.as_dict(args.timings) for row in rows],
    }
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "bench.csv").write_text(csv_text, encoding="utf-8")
        _dump(payload, out / "bench.json")
    sys.stdout.write(csv_text)


def cmd_ingest(args):
    threshold = args.threshold
    if threshold != "mean":
        try:
            threshold = float(threshold)
        except ValueError:
            raise FlagError(f"--threshold must be 'mean' or a number, got {threshold!r}")
    delim = "\t" if args.delimiter in ("\\t", "tab") else args.delimiter
    rg = from_ratings(formats.iter_ratings(args.ratings, delim, args.skip_header), threshold)
    formats.write_edge_list(rg.graph, args.out)
    if args.ids_out:
        _dump({"users": list(rg.user_ids), "items": list(rg.item_ids)}, args.ids_out)
    g = rg.graph
    _dump({"m": g.m, "n": g.n, "nnz": g.nnz, "positive": g.pos_count, "negative": g.neg_count, "threshold": rg.threshold})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bccbil", description="Bipartite correlation clustering (MaxAgree).")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a planted instance")
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--k-true", type=int, default=5)
    p.add_argument("--p", type=float, default=0.0, help="sign flip probability")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run the bilinear k-BCC solver")
    p.add_argument("--input", required=True, help="edge-list file")
    p.add_argument("--mode", choices=["core", "kbcc", "ptas"], default="core")
    p.add_argument("--k", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--r", type=int)
    p.add_argument("--eps", type=float, help="core mode: walk the epsilon-net with this accuracy")
    p.add_argument("--budget", type=int, help="number of sampled candidates (default 10000)")
    p.add_argument("--exact", action="store_true", help="kbcc/ptas: walk the epsilon-net instead of sampling")
    p.add_argument("--full-product", action="store_true", help="use the plain net^k product, not the anchored net")
    p.add_argument("--finalize", choices=["original", "lowrank"], default="original")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timings", action="store_true", help="include phase timings (breaks byte-identical output)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("exact", help="brute-force optimum for tiny graphs")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("eval", help="count agreements of a clustering")
    p.add_argument("--input", required=True)
    p.add_argument("--clustering", required=True, help="clustering JSON (a solve report also works)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="planted-instance sweep over p and k")
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--k-true", type=int, default=5)
    p.add_argument("--p", type=_float_list, default=[0.0, 0.1, 0.2, 0.3, 0.4, 0.5])
    p.add_argument("--instances", type=int, default=10)
    p.add_argument("--k", type=_int_list, default=[5])
    p.add_argument("--r", type=int, default=5)
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timings", action="store_true")
    p.add_argument("--out", help="directory for bench.csv and bench.json")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("ingest", help="threshold a ratings file into an edge list")
    p.add_argument("--ratings", required=True)
    p.add_argument("--delimiter", default=",", help="field separator: ',', '::', 'tab', ...")
    p.add_argument("--skip-header", action="store_true")
    p.add_argument("--threshold", default="mean")
    p.add_argument("--out", required=True, help="edge-list output path")
    p.add_argument("--ids-out", help="JSON file for the external id tables")
    p.set_defaults(func=cmd_ingest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except FlagError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    except GuardError as exc:
        print(f"{parser.prog} {args.command}: refused: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (OSError, InvalidInputError) as exc:
        print(f"{parser.prog} {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
