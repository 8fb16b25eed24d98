"""Command-line interface: ``sparsestress {layout,metrics,bench,render,info,generate}``.

Graph arguments are file paths (edge list or MatrixMarket) or generator
specs such as ``gen:btree:9``, ``gen:grid:100x100``, ``gen:path:5``.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import graph as gmod
from .errors import ConfigError, SparseStressError
from .layout_io import read_layout, write_layout, write_rows, write_trace
from .metrics import PairTable, evaluate, normalized_stress, procrustes_statistic
from .pipeline import ALGORITHMS, INIT_PIVOTS, evaluated_stress, median_index, run_layout
from .render import write_svg
from .sampling import STRATEGIES
from .solvers import SolverConfig, condensed_distances

log = logging.getLogger("sparsestress")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 6
BENCH_HEADER = ("graph", "sampler", "k", "seed", "normalized_stress", "procrustes", "elapsed_ms")
SUMMARY_HEADER = ("seed", "evaluated_stress", "normalized_stress", "sweeps", "converged",
                  "elapsed_ms", "selected")


def load_graph(spec: str, fmt: str | None = None, keep_all: bool = False) -> gmod.Graph:
    if spec.startswith("gen:"):
        kind, _, params = spec[4:].partition(":")
        args = [int(p) for p in params.replace("x", ":").split(":") if p] if params else []
        g = gmod.generate(kind, *args)
    else:
        g = gmod.read_graph(spec, fmt)
    if keep_all:
        return g
    lc = gmod.largest_component(g)
    if lc.node_count != g.node_count:
        log.info("kept largest component: %d of %d nodes", lc.node_count, g.node_count)
    return lc


def _graph_name(spec: str) -> str:
    return spec[4:] if spec.startswith("gen:") else Path(spec).stem


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text: str) -> list[str]:
    return [t for t in text.split(",") if t]


def _worker_count(args) -> int:
    if getattr(args, "deterministic", False):
        return 1
    env = os.environ.get("SPARSE_STRESS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"SPARSE_STRESS_THREADS must be an integer, got {env!r}") from None
    return max(1, os.cpu_count() or 1)


def _solver_cfg(args, seed: int) -> SolverConfig:
    return SolverConfig(max_iters=args.max_iters, eps=args.eps, seed=seed, dim=args.dim)


def _pairs_for(g, args, seed):
    if args.sample_pairs:
        return PairTable.sample(g, args.sample_pairs, seed)
    return PairTable.from_graph(g)


def cmd_layout(args) -> int:
    g = load_graph(args.graph, args.format)
    if args.algo == "sparse":
        if args.k is None or args.k < 1:
            raise ConfigError("--algo sparse needs --k >= 1")
        if args.k > g.node_count:
            raise ConfigError(f"--k {args.k} exceeds n={g.node_count}")
    if args.reps < 1 or args.time_reps < 1:
        raise ConfigError("--reps and --time-reps must be >= 1")
    dcond = condensed_distances(g) if args.algo == "full" else None
    pairs = _pairs_for(g, args, args.seed) if args.reps > 1 else None

    runs, rows = [], []
    for seed in range(args.seed, args.seed + args.reps):
        elapsed = []
        for _ in range(args.time_reps):
            run = run_layout(g, args.algo, seed, args.k, args.sampler, _solver_cfg(args, seed),
                             args.init_pivots, dcond=dcond)
            elapsed.append(run.elapsed_ms)
        run.elapsed_ms = float(np.mean(elapsed))
        runs.append(run)
        if pairs is not None:
            rows.append([seed, evaluated_stress(run.layout, pairs),
                         normalized_stress(run.layout, pairs)])
    pick = median_index([r[1] for r in rows]) if rows else 0
    best = runs[pick]

    out = Path(args.out)
    write_layout(out, g, best.layout)
    if best.result is not None:
        write_trace(args.trace or out.with_suffix(".trace.csv"), best.result)
    if args.svg:
        write_svg(args.svg, g, best.layout)
    if rows:
        summary = []
        for i, (row, run) in enumerate(zip(rows, runs)):
            res = run.result
            summary.append([row[0], repr(row[1]), repr(row[2]), res.sweeps if res else 0,
                            str(res.converged if res else True).lower(),
                            f"{run.elapsed_ms:.3f}", int(i == pick)])
        write_rows(args.summary or out.with_suffix(".summary.csv"), SUMMARY_HEADER, summary)
    return EXIT_OK


def cmd_metrics(args) -> int:
    g = load_graph(args.graph, args.format)
    x_ref = read_layout(args.ref, g)
    x_cmp = read_layout(args.cmp, g)
    if x_ref.shape != x_cmp.shape:
        raise ConfigError("reference and comparison layouts differ in dimension")
    rep = evaluate(g, x_cmp, x_ref, max_hop=args.max_hop, bins=args.bins,
                   sample_pairs=args.sample_pairs, seed=args.seed, aggregate=args.aggregate)
    if args.out == "-":
        rep.write_csv(sys.stdout)
    else:
        with open(args.out, "w", newline="") as fh:
            rep.write_csv(fh)
    if args.figure:
        from .plotting import save_report_figure

        save_report_figure(rep, args.figure, title=_graph_name(args.graph))
    return EXIT_OK


def bench_cell(g, pairs, ref, sampler, k, seed, args):
    cfg = _solver_cfg(args, seed)
    run = run_layout(g, "sparse", seed, k, sampler, cfg, args.init_pivots)
    ns = normalized_stress(run.layout, pairs)
    proc = procrustes_statistic(ref, run.layout) if ref is not None else None
    return ns, proc, run.elapsed_ms


def cmd_bench(args) -> int:
    g = load_graph(args.graph, args.format)
    name = _graph_name(args.graph)
    for s in args.samplers:
        if s not in STRATEGIES:
            raise ConfigError(f"unknown sampler {s!r}")
    for k in args.k_list:
        if not 1 <= k <= g.node_count:
            raise ConfigError(f"k={k} outside 1..{g.node_count}")
    # the reference and the pair sample use their own seed so that a cell's
    # numbers depend only on its own seed, not on the rest of the grid
    pairs = _pairs_for(g, args, args.ref_seed)
    if args.ref:
        ref = read_layout(args.ref, g)
    elif args.no_reference:
        ref = None
    else:
        ref = run_layout(g, "full", args.ref_seed, cfg=SolverConfig(seed=args.ref_seed, dim=args.dim),
                         init_pivots=args.init_pivots).layout
    cells = [(s, k, seed) for k in args.k_list for s in args.samplers
             for seed in range(args.seed, args.seed + args.seeds)]
    workers = min(_worker_count(args), len(cells)) or 1
    if workers == 1:
        results = [bench_cell(g, pairs, ref, s, k, seed, args) for s, k, seed in cells]
    else:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda c: bench_cell(g, pairs, ref, *c, args), cells))
    rows = [[name, s, k, seed, repr(ns), "" if proc is None else repr(proc), f"{ms:.3f}"]
            for (s, k, seed), (ns, proc, ms) in zip(cells, results)]
    write_rows(sys.stdout if args.out == "-" else args.out, BENCH_HEADER, rows)
    return EXIT_OK


def cmd_render(args) -> int:
    g = load_graph(args.graph, args.format)
    write_svg(args.output, g, read_layout(args.layout, g))
    return EXIT_OK


def cmd_info(args) -> int:
    g = load_graph(args.graph, args.format, keep_all=args.all_components)
    print(gmod.stats(g).format())
    return EXIT_OK


def cmd_generate(args) -> int:
    g = load_graph("gen:" + args.spec)
    if args.output == "-":
        sys.stdout.write(gmod.format_edge_list(g))
    else:
        gmod.write_edge_list(g, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sparsestress", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def graph_arg(sp):
        sp.add_argument("graph", help="graph file or gen:KIND:PARAMS")
        sp.add_argument("--format", choices=("el", "mtx"), default=None,
                        help="input format (default: by extension, .mtx = MatrixMarket)")

    def solver_args(sp):
        sp.add_argument("--max-iters", type=int, default=None,
                        help="sweep cap (default 500 for full, 200 otherwise)")
        sp.add_argument("--eps", type=float, default=1e-4, help="relative positional change threshold")
        sp.add_argument("--dim", type=int, default=2)
        sp.add_argument("--init-pivots", type=int, default=INIT_PIVOTS, help="PivotMDS pivots")
        sp.add_argument("--deterministic", action="store_true",
                        help="run everything sequentially")
        sp.add_argument("--sample-pairs", type=int, default=None,
                        help="evaluate stress on a seeded pair sample instead of all pairs")

    sp = sub.add_parser("layout", help="compute a layout")
    graph_arg(sp)
    sp.add_argument("--algo", choices=ALGORITHMS, default="sparse")
    sp.add_argument("--k", type=int, default=None, help="number of pivots (sparse)")
    sp.add_argument("--sampler", choices=STRATEGIES, default="kmeans-sp")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--reps", type=int, default=1, help="seeds seed..seed+reps-1; keep the median run")
    sp.add_argument("--time-reps", type=int, default=1, help="repeat each run and average its time")
    solver_args(sp)
    sp.add_argument("-o", "--out", default="layout.csv")
    sp.add_argument("--trace", default=None, help="trace CSV (default: <out>.trace.csv)")
    sp.add_argument("--summary", default=None, help="summary CSV for --reps > 1")
    sp.add_argument("--svg", default=None)
    sp.set_defaults(func=cmd_layout)

    sp = sub.add_parser("metrics", help="score a layout against a reference layout")
    graph_arg(sp)
    sp.add_argument("ref", help="reference layout CSV")
    sp.add_argument("cmp", help="layout CSV to score")
    sp.add_argument("--K", dest="max_hop", type=int, default=5, help="largest hop count for curves")
    sp.add_argument("--bins", type=int, default=1000, help="histogram bins for weighted graphs")
    sp.add_argument("--sample-pairs", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--aggregate", choices=("mean", "median"), default="mean")
    sp.add_argument("-o", "--out", default="-")
    sp.add_argument("--figure", default=None, help="write an error-chart figure (png/pdf/svg)")
    sp.set_defaults(func=cmd_metrics)

    sp = sub.add_parser("bench", help="grid of sparse runs over k, sampler and seed")
    graph_arg(sp)
    sp.add_argument("--k-list", type=_int_list, default=[50, 100, 200])
    sp.add_argument("--samplers", type=_str_list, default=["kmeans-sp"])
    sp.add_argument("--seeds", type=int, default=1, help="repetitions per cell")
    sp.add_argument("--seed", type=int, default=0, help="first seed")
    sp.add_argument("--ref", default=None, help="reference layout for the Procrustes column")
    sp.add_argument("--no-reference", action="store_true", help="skip the full-stress reference")
    sp.add_argument("--ref-seed", type=int, default=0,
                    help="seed of the full-stress reference and of --sample-pairs")
    solver_args(sp)
    sp.add_argument("-o", "--out", default="-")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("render", help="draw a layout as SVG")
    graph_arg(sp)
    sp.add_argument("layout")
    sp.add_argument("output")
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("info", help="print n, m, degree range and diameter")
    graph_arg(sp)
    sp.add_argument("--all-components", action="store_true",
                    help="do not restrict to the largest component")
    sp.set_defaults(func=cmd_info)

    sp = sub.add_parser("generate", help="write a synthetic graph as an edge list")
    sp.add_argument("spec", help="KIND:PARAMS, e.g. btree:9, grid:10x10, cycle:6, star:4")
    sp.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=cmd_generate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        with warnings.catch_warnings():
            if not args.verbose:
                warnings.simplefilter("ignore")
            t0 = time.perf_counter()
            code = args.func(args)
            log.info("done in %.1f ms", (time.perf_counter() - t0) * 1e3)
            return code
    except SparseStressError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
