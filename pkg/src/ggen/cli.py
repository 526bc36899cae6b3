"""Command-line entry point: ``ggen {generate,compare,scaling,stats}``.

Exit codes: 0 success, 1 usage error, 2 unreadable input, 3 infeasible
targets, 4 arithmetic overflow.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import logging
import os
import sys
from pathlib import Path

from . import harness
from .counts import count_all
from .generator import GeneratorConfig, InfeasibleTargetError, TargetSpec
from .graph import GraphFormatError, parse_edge_list, save_edge_list

OUT_ENV = "GGEN_OUT_DIR"
EXIT_USAGE, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_OVERFLOW = 1, 2, 3, 4

log = logging.getLogger("ggen")


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--input", help="edge list of the target graph")
    src.add_argument("--targets", help="inline targets: m,s,z,x,t,q,n or key=value pairs")
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./ggen-out)")
    p.add_argument("--format", nargs="+", choices=("json", "csv"), default=["json"])
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--weights", help="objective weights, e.g. m=1,t=2")
    p.add_argument("--statistics", help="statistics entering the error, e.g. m,s,t (default all six)")
    p.add_argument("--return", dest="return_policy", choices=("best", "final"), default="best")
    p.add_argument("--single-core", action=argparse.BooleanOptionalAction, default=True,
                   help="limit numeric libraries to one thread (default on)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ggen", description="Guided graph generation toward target subgraph counts.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="run one generator and write graph, report, trace and series")
    _add_common(p)
    p.add_argument("--generator", choices=harness.GENERATORS, default="gg")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--series", nargs="*", choices=harness.SERIES, default=[])

    p = sub.add_parser("compare", help="run several generators on the same targets")
    _add_common(p)
    p.add_argument("--generator", nargs="+", choices=harness.GENERATORS, default=list(harness.GENERATORS))
    p.add_argument("--seed", type=int, nargs="+", default=[0])

    p = sub.add_parser("scaling", help="runtime and error of gg over network sizes")
    _add_common(p)
    p.add_argument("--sizes", type=int, nargs="+", default=[250, 500, 1000, 2000])
    p.add_argument("--seed", type=int, nargs="+", default=list(range(10)))
    p.add_argument("--family", choices=("er", "scaled"), default="er",
                   help="er: counts of G(n, k/(n-1)); scaled: input or inline targets scaled by n")
    p.add_argument("--mean-degree", type=float, default=10.0)

    p = sub.add_parser("stats", help="counts, derived statistics and series of an existing graph")
    p.add_argument("--input", required=True)
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./ggen-out)")
    p.add_argument("--format", nargs="+", choices=("json", "csv"), default=["json"])
    p.add_argument("--series", nargs="*", choices=harness.SERIES, default=list(harness.SERIES))
    return parser


def _out_dir(args) -> Path:
    out = Path(args.out or os.environ.get(OUT_ENV) or "ggen-out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load(path, with_labels: bool = False):
    try:
        with open(path, "rb") as fh:
            g, labels = parse_edge_list(fh)
    except (OSError, GraphFormatError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    return (g, labels) if with_labels else g


def _write_node_map(args, out: Path) -> None:
    """Emit ``node,original`` when the input ids were remapped."""
    if not getattr(args, "input", None):
        return
    _, labels = _load(args.input, with_labels=True)
    if labels != list(range(len(labels))):
        harness.write_two_column(out / "node_map.csv", ("node", "original"), range(len(labels)), labels)


def _targets(args):
    """Return ``(targets, g0)``; ``g0`` is None for inline targets."""
    stats = tuple(s.strip() for s in args.statistics.split(",")) if getattr(args, "statistics", None) else None
    if not (args.input or args.targets):
        raise UsageError("one of --input or --targets is required")
    g0 = _load(args.input) if args.input else None
    try:
        if g0 is not None:
            spec = TargetSpec(g0.n, count_all(g0))
        else:
            spec = harness.parse_targets(args.targets)
        if stats:
            spec = TargetSpec(spec.n, spec.counts, stats)
    except InfeasibleTargetError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return spec, g0


def _config(args, seed: int) -> GeneratorConfig:
    try:
        weights = harness.parse_weights(args.weights)
        return GeneratorConfig(
            epsilon=args.epsilon,
            seed=seed,
            max_iterations=args.max_iter,
            weights=weights,
            return_policy=args.return_policy,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _write_timing(out: Path, data: dict, name: str = "timing.json") -> None:
    (out / name).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _needs_graph(gen: str, g0) -> None:
    if gen in ("mr", "cl") and g0 is None:
        raise UsageError(f"generator {gen} needs --input for its degree sequence")


def _distances(g):
    # shared by the derived scalars and the distance series
    try:
        return harness.dstats.distances(g)
    except harness.dstats.UndefinedStatistic:
        return None


def cmd_generate(args) -> int:
    targets, g0 = _targets(args)
    _needs_graph(args.generator, g0)
    config = _config(args, args.seed)
    out = _out_dir(args)
    result = harness.run_generator(args.generator, targets, g0, config)
    dist = _distances(result.graph)
    report = harness.build_report(result, config.weights, dist=dist)
    series, flags = harness.compute_series(result.graph, args.series, dist)
    if flags:
        report["flags"]["series"] = flags
    save_edge_list(result.graph, out / "graph.txt")
    _write_node_map(args, out)
    harness.write_report(report, out, "report", args.format)
    harness.write_series(series, out)
    timing = {"generator": result.generator, "seed": result.seed, "runtime_seconds": result.runtime}
    if result.trace is not None:
        harness.write_trace(result.trace, out / "trace.csv")
        x, y = harness.error_vs_runtime(result.trace)
        harness.write_two_column(out / "error_vs_runtime.csv", ("seconds", "E"), x, y)
    _write_timing(out, timing)
    print(f"{result.generator}: E={report['E']:.6g} runtime={result.runtime:.3f}s -> {out}")
    return 0


def cmd_compare(args) -> int:
    targets, g0 = _targets(args)
    runs = [(gen, seed) for gen in args.generator for seed in args.seed]
    if len(runs) < 2:
        raise UsageError("compare needs at least two runs (generators x seeds)")
    out = _out_dir(args)
    results = []
    for gen, seed in runs:
        _needs_graph(gen, g0)
        results.append(harness.run_generator(gen, targets, g0, _config(args, seed)))
    rows = harness.compare(results, harness.parse_weights(args.weights))
    table = {"schema_version": harness.SCHEMA_VERSION, "n": targets.n, "targets": targets.counts.as_dict(), "rows": rows}
    for fmt in args.format:
        if fmt == "json":
            (out / "comparison.json").write_text(harness.report_json(table), encoding="utf-8")
        else:
            with open(out / "comparison.csv", "w", encoding="utf-8", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(list(rows[0]))
                for row in rows:
                    w.writerow([harness._scalar(v) for v in row.values()])
    for r in results:
        if r.trace is not None:
            x, y = harness.error_vs_runtime(r.trace)
            harness.write_two_column(out / f"error_vs_runtime_gg_{r.seed}.csv", ("seconds", "E"), x, y)
    _write_timing(out, {"runtime_seconds": {f"{r.generator}/{r.seed}": r.runtime for r in results}})
    width = max(len(r["generator"]) for r in rows)
    for r in rows:
        print(f"{r['generator']:<{width}} seed={r['seed']:<4} E={r['E']:.6g}")
    return 0


def cmd_scaling(args) -> int:
    base = None
    if args.family == "scaled":
        base, _ = _targets(args)
    config = _config(args, 0)
    out = _out_dir(args)

    def progress(n, seed, runtime, e):
        log.info("n=%d seed=%d runtime=%.3fs E=%.4g", n, seed, runtime, e)

    try:
        result = harness.scaling(args.sizes, args.seed, args.family, args.mean_degree, base, config, progress)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    (out / "scaling.json").write_text(harness.report_json(result), encoding="utf-8")
    rows = result["sizes"]
    harness.write_two_column(out / "scaling_runtime.csv", ("n", "runtime_median"), [r["n"] for r in rows], [r["runtime_median"] for r in rows])
    harness.write_two_column(out / "scaling_error.csv", ("n", "E_median"), [r["n"] for r in rows], [r["E_median"] for r in rows])
    for r in rows:
        print(f"n={r['n']:<6} runtime median={r['runtime_median']:.3f}s std={r['runtime_std']:.3f}s E median={r['E_median']:.4g}")
    print(f"log-log runtime slope: {result['runtime_slope']:.3f}")
    return 0


def cmd_stats(args) -> int:
    g = _load(args.input)
    out = _out_dir(args)
    counts = count_all(g)
    dist = _distances(g)
    derived = harness.dstats.derived_stats(g, counts, dist=dist)
    series, flags = harness.compute_series(g, args.series, dist)
    report = {
        "schema_version": harness.SCHEMA_VERSION,
        "n": g.n,
        "counts": counts.as_dict(),
        "derived": derived.as_dict(),
        "derived_coverage": derived.coverage,
        "flags": {"derived": derived.flags, "series": flags},
    }
    harness.write_report(report, out, "stats", args.format)
    _write_node_map(args, out)
    harness.write_series(series, out)
    c = counts.as_dict()
    print(" ".join(f"{k}={v}" for k, v in [("n", g.n), *c.items()]))
    return 0


COMMANDS = {"generate": cmd_generate, "compare": cmd_compare, "scaling": cmd_scaling, "stats": cmd_stats}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    limit = contextlib.nullcontext()
    if getattr(args, "single_core", False):
        from threadpoolctl import threadpool_limits

        limit = threadpool_limits(limits=1)
    try:
        with limit:
            return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ggen: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"ggen: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasibleTargetError as exc:
        print(f"ggen: infeasible targets: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OverflowError as exc:
        print(f"ggen: overflow: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW


if __name__ == "__main__":
    sys.exit(main())
