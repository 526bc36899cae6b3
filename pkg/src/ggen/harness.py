"""Experiment driver: run generators on common targets and build reports.

Reports are plain dicts so the JSON and CSV writers see the same values.
Wall-clock times never enter a report; they go to a separate timing file so
that reports of equal runs are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .baselines import MODELS, BaselineParams, fit_baseline_params, generate_baseline, molloy_reed, ring_degree
from .counts import STATISTICS, SubgraphCounts, count_all
from .generator import GeneratorConfig, RunTrace, TargetSpec, relative_error, run, total_error
from .graph import Graph
from . import stats as dstats

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
GENERATORS = ("gg",) + MODELS
SERIES = ("degree", "clustering", "distance", "spectrum")
_SERIES_HEADERS = {
    "degree": ("k", "ccdf"),
    "clustering": ("local_clustering", "cdf"),
    "distance": ("d", "H"),
    "spectrum": ("eigenvalue", "rank_fraction"),
}


def parse_targets(text: str) -> TargetSpec:
    """Inline targets as ``m,s,z,x,t,q,n`` or ``key=value`` pairs.

    In the keyed form ``n`` is required and missing counts are 0.
    """
    parts = [p.strip() for p in text.replace(";", ",").split(",") if p.strip()]
    if parts and all("=" in p for p in parts):
        values = {}
        for p in parts:
            key, _, val = p.partition("=")
            key = key.strip()
            if key not in STATISTICS + ("n",):
                raise ValueError(f"unknown target key {key!r}")
            values[key] = int(val)
        if "n" not in values:
            raise ValueError("inline targets need n=<nodes>")
        n = values.pop("n")
    elif len(parts) == 7 and not any("=" in p for p in parts):
        *counts, n = (int(p) for p in parts)
        values = dict(zip(STATISTICS, counts))
    else:
        raise ValueError(f"cannot parse targets {text!r}; use m,s,z,x,t,q,n or key=value pairs")
    return TargetSpec(n, SubgraphCounts(**values))


def parse_weights(text: str | None) -> dict[str, float] | None:
    if not text:
        return None
    out = {}
    for p in text.split(","):
        key, sep, val = p.partition("=")
        key = key.strip()
        if not sep or key not in STATISTICS:
            raise ValueError(f"bad weight {p!r}; use stat=value with stat in {','.join(STATISTICS)}")
        out[key] = float(val)
    return out


def params_from_targets(model: str, targets: TargetSpec) -> BaselineParams:
    """Baseline parameters when only target counts (no graph) are known."""
    n, c = targets.n, targets.counts
    if model == "er":
        return BaselineParams(model, n, p=c.m / (n * (n - 1) // 2))
    if model == "ws":
        return BaselineParams(model, n, mean_degree=2 * c.m / n, clustering=3 * c.t / c.s if c.s else 0.0)
    if model == "ba":
        return BaselineParams(model, n, edges_per_node=max(1, int(math.floor(c.m / n + 0.5))))
    raise ValueError(f"generator {model!r} needs an input graph for its degree sequence")


@dataclass
class RunResult:
    generator: str
    seed: int
    graph: Graph
    counts: SubgraphCounts
    targets: TargetSpec
    runtime: float
    iterations: int | None = None
    trace: RunTrace | None = None
    notes: dict = field(default_factory=dict)


def run_generator(
    generator: str,
    targets: TargetSpec,
    g0: Graph | None = None,
    config: GeneratorConfig | None = None,
) -> RunResult:
    """Run one generator; the timer covers generation only."""
    config = config or GeneratorConfig()
    notes: dict = {}
    if generator == "gg":
        start = time.perf_counter()
        g, trace = run(targets, config)
        runtime = time.perf_counter() - start
        notes.update(status=trace.status, best_iteration=trace.best_iteration, window=trace.window)
        return RunResult(generator, config.seed, g, trace.returned_counts, targets, runtime, trace.last_iteration, trace, notes)
    if generator not in MODELS:
        raise ValueError(f"unknown generator {generator!r}; choose from {', '.join(GENERATORS)}")
    params = fit_baseline_params(g0, generator) if g0 is not None else params_from_targets(generator, targets)
    start = time.perf_counter()
    if generator == "mr":
        res = molloy_reed(params.degrees, config.seed)
        g = res.graph
        notes.update(erased_stubs=res.erased_stubs, repaired_pairs=res.repaired_pairs, erasure_rate=res.erasure_rate)
    else:
        g = generate_baseline(params, config.seed)
    runtime = time.perf_counter() - start
    if generator == "ws":
        k = ring_degree(params.mean_degree)
        notes.update(ring_degree=k, clustering_fit="approximation c(beta) = c(0)(1-beta)^3")
    return RunResult(generator, config.seed, g, count_all(g), targets, runtime, None, None, notes)


def error_table(counts: SubgraphCounts, targets: TargetSpec, weights=None) -> tuple[float, dict]:
    per = {}
    for s in STATISTICS:
        x = targets.counts[s]
        per[s] = {
            "target": x,
            "achieved": counts[s],
            "relative_error": relative_error(counts[s], x),
            "zero_target": x == 0,
            "in_objective": s in targets.statistics,
        }
    e = total_error({s: per[s]["relative_error"] for s in targets.statistics}, weights)
    return e, per


def build_report(result: RunResult, weights=None, with_derived: bool = True, dist=None) -> dict:
    e, per = error_table(result.counts, result.targets, weights)
    report = {
        "schema_version": SCHEMA_VERSION,
        "generator": result.generator,
        "seed": result.seed,
        "n": result.graph.n,
        "iterations": result.iterations,
        "E": e,
        "error_statistics": list(result.targets.statistics),
        "weights": {s: float((weights or {}).get(s, 1.0)) for s in result.targets.statistics},
        "statistics": per,
        "flags": {"zero_target": [s for s in STATISTICS if per[s]["zero_target"]]},
        "notes": result.notes,
    }
    if with_derived:
        derived = dstats.derived_stats(result.graph, result.counts, dist=dist)
        report["derived"] = derived.as_dict()
        report["derived_coverage"] = derived.coverage
        report["flags"]["derived"] = derived.flags
    return report


def recompute_E(report: dict) -> float:
    """Total error from a report's own per-statistic entries."""
    errs = {s: report["statistics"][s]["relative_error"] for s in report["error_statistics"]}
    return total_error(errs, report["weights"])


def flatten(report: dict, prefix: str = "") -> list[tuple[str, object]]:
    rows: list[tuple[str, object]] = []
    for key, value in report.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            rows += flatten(value, name + ".")
        elif isinstance(value, list):
            rows.append((name, ";".join(str(v) for v in value)))
        else:
            rows.append((name, value))
    return rows


def _scalar(value) -> str:
    # same textual form json uses, so both files hold identical values
    if isinstance(value, str):
        return value
    return json.dumps(value)


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def report_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for key, value in sorted(flatten(report)):
        w.writerow([key, _scalar(value)])
    return buf.getvalue()


def read_report_csv(text: str) -> dict[str, str]:
    rows = list(csv.reader(io.StringIO(text)))
    return {k: v for k, v in rows[1:]}


def write_report(report: dict, out: Path, stem: str, formats) -> list[Path]:
    paths = []
    for fmt in formats:
        path = out / f"{stem}.{fmt}"
        path.write_text(report_json(report) if fmt == "json" else report_csv(report), encoding="utf-8")
        paths.append(path)
    return paths


def write_two_column(path: Path, header: tuple[str, str], x, y) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for a, b in zip(np.asarray(x).tolist(), np.asarray(y).tolist()):
            w.writerow([repr(a), repr(b)])


def write_trace(trace: RunTrace, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "E", *(f"E_{s}" for s in STATISTICS), *STATISTICS])
        for row in trace.rows():
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])


def compute_series(g: Graph, kinds, dist=None) -> tuple[dict[str, dstats.DistributionSeries], dict[str, str]]:
    out, flags = {}, {}
    for kind in kinds:
        try:
            if kind == "degree":
                out[kind] = dstats.degree_ccdf(g)
            elif kind == "clustering":
                out[kind] = dstats.local_clustering_distribution(g)
            elif kind == "distance":
                out[kind] = (dist or dstats.distances(g)).cdf
            elif kind == "spectrum":
                out[kind] = dstats.normalized_spectrum(g)
            else:
                raise ValueError(f"unknown series {kind!r}")
        except (dstats.UndefinedStatistic, ValueError) as exc:
            if kind not in SERIES:
                raise
            flags[kind] = str(exc)
    return out, flags


def write_series(series: dict[str, dstats.DistributionSeries], out: Path, stem: str = "series") -> list[Path]:
    paths = []
    for kind, s in series.items():
        path = out / f"{stem}_{kind}.csv"
        write_two_column(path, _SERIES_HEADERS[kind], s.x, s.y)
        paths.append(path)
        if kind == "distance":
            p2 = out / f"{stem}_distance_logistic.csv"
            write_two_column(p2, ("d", "logit_H"), s.x, s.meta["logistic"])
            paths.append(p2)
    return paths


def compare(results: list[RunResult], weights=None) -> list[dict]:
    """One row per run: E and every E^S. Refuses fewer than two runs or differing targets."""
    if len(results) < 2:
        raise ValueError("comparison needs at least two runs")
    first = results[0].targets
    for r in results[1:]:
        if r.targets != first:
            raise ValueError(f"run {r.generator}/{r.seed} has different targets than {results[0].generator}")
    rows = []
    for r in results:
        e, per = error_table(r.counts, r.targets, weights)
        row = {"generator": r.generator, "seed": r.seed, "E": e}
        row.update({f"E_{s}": per[s]["relative_error"] for s in STATISTICS})
        rows.append(row)
    return rows


def error_vs_runtime(trace: RunTrace) -> tuple[np.ndarray, np.ndarray]:
    return np.asarray(trace.elapsed), trace.total_error


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


def er_family_targets(n: int, mean_degree: float, seed: int = 0) -> TargetSpec:
    """Counts of a seeded G(n, p) with ``p = mean_degree / (n - 1)``."""
    from .baselines import gen_erdos_renyi

    g = gen_erdos_renyi(n, mean_degree / (n - 1), np.random.SeedSequence([seed, n]))
    return TargetSpec.from_graph(g)


def scaled_targets(base: TargetSpec, n: int) -> TargetSpec:
    """Every count multiplied by ``n / base.n`` and rounded."""
    f = n / base.n
    return TargetSpec(n, SubgraphCounts(*(round(c * f) for c in base.counts.as_tuple())), base.statistics)


def scaling(
    sizes,
    seeds,
    family: str = "er",
    mean_degree: float = 10.0,
    base: TargetSpec | None = None,
    config: GeneratorConfig | None = None,
    progress=None,
) -> dict:
    """Runtime and final error of the guided generator over network sizes.

    Runs are interleaved (every size for one seed, then the next seed) so
    that slow phases of the machine spread over all sizes. The slope is
    fitted on the median runtime across seeds at each size.
    """
    sizes = sorted(int(n) for n in sizes)
    if len(set(sizes)) < 3:
        raise ValueError("scaling needs at least three distinct sizes")
    if not seeds:
        raise ValueError("scaling needs at least one seed")
    config = config or GeneratorConfig()
    if family == "er":
        targets = {n: er_family_targets(n, mean_degree) for n in sizes}
    elif family == "scaled":
        if base is None:
            raise ValueError("scaled family needs base targets")
        targets = {n: scaled_targets(base, n) for n in sizes}
    else:
        raise ValueError(f"unknown scaling family {family!r}")
    # load the compiled loop before anything is timed
    run(TargetSpec(10, SubgraphCounts(m=10)), GeneratorConfig(max_iterations=5))
    runtimes = {n: [] for n in sizes}
    errors = {n: [] for n in sizes}
    iters = {n: [] for n in sizes}
    for seed in seeds:
        for n in sizes:
            res = run_generator("gg", targets[n], config=GeneratorConfig(**{**config.__dict__, "seed": int(seed)}))
            runtimes[n].append(res.runtime)
            errors[n].append(error_table(res.counts, targets[n], config.weights)[0])
            iters[n].append(res.iterations)
            if progress:
                progress(n, seed, res.runtime, errors[n][-1])
    rows = []
    for n in sizes:
        rt = np.array(runtimes[n])
        rows.append(
            {
                "n": n,
                "m_target": targets[n].counts.m,
                "runtimes": runtimes[n],
                "runtime_median": float(np.median(rt)),
                "runtime_mean": float(rt.mean()),
                "runtime_std": float(rt.std(ddof=1)) if len(rt) > 1 else 0.0,
                "iterations": iters[n],
                "E": errors[n],
                "E_median": float(np.median(errors[n])),
            }
        )
    return {
        "schema_version": SCHEMA_VERSION,
        "family": family,
        "mean_degree": mean_degree if family == "er" else None,
        "seeds": [int(s) for s in seeds],
        "sizes": rows,
        "runtime_slope": loglog_slope(sizes, [r["runtime_median"] for r in rows]),
        "runtime_slope_mean": loglog_slope(sizes, [r["runtime_mean"] for r in rows]),
        "iteration_slope": loglog_slope(sizes, [np.median(r["iterations"]) for r in rows]),
    }
