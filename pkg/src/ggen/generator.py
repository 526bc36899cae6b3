"""Guided graph generation by greedy edge toggling.

Starting from an Erdős–Rényi graph with the target edge density, each
iteration picks a uniformly random pivot ``u``, evaluates for every other
node ``w`` the squared relative error that toggling ``{u, w}`` would leave,
and toggles the best one. Running counts are updated from the deltas, so a
step costs a couple of passes over the edges. The loop stops once the
error has not reached a new strict minimum for ``ceil(n ln(1/epsilon))``
iterations.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .baselines import gen_erdos_renyi
from .counts import STATISTICS, SubgraphCounts, count_all
from . import engine
from .deltas import best_toggle
from .graph import Graph

ProgressSink = Callable[[int, float, dict], None]

# |count| beyond this cannot be shifted exactly in int64 next to a delta
_COUNT_LIMIT = 2**62


class InfeasibleTargetError(ValueError):
    """Targets violate a hard bound such as ``m <= C(n, 2)``."""


class CountDesyncError(AssertionError):
    """Maintained counts disagree with a recount of the graph."""


@dataclass(frozen=True)
class TargetSpec:
    n: int
    counts: SubgraphCounts
    statistics: tuple[str, ...] = STATISTICS

    def __post_init__(self):
        if self.n < 2:
            raise InfeasibleTargetError(f"need at least 2 nodes, got n={self.n}")
        bad = [s for s in self.statistics if s not in STATISTICS]
        if bad or not self.statistics:
            raise ValueError(f"unknown or empty statistic selection: {self.statistics}")
        for name, value in self.counts.as_dict().items():
            if value < 0:
                raise InfeasibleTargetError(f"target {name}={value} is negative")
        pairs = self.n * (self.n - 1) // 2
        if self.counts.m > pairs:
            raise InfeasibleTargetError(
                f"target m={self.counts.m} exceeds C(n, 2)={pairs} for n={self.n}"
            )

    @classmethod
    def from_graph(cls, g0: Graph, statistics: Sequence[str] = STATISTICS) -> "TargetSpec":
        return cls(g0.n, count_all(g0), tuple(statistics))

    def zero_targets(self) -> list[str]:
        return [s for s in self.statistics if self.counts[s] == 0]


@dataclass(frozen=True)
class GeneratorConfig:
    epsilon: float = 0.01
    seed: int = 0
    max_iterations: int | None = None
    weights: Mapping[str, float] | None = None
    return_policy: str = "best"
    record_every: int | None = None
    verify_every: int = 0

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.return_policy not in ("best", "final"):
            raise ValueError(f"return_policy must be 'best' or 'final', got {self.return_policy!r}")
        if self.weights and any(w <= 0 for w in self.weights.values()):
            raise ValueError("statistic weights must be positive")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ValueError("max_iterations must be nonnegative")

    def weight_of(self, stat: str) -> float:
        return float(self.weights.get(stat, 1.0)) if self.weights else 1.0


def window_length(n: int, epsilon: float) -> int:
    """Non-improving iterations tolerated before stopping."""
    return math.ceil(n * math.log(1.0 / epsilon))


def relative_error(value: int | float, target: int | float) -> float:
    """``(value - target) / target``; a zero target divides by 1 instead."""
    return (value - target) / (target if target != 0 else 1)


def total_error(errors: Sequence[float] | Mapping[str, float], weights=None) -> float:
    """Root of the (weighted) mean of squared relative errors."""
    if isinstance(errors, Mapping):
        names = list(errors)
        values = [errors[k] for k in names]
        w = [1.0 if weights is None else float(weights.get(k, 1.0)) for k in names]
    else:
        values = list(errors)
        w = [1.0] * len(values) if weights is None else [float(x) for x in weights]
    if not values:
        raise ValueError("total error needs at least one statistic")
    return math.sqrt(sum(wi * e * e for wi, e in zip(w, values)) / len(values))


def init_seed_graph(n: int, m_target: int, seed=None) -> Graph:
    pairs = n * (n - 1) // 2
    if not 0 <= m_target <= pairs:
        raise InfeasibleTargetError(f"m={m_target} outside [0, {pairs}]")
    return gen_erdos_renyi(n, m_target / pairs, seed)


@dataclass
class RunTrace:
    """Recorded iterations of a run.

    Only iteration indices, raw counts and timings are stored; the error
    columns are derived from them on access. Per-statistic columns follow
    ``STATISTICS`` order, and only the statistics selected for the objective
    enter ``total_error``.
    """

    statistics: tuple[str, ...]
    targets: SubgraphCounts
    weights: dict[str, float]
    window: int
    iterations: list[int] = field(default_factory=list)
    counts: list[tuple[int, ...]] = field(default_factory=list)
    elapsed: list[float] = field(default_factory=list)
    best_iteration: int = 0
    best_error: float = math.inf
    last_iteration: int = 0
    status: str = "running"
    final_counts: SubgraphCounts | None = None
    returned_counts: SubgraphCounts | None = None

    def record(self, i: int, counts: Sequence[int], elapsed: float) -> None:
        self.iterations.append(i)
        self.counts.append(tuple(int(c) for c in counts))
        self.elapsed.append(elapsed)

    def errors_at(self, counts: Sequence[int]) -> tuple[float, dict[str, float]]:
        per = {s: relative_error(counts[STATISTICS.index(s)], self.targets[s]) for s in self.statistics}
        return total_error(per, self.weights), per

    @property
    def stat_errors(self) -> np.ndarray:
        """``(records, 6)`` relative errors."""
        tgt = np.array(self.targets.as_tuple(), dtype=float)
        cnt = np.array(self.counts, dtype=float).reshape(-1, len(STATISTICS))
        return (cnt - tgt) / np.where(tgt == 0, 1.0, tgt)

    @property
    def total_error(self) -> np.ndarray:
        cols = [STATISTICS.index(s) for s in self.statistics]
        w = np.array([self.weights[s] for s in self.statistics])
        e = self.stat_errors[:, cols]
        return np.sqrt((e * e) @ w / len(cols))

    def series(self, stat: str) -> np.ndarray:
        return np.array([c[STATISTICS.index(stat)] for c in self.counts], dtype=float)

    def rows(self):
        """Deterministic rows (no timings) for serialization."""
        errs = self.stat_errors.tolist()
        for i, e, er, cnt in zip(self.iterations, self.total_error.tolist(), errs, self.counts):
            yield (i, e, *er, *cnt)


def _normalized_weights(config: GeneratorConfig, stats: Sequence[str]) -> np.ndarray:
    # exact normalization keeps the argmin identical under weight scaling
    raw = [Fraction(config.weight_of(s)) for s in stats]
    total = sum(raw)
    return np.array([float(w / total) for w in raw])


class _Objective:
    """Weighted squared relative error over the selected statistics."""

    def __init__(self, targets: TargetSpec, config: GeneratorConfig):
        self.rows = np.array([STATISTICS.index(s) for s in targets.statistics], dtype=np.int64)
        tgt = [targets.counts[s] for s in targets.statistics]
        self.target = tgt
        self.scale = np.array([1.0 / (t if t else 1) for t in tgt])
        self.weights = _normalized_weights(config, targets.statistics)
        self.all_rows = tuple(targets.statistics) == STATISTICS

    def offsets(self, counts: Sequence[int]) -> np.ndarray:
        off = [counts[r] - t for r, t in zip(self.rows, self.target)]
        if any(abs(o) >= _COUNT_LIMIT for o in off):
            raise OverflowError("subgraph counts exceed the 64-bit working range")
        return np.array(off, dtype=np.int64)

    def value(self, counts: Sequence[int]) -> float:
        return float(self.candidates(np.zeros((len(STATISTICS), 1), dtype=np.int64), counts)[0])

    def candidates(self, deltas: np.ndarray, counts: Sequence[int]) -> np.ndarray:
        rows = deltas if self.all_rows else deltas[self.rows]
        r = (rows + self.offsets(counts)[:, None]) * self.scale[:, None]
        # explicit row-sequential sum: identical rounding for any column count
        return (self.weights[:, None] * (r * r)).sum(axis=0)


def step(
    g: Graph,
    u: int,
    counts: Sequence[int],
    targets: TargetSpec,
    config: GeneratorConfig | None = None,
    objective: _Objective | None = None,
) -> tuple[int, list[int], float]:
    """Toggle the best edge at pivot ``u``.

    Every ``w != u`` is a candidate; ties go to the lowest index. The toggle
    always happens, even when it raises the error.

    Returns:
        The chosen node, the updated counts (``STATISTICS`` order) and the
        objective value after the toggle.
    """
    if objective is None:
        objective = _Objective(targets, config or GeneratorConfig())
    v, deltas, score = best_toggle(
        g, u, objective.rows, objective.offsets(counts), objective.scale, objective.weights
    )
    g.toggle_edge(u, v)
    new = [c + d for c, d in zip(counts, deltas.tolist())]
    return v, new, score


def _new_trace(targets: TargetSpec, config: GeneratorConfig, window: int) -> RunTrace:
    return RunTrace(
        statistics=targets.statistics,
        targets=targets.counts,
        weights={s: config.weight_of(s) for s in targets.statistics},
        window=window,
    )


def _finish(trace, i, counts, best_i, best_counts, status, start, config):
    if trace.iterations[-1] != i:
        trace.record(i, counts, time.perf_counter() - start)
    trace.best_iteration = best_i
    trace.best_error = trace.errors_at(best_counts)[0]
    trace.last_iteration = i
    trace.status = status
    trace.final_counts = SubgraphCounts(*counts)
    best = config.return_policy == "best"
    trace.returned_counts = SubgraphCounts(*best_counts) if best else trace.final_counts


def _setup(targets: TargetSpec, config: GeneratorConfig):
    n = targets.n
    init_seq, pivot_seq = np.random.SeedSequence(config.seed).spawn(2)
    g = init_seed_graph(n, targets.counts.m, np.random.default_rng(init_seq))
    window = window_length(n, config.epsilon)
    every = config.record_every or (1 if n <= 1000 else math.ceil(n / 1000))
    return g, np.random.default_rng(pivot_seq), window, every


def run(
    targets: TargetSpec,
    config: GeneratorConfig | None = None,
    progress: ProgressSink | None = None,
) -> tuple[Graph, RunTrace]:
    """Generate a graph whose subgraph counts approach ``targets``.

    Iterations run in a compiled loop over blocks of pivots; the result is
    identical to repeatedly calling :func:`step` (see :func:`run_reference`).
    Timestamps of records inside a block are interpolated linearly between
    the block's start and end.

    Args:
        targets: node count and target counts.
        config: stopping, seeding and weighting options.
        progress: optional callback ``(iteration, E, {stat: E^S})`` invoked
            for every recorded iteration, in order, after each block.

    Returns:
        The graph (best-seen or final per ``config.return_policy``) and its
        trace.
    """
    config = config or GeneratorConfig()
    n = targets.n
    g, pivots, window, every = _setup(targets, config)
    objective = _Objective(targets, config)
    trace = _new_trace(targets, config, window)

    counts = np.array(count_all(g).as_tuple(), dtype=object)
    objective.offsets(counts)
    counts = counts.astype(np.int64)
    start = time.perf_counter()
    best = np.array([objective.value(counts.tolist())])
    best_counts = counts.copy()
    trace.record(0, counts.tolist(), 0.0)
    if progress:
        progress(0, *trace.errors_at(counts.tolist()))

    k = g._arcs
    src, dst = g._src[:k].copy(), g._dst[:k].copy()
    degrees = g.degrees.copy()
    tgt = np.array(objective.target, dtype=np.int64)
    log_u = np.zeros(0, dtype=np.int64)
    log_v = np.zeros(0, dtype=np.int64)
    istate = np.zeros(10, dtype=np.int64)
    istate[engine.WINDOW_LEN] = window
    istate[engine.EVERY] = every
    istate[engine.MAX_ITER] = -1 if config.max_iterations is None else config.max_iterations
    istate[engine.ARCS] = k

    block = np.empty(0, dtype=np.int64)
    block_id = -1
    verified = 0
    while istate[engine.STATUS] == engine.RUNNING:
        i = int(istate[engine.I])
        if i // 4096 != block_id:
            block_id = i // 4096
            block = pivots.integers(0, n, size=4096)
        chunk = block[i % 4096 :]
        v = config.verify_every
        istate[engine.STOP_AT] = (i // v + 1) * v if v else -1
        arcs = int(istate[engine.ARCS])
        src = engine.grow(src, arcs + 2 * len(chunk))
        dst = engine.grow(dst, arcs + 2 * len(chunk))
        log_u = engine.grow(log_u, i + len(chunk))
        log_v = engine.grow(log_v, i + len(chunk))
        rec_iter = np.empty(len(chunk), dtype=np.int64)
        rec_counts = np.empty((len(chunk), len(STATISTICS)), dtype=np.int64)

        t0 = time.perf_counter() - start
        engine.run_block(src, dst, degrees, counts, tgt, objective.rows, objective.scale, objective.weights,
                         _COUNT_LIMIT, chunk, istate, best, best_counts, log_u, log_v, rec_iter, rec_counts)
        t1 = time.perf_counter() - start
        if istate[engine.STATUS] == engine.OVERFLOW:
            raise OverflowError("subgraph counts exceed the 64-bit working range")

        i1 = int(istate[engine.I])
        for r in range(int(istate[engine.N_REC])):
            it = int(rec_iter[r])
            row = rec_counts[r].tolist()
            trace.record(it, row, t0 + (t1 - t0) * (it - i) / max(i1 - i, 1))
            if progress:
                progress(it, *trace.errors_at(row))
        if v and i1 % v == 0 and i1 > verified:
            verified = i1
            fresh = count_all(_graph_from_arcs(n, src, dst, int(istate[engine.ARCS]))).as_tuple()
            if tuple(counts.tolist()) != fresh:
                raise CountDesyncError(f"iteration {i1}: maintained {counts.tolist()} != recount {fresh}")

    i = int(istate[engine.I])
    best_i = int(istate[engine.BEST_I])
    status = "cap" if istate[engine.STATUS] == engine.CAP else "window"
    _finish(trace, i, counts.tolist(), best_i, best_counts.tolist(), status, start, config)
    arcs = int(istate[engine.ARCS])
    if config.return_policy == "best":
        arcs = engine.undo(src, dst, arcs, degrees, log_u, log_v, best_i, i)
    return _graph_from_arcs(n, src, dst, arcs), trace


def _graph_from_arcs(n: int, src: np.ndarray, dst: np.ndarray, arcs: int) -> Graph:
    s, d = src[:arcs], dst[:arcs]
    keep = s < d
    order = np.lexsort((d[keep], s[keep]))
    return Graph.from_edges(n, zip(s[keep][order].tolist(), d[keep][order].tolist()))


def run_reference(targets: TargetSpec, config: GeneratorConfig | None = None) -> tuple[Graph, RunTrace]:
    """Plain loop over :func:`step`; slow, used to check :func:`run`."""
    config = config or GeneratorConfig()
    n = targets.n
    g, pivots, window, every = _setup(targets, config)
    objective = _Objective(targets, config)
    trace = _new_trace(targets, config, window)
    counts = list(count_all(g).as_tuple())
    start = time.perf_counter()
    best = objective.value(counts)
    best_i, best_counts = 0, list(counts)
    trace.record(0, counts, 0.0)

    toggles: list[tuple[int, int]] = []
    since = 0
    i = 0
    block = np.empty(0, dtype=np.int64)
    status = "window"
    while True:
        if config.max_iterations is not None and i >= config.max_iterations:
            status = "cap"
            break
        if since >= window:
            break
        if i % 4096 == 0:
            block = pivots.integers(0, n, size=4096)
        u = int(block[i % 4096])
        i += 1
        v, counts, value = step(g, u, counts, targets, objective=objective)
        toggles.append((u, v))
        if value < best:
            best, best_i, best_counts = value, i, list(counts)
            since = 0
        else:
            since += 1
        if config.verify_every and i % config.verify_every == 0:
            fresh = count_all(g).as_tuple()
            if tuple(counts) != fresh:
                raise CountDesyncError(f"iteration {i}: maintained {counts} != recount {fresh}")
        if i % every == 0 or since >= window or best_i == i:
            trace.record(i, counts, time.perf_counter() - start)

    _finish(trace, i, counts, best_i, best_counts, status, start, config)
    if config.return_policy == "best":
        for u, v in reversed(toggles[best_i:]):
            g.toggle_edge(u, v)
    return g, trace


def generate(g0: Graph, config: GeneratorConfig | None = None, **kwargs) -> tuple[Graph, RunTrace]:
    """Convenience wrapper taking targets from an input graph."""
    return run(TargetSpec.from_graph(g0), config, **kwargs)
