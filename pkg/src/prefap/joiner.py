"""Partition-level filtering, scheduling, Cartesian evaluation and the
end-to-end Prefap pipeline (two-way and cascaded multi-way)."""

from __future__ import annotations

import heapq
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .model import (
    ArityMismatch,
    Config,
    JoinResults,
    JoinTask,
    Partition,
    RunMetrics,
    Stream,
    ThetaOp,
)
from .partitioner import PartitionPlan, amalgamate, assign, boundary_of, isolated_plan, repartition_oversized
from .prefilter import prefilter_pair

# upper bound on the boolean matrix materialised per evaluation block
_BLOCK_CELLS = 1 << 22


@dataclass(frozen=True, eq=False)
class Schedule:
    tasks: tuple[JoinTask, ...]
    workers: int

    def loads(self) -> list[int]:
        loads = [0] * self.workers
        for t in self.tasks:
            loads[t.worker] += t.pair_count
        return loads


def partition_filter(op: ThetaOp, pr: Partition, ps: Partition) -> bool:
    """Keep the pair iff some element pair could satisfy ``op``."""
    if op is ThetaOp.GT:
        return pr.max > ps.min
    if op is ThetaOp.GE:
        return pr.max >= ps.min
    if op is ThetaOp.LT:
        return pr.min < ps.max
    return pr.min <= ps.max


def kept_pairs(op: ThetaOp, left: Sequence[Partition], right: Sequence[Partition]) -> list[tuple[Partition, Partition]]:
    return [(pr, ps) for pr in left for ps in right if partition_filter(op, pr, ps)]


def schedule(pairs: Sequence[tuple[Partition, Partition]], workers: int, seed: int | None = None) -> Schedule:
    """Greedy longest-first placement onto the least-loaded worker.

    Task indices follow the order of ``pairs``; placement visits tasks by
    descending pair count (ties by position) and picks the lowest-numbered
    worker among the least loaded.  ``seed`` is unused here; it exists so
    the random placement of :func:`schedule_random` shares the signature.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    sizes = [len(a) * len(b) for a, b in pairs]
    order = sorted(range(len(pairs)), key=lambda k: (-sizes[k], k))
    heap = [(0, w) for w in range(workers)]
    placed = [0] * len(pairs)
    for k in order:
        load, w = heapq.heappop(heap)
        placed[k] = w
        heapq.heappush(heap, (load + sizes[k], w))
    tasks = tuple(JoinTask(a, b, placed[k], k) for k, (a, b) in enumerate(pairs))
    return Schedule(tasks, workers)


def schedule_random(pairs: Sequence[tuple[Partition, Partition]], workers: int, seed: int) -> Schedule:
    """Uniform random placement of each task, driven by ``seed``."""
    rng = np.random.default_rng(seed)
    placed = rng.integers(0, workers, size=len(pairs)).tolist()
    tasks = tuple(JoinTask(a, b, placed[k], k) for k, (a, b) in enumerate(pairs))
    return Schedule(tasks, workers)


def _evaluate(task: JoinTask, op: ThetaOp):
    lv, rv = task.left.values, task.right.values
    cmp = op.ufunc
    rows = max(1, _BLOCK_CELLS // max(1, rv.size))
    li, rj = [], []
    for start in range(0, lv.size, rows):
        a, b = np.nonzero(cmp(lv[start : start + rows, None], rv[None, :]))
        li.append(a + start)
        rj.append(b)
    li = np.concatenate(li) if li else np.empty(0, np.intp)
    rj = np.concatenate(rj) if rj else np.empty(0, np.intp)
    ids = np.column_stack((task.left.ids[li], task.right.ids[rj]))
    vals = np.column_stack((lv[li], rv[rj]))
    return ids, vals


def execute(sched: Schedule, op: ThetaOp) -> tuple[JoinResults, RunMetrics]:
    """Evaluate every scheduled pair and collect results in task order."""
    t0 = time.perf_counter()
    slots: list = [None] * len(sched.tasks)
    lanes: list[list[JoinTask]] = [[] for _ in range(sched.workers)]
    for t in sched.tasks:
        lanes[t.worker].append(t)

    def run_lane(lane):
        for t in lane:
            slots[t.index] = _evaluate(t, op)

    busy = [lane for lane in lanes if lane]
    if len(busy) > 1:
        with ThreadPoolExecutor(max_workers=len(busy)) as pool:
            list(pool.map(run_lane, busy))
    else:
        for lane in busy:
            run_lane(lane)

    per_in = [0] * sched.workers
    per_out = [0] * sched.workers
    for t, (ids, _) in zip(sched.tasks, slots):
        per_in[t.worker] += t.pair_count
        per_out[t.worker] += ids.shape[0]
    if slots:
        results = JoinResults(np.concatenate([s[0] for s in slots]), np.concatenate([s[1] for s in slots]))
    else:
        results = JoinResults.empty(2)
    elapsed = (time.perf_counter() - t0) * 1e3
    metrics = RunMetrics(sum(per_in), len(results), elapsed, tuple(per_in), tuple(per_out))
    return results, metrics


def plan_streams(
    op: ThetaOp,
    r: Stream,
    s: Stream,
    cfg: Config,
    *,
    prefilter: bool = True,
    amalgamation: bool = True,
    repartition: bool = True,
) -> tuple[PartitionPlan, PartitionPlan] | None:
    """Stages 1 and 2 of the pipeline plus re-partitioning.

    Returns ``None`` when nothing can join (an input is empty, before or
    after pre-filtering).
    """
    if prefilter:
        r, s = prefilter_pair(op, r, s)
    if len(r) == 0 or len(s) == 0:
        return None
    p = cfg.partitions
    if amalgamation:
        apb = amalgamate(boundary_of(r, p), boundary_of(s, p))
        plan_r, plan_s = assign(r, apb), assign(s, apb)
    else:
        plan_r, plan_s = isolated_plan(r, p), isolated_plan(s, p)
    if repartition:
        plan_r = repartition_oversized(plan_r, cfg.window, cfg.ceil_subspan)
        plan_s = repartition_oversized(plan_s, cfg.window, cfg.ceil_subspan)
    return plan_r, plan_s


def filtering_join(
    r: Stream,
    s: Stream,
    cfg: Config,
    *,
    prefilter: bool = True,
    amalgamation: bool = True,
    repartition: bool = True,
) -> tuple[JoinResults, RunMetrics]:
    """Shared body of Prefap and FTJ, with each stage switchable."""
    t0 = time.perf_counter()
    op = cfg.op
    plans = plan_streams(op, r, s, cfg, prefilter=prefilter, amalgamation=amalgamation, repartition=repartition)
    if plans is None:
        return JoinResults.empty(2), RunMetrics.zero(cfg.workers, (time.perf_counter() - t0) * 1e3)
    pairs = kept_pairs(op, plans[0].partitions, plans[1].partitions)
    results, metrics = execute(schedule(pairs, cfg.workers), op)
    return results, metrics.with_elapsed((time.perf_counter() - t0) * 1e3)


def prefap_join(r: Stream, s: Stream, cfg: Config) -> tuple[JoinResults, RunMetrics]:
    """Two-way theta-join of ``r`` and ``s`` under ``cfg.op``.

    Pre-filters both streams, partitions them on the union of their range
    boundaries, splits oversized partitions, drops partition pairs that
    cannot match and evaluates the rest on the worker pool.  The ablation
    flags in ``cfg`` switch off the pre-filter and/or the amalgamated
    boundary (falling back to per-stream boundaries).
    """
    return filtering_join(
        r,
        s,
        cfg,
        prefilter=not cfg.disable_prefilter,
        amalgamation=not cfg.disable_amalgamation,
        repartition=not cfg.disable_repartition,
    )


def join(r: Stream, s: Stream, cfg: Config) -> tuple[JoinResults, RunMetrics]:
    """Dispatch a two-way join to the algorithm selected in ``cfg``."""
    from .baselines import ALGORITHMS

    return ALGORITHMS[cfg.algorithm](r, s, cfg)


def _sum_metrics(stages: list[RunMetrics], result_count: int, elapsed_ms: float, workers: int) -> RunMetrics:
    per_in = [0] * workers
    per_out = [0] * workers
    for m in stages:
        for w in range(workers):
            per_in[w] += m.per_worker_in[w]
            per_out[w] += m.per_worker_out[w]
    return RunMetrics(
        sum(m.cartesian_count for m in stages),
        result_count,
        elapsed_ms,
        tuple(per_in),
        tuple(per_out),
        tuple(stages),
    )


def multiway_join(
    streams: Sequence[Stream],
    thetas: Sequence[ThetaOp],
    cfg: Config,
    join_fn: Callable[[Stream, Stream, Config], tuple[JoinResults, RunMetrics]] | None = None,
) -> tuple[JoinResults, RunMetrics]:
    """Left-to-right cascade of two-way joins.

    After each stage the rightmost attribute of every intermediate tuple
    becomes a derived stream (payload id = tuple index) that is joined with
    the next input; matches are expanded back into full tuples.  Per-stage
    metrics are kept in ``metrics.stages``; the totals sum over stages.
    """
    if len(streams) < 2 or len(streams) != len(thetas) + 1:
        raise ArityMismatch(f"{len(streams)} streams need {len(streams) - 1} operators, got {len(thetas)}")
    join_fn = join_fn or join
    t0 = time.perf_counter()
    stages: list[RunMetrics] = []

    res, m = join_fn(streams[0], streams[1], replace(cfg, theta=(thetas[0],)))
    stages.append(m)
    ids, vals = res.ids, res.values
    for k in range(2, len(streams)):
        derived = Stream(f"stage{k - 1}", vals[:, -1], np.arange(ids.shape[0]))
        res, m = join_fn(derived, streams[k], replace(cfg, theta=(thetas[k - 1],)))
        stages.append(m)
        rows = res.ids[:, 0]
        ids = np.column_stack((ids[rows], res.ids[:, 1]))
        vals = np.column_stack((vals[rows], res.values[:, 1]))
    results = JoinResults(ids, vals)
    elapsed = (time.perf_counter() - t0) * 1e3
    return results, _sum_metrics(stages, len(results), elapsed, cfg.workers)


def run(streams: Sequence[Stream], cfg: Config) -> tuple[JoinResults, RunMetrics]:
    """Two-way or multi-way join depending on the number of operators in ``cfg``."""
    if len(streams) == 2 and len(cfg.theta) == 1:
        return join(streams[0], streams[1], cfg)
    return multiway_join(streams, cfg.theta, cfg)

