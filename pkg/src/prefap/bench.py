"""Benchmark harness: windowed runs, ablations, Welch t-tests and reports."""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import stdtr

from .datasource import DistSpec, generate, windows
from .joiner import run
from .model import Algorithm, Config, JoinError, JoinResults, Stream, ThetaOp

METRICS = ("cartesian_count", "result_count", "elapsed_ms", "lb_in", "lb_out")
# the four quantities compared in significance tests
SIGNIFICANCE_METRICS = ("cartesian_count", "elapsed_ms", "lb_in", "lb_out")
TIMING_FIELDS = ("elapsed_ms",)

ABLATIONS = {
    "full": {},
    "-prefilter": {"disable_prefilter": True},
    "-amalgamation": {"disable_amalgamation": True},
    "-prefilter,-amalgamation": {"disable_prefilter": True, "disable_amalgamation": True},
}


class DegenerateSample(JoinError):
    pass


@dataclass(frozen=True)
class RunRecord:
    algo: str
    theta: str
    seed: int
    window_index: int
    cartesian_count: int
    result_count: int
    elapsed_ms: float
    lb_in: float
    lb_out: float


@dataclass
class BenchReport:
    runs: list[RunRecord] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def aggregate(self) -> dict:
        return aggregate(self.runs)

    def by_algo(self, algo: str) -> list[RunRecord]:
        return [r for r in self.runs if r.algo == algo]

    def column(self, algo: str, metric: str) -> list[float]:
        return [getattr(r, metric) for r in self.by_algo(algo)]

    def to_jsonl(self) -> str:
        lines = [json.dumps(asdict(r)) for r in self.runs]
        doc = {"aggregate": self.aggregate}
        doc.update(self.extra)
        lines.append(json.dumps(doc))
        return "\n".join(lines) + "\n"

    def runs_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=[f for f in RunRecord.__dataclass_fields__], lineterminator="\n")
        w.writeheader()
        for r in self.runs:
            w.writerow(asdict(r))
        return buf.getvalue()

    def aggregate_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["algo", "metric", "mean", "min", "max", "stddev"])
        for algo, metrics in self.aggregate.items():
            for metric, st in metrics.items():
                w.writerow([algo, metric, st["mean"], st["min"], st["max"], st["stddev"]])
        return buf.getvalue()


def aggregate(runs: Iterable[RunRecord]) -> dict:
    """``{algo: {metric: {mean, min, max, stddev}}}``; stddev is the population one."""
    grouped: dict[str, list[RunRecord]] = {}
    for r in runs:
        grouped.setdefault(r.algo, []).append(r)
    out = {}
    for algo, rows in grouped.items():
        out[algo] = {}
        for m in METRICS:
            xs = [float(getattr(r, m)) for r in rows]
            out[algo][m] = {
                "mean": statistics.fmean(xs),
                "min": min(xs),
                "max": max(xs),
                "stddev": statistics.pstdev(xs),
            }
    return out


def theta_label(thetas: Sequence[ThetaOp]) -> str:
    return ",".join(t.name.lower() for t in thetas)


def algo_label(cfg: Config) -> str:
    label = cfg.algorithm.value
    off = [name for name, flag in (("prefilter", cfg.disable_prefilter), ("amalgamation", cfg.disable_amalgamation)) if flag]
    if off:
        label += "[" + ",".join("-" + o for o in off) + "]"
    return label


def stream_seed(seed: int, k: int) -> int:
    """Seed of the k-th generated input stream for a run seeded with ``seed``."""
    return int(np.random.SeedSequence([seed, k]).generate_state(1, np.uint64)[0])


def synthetic_source(dists: Sequence[str], n: int, names: Sequence[str] = ("R", "S", "T")) -> Callable[[int], list[Stream]]:
    """Source of seeded synthetic streams: ``source(seed)`` builds one stream per dist."""
    specs = [DistSpec.parse(d) for d in dists]  # validate eagerly

    def source(seed: int, count: int = n) -> list[Stream]:
        return [
            generate(replace(spec, seed=stream_seed(seed, k), count=count), names[k])
            for k, spec in enumerate(specs)
        ]

    return source


def run_windows(
    streams: Sequence[Stream],
    cfg: Config,
    window_offset: int = 0,
    keep_results: bool = False,
) -> tuple[list[RunRecord], list[tuple[int, JoinResults]]]:
    """Join aligned tumbling windows (window i of every stream together)."""
    records, dumps = [], []
    wins = [windows(s, cfg.window) for s in streams]
    label, theta = algo_label(cfg), theta_label(cfg.theta)
    for i, ws in enumerate(zip(*wins)):
        res, m = run(list(ws), cfg)
        records.append(
            RunRecord(label, theta, cfg.seed, window_offset + i, m.cartesian_count, m.result_count, m.elapsed_ms, m.lb_in, m.lb_out)
        )
        if keep_results:
            dumps.append((window_offset + i, res))
    return records, dumps


def run_join(
    source: Callable[..., list[Stream]],
    cfg: Config,
    repeat: int = 1,
    repeat_mode: str = "seeds",
    n: int | None = None,
    keep_results: bool = False,
) -> tuple[BenchReport, list[tuple[int, JoinResults]]]:
    """Run ``cfg`` over ``repeat`` input sets.

    ``repeat_mode="seeds"`` regenerates the inputs with seeds ``cfg.seed + k``;
    ``"windows"`` draws one long input with ``cfg.seed`` and gives each repeat
    its own consecutive slice of ``n`` elements.
    """
    report = BenchReport()
    dumps = []
    if repeat_mode == "windows" and n is not None:
        long = source(cfg.seed, n * repeat)
        offset = 0
        for k in range(repeat):
            part = [s.take(slice(k * n, (k + 1) * n)) for s in long]
            recs, d = run_windows(part, cfg, offset, keep_results)
            report.runs += recs
            dumps += d
            offset += len(recs)
    elif repeat_mode in ("seeds", "windows"):
        for k in range(repeat):
            c = replace(cfg, seed=cfg.seed + k)
            recs, d = run_windows(source(c.seed), c, 0, keep_results)
            report.runs += recs
            dumps += d
    else:
        raise ValueError(f"unknown repeat mode {repeat_mode!r}")
    return report, dumps


def run_ablation(source, cfg: Config, repeat: int = 1, repeat_mode: str = "seeds", n: int | None = None) -> BenchReport:
    """Full Prefap and its three ablated variants on identical inputs.

    ``report.extra["deltas"]`` holds ``(variant - full) / full`` of each
    metric's mean, per variant.
    """
    cfg = replace(cfg, algorithm=Algorithm.PREFAP, disable_prefilter=False, disable_amalgamation=False)
    report = BenchReport()
    labels = {}
    for name, flags in ABLATIONS.items():
        variant = replace(cfg, **flags)
        labels[name] = algo_label(variant)
        sub, _ = run_join(source, variant, repeat, repeat_mode, n)
        report.runs += sub.runs
    agg = report.aggregate
    full = agg[labels["full"]]
    deltas = {}
    for name, label in labels.items():
        deltas[name] = {}
        for m in METRICS:
            base = full[m]["mean"]
            deltas[name][m] = (agg[label][m]["mean"] - base) / base if base else 0.0
    report.extra["deltas"] = deltas
    return report


@dataclass(frozen=True)
class TTestResult:
    statistic: float
    df: float
    p_value: float

    @property
    def neg_log_p(self) -> float:
        return -math.log(self.p_value) if self.p_value > 0 else math.inf


def t_test(sample_a: Sequence[float], sample_b: Sequence[float]) -> TTestResult:
    """One-sided Welch t-test of ``mean(a) < mean(b)``.

    Raises DegenerateSample when both samples have zero variance and equal
    means; with zero variance but different means the p-value is 0 or 1.
    """
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise ValueError("both samples need at least two observations")
    ma, mb = a.mean(), b.mean()
    va, vb = a.var(ddof=1) / a.size, b.var(ddof=1) / b.size
    se2 = va + vb
    if se2 == 0:
        if ma == mb:
            raise DegenerateSample("both samples are constant with equal means")
        return TTestResult(-math.inf if ma < mb else math.inf, math.nan, 0.0 if ma < mb else 1.0)
    t = (ma - mb) / math.sqrt(se2)
    df = se2**2 / (va**2 / (a.size - 1) + vb**2 / (b.size - 1))
    return TTestResult(float(t), float(df), float(stdtr(df, t)))


def significance(report: BenchReport, better: str, baseline: str, metrics=SIGNIFICANCE_METRICS) -> dict:
    """Per-metric one-sided test that ``better`` has the lower mean than ``baseline``."""
    out = {}
    for m in metrics:
        try:
            res = t_test(report.column(better, m), report.column(baseline, m))
        except DegenerateSample as exc:
            out[m] = {"p_value": None, "neg_log_p": None, "note": str(exc)}
            continue
        nlp = res.neg_log_p
        out[m] = {"p_value": res.p_value, "neg_log_p": nlp if math.isfinite(nlp) else None, "t": res.statistic, "df": res.df}
    return out


def results_csv(dumps: Sequence[tuple[int, JoinResults]], names: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["window_index"] + [f"{n}_{c}" for n in names for c in ("id", "value")])
    for wi, res in dumps:
        for row_ids, row_vals in zip(res.ids.tolist(), res.values.tolist()):
            row = [wi]
            for i, v in zip(row_ids, row_vals):
                row += [i, repr(v)]
            w.writerow(row)
    return buf.getvalue()


def mask_timing(text: str) -> str:
    """Replace every timing field in JSON-lines output with ``null``."""
    out = []
    for line in text.splitlines():
        doc = json.loads(line)
        out.append(json.dumps(_mask(doc)))
    return "\n".join(out)


def _mask(obj):
    if isinstance(obj, dict):
        return {k: (None if k in TIMING_FIELDS else _mask(v)) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_mask(v) for v in obj]
    return obj
