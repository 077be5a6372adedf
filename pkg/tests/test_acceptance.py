"""Acceptance criteria, one test per criterion (criterion 3 split by golden).

A summary line per criterion is printed at the end of the pytest run.
"""

import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import stats

from prefap import Config, DistSpec, Stream, ThetaOp, generate, join, multiway_join, oracle_multiway
from prefap.baselines import obt_chunks, rbm_partitions
from prefap.bench import mask_timing, stream_seed, t_test
from prefap.cli import main
from prefap.joiner import filtering_join
from prefap.partitioner import amalgamate, boundary_of, span

from .conftest import as_sorted_ids, oracle_ids

ALGOS = ("rbm", "obt", "cfs", "ftj", "prefap")
DISTS = {
    "uniform": ("uniform:20:50", "uniform:10:40"),
    "normal": ("normal:30:5", "normal:25:5"),
    "zipf": ("zipf:1.2", "zipf:1.3"),
}
WORKERS = 4
SEEDS = range(20)
SIZES = (10, 100, 1000)


def pair(dist, seed, n):
    a, b = DISTS[dist]
    r = generate(replace(DistSpec.parse(a), seed=stream_seed(seed, 0), count=n), "R")
    s = generate(replace(DistSpec.parse(b), seed=stream_seed(seed, 1), count=n), "S")
    return r, s


@pytest.fixture(scope="module")
def corpus():
    """Every algorithm on every (op, dist, seed, size) instance, checked against the oracle."""
    runs = []
    for n in SIZES:
        for dist in DISTS:
            for seed in SEEDS:
                r, s = pair(dist, seed, n)
                for op in ThetaOp:
                    want = oracle_ids(op, r, s)
                    for algo in ALGOS:
                        cfg = Config(theta=(op,), algorithm=algo, partitions=10, window=n, workers=WORKERS, seed=seed)
                        res, m = join(r, s, cfg)
                        runs.append(
                            dict(algo=algo, op=op, dist=dist, seed=seed, n=n, ok=np.array_equal(res.sorted_ids(), want), m=m)
                        )
    return runs


MULTI_CHAINS = [(ThetaOp.LT, ThetaOp.LE), (ThetaOp.GT, ThetaOp.GE), (ThetaOp.GE, ThetaOp.LT), (ThetaOp.LE, ThetaOp.GT)]
CHAIN_DISTS = ("uniform:20:50", "uniform:10:40", "uniform:0:30")


def triple(specs, seed, n):
    return [generate(replace(DistSpec.parse(d), seed=stream_seed(seed, k), count=n), "RST"[k]) for k, d in enumerate(specs)]


def multi_corpus():
    cases = []
    three = {
        "uniform": CHAIN_DISTS,
        "normal": ("normal:30:5", "normal:25:5", "normal:20:5"),
        "zipf": ("zipf:1.2", "zipf:1.3", "zipf:1.2"),
    }
    for dist, specs in three.items():
        for seed in range(4):
            for chain in MULTI_CHAINS:
                cases.append((specs, seed, 30, chain))
        for chain in MULTI_CHAINS[:2]:
            cases.append((specs, 0, 200, chain))
    return cases


def test_criterion_1_oracle_equivalence(corpus):
    """1: all algorithms match the oracle (2-way corpus and 3-way cascade)."""
    assert len(corpus) == len(SIZES) * len(DISTS) * len(SEEDS) * 4 * len(ALGOS)
    bad = [(r["algo"], r["op"].name, r["dist"], r["seed"], r["n"]) for r in corpus if not r["ok"]]
    assert not bad, bad[:10]
    for specs, seed, n, chain in multi_corpus():
        streams = triple(specs, seed, n)
        want = as_sorted_ids(oracle_multiway(streams, chain), 3)
        for algo in ALGOS:
            res, m = multiway_join(streams, chain, Config(theta=chain, algorithm=algo, window=n, workers=WORKERS, seed=seed))
            assert np.array_equal(res.sorted_ids(), want), (algo, chain, specs, seed, n)
            assert m.cartesian_count >= m.result_count


def test_criterion_2_lower_bound(corpus):
    """2: cartesian_count >= result_count; RBM and OBT evaluate exactly |r|*|s|."""
    for r in corpus:
        m = r["m"]
        assert m.cartesian_count >= m.result_count
        if r["algo"] in ("rbm", "obt"):
            assert m.cartesian_count == r["n"] * r["n"]


def test_criterion_3a_span_and_boundaries():
    """3a: span(1,9,3) = 8/3 and boundaries {1, 3.67, 6.33, 9}."""
    assert abs(span(1, 9, 3) - 8 / 3) < 1e-9
    b = boundary_of(Stream("R", np.arange(1.0, 10.0)), 3)
    assert len(b.cuts) == 4
    assert all(abs(x - y) < 1e-9 for x, y in zip(b.cuts, (1, 11 / 3, 19 / 3, 9)))


def test_criterion_3b_amalgamated_intervals():
    """3b: amalgamating R's and S's boundaries gives exactly the seven listed intervals."""
    apb = amalgamate(boundary_of(Stream("R", np.arange(1.0, 10.0)), 3), boundary_of(Stream("S", np.arange(0.0, 9.0)), 3))
    want = [(0, 1), (1, 8 / 3), (8 / 3, 11 / 3), (11 / 3, 16 / 3), (16 / 3, 19 / 3), (19 / 3, 8), (8, 9)]
    ivs = apb.intervals()
    assert len(ivs) == 7
    for iv, (lo, hi) in zip(ivs, want):
        assert abs(iv.lo - lo) < 1e-9 and abs(iv.hi - hi) < 1e-9
    assert [iv.closed_hi for iv in ivs] == [False] * 6 + [True]


def test_criterion_3c_rbm_sampled_cuts():
    """3c: RBM on sorted [1..9] with p=3 samples cuts 3 and 6 (as stated)."""
    ranges, _ = rbm_partitions(Stream("R", np.arange(1.0, 10.0)), 3)
    assert [hi for _, hi in ranges[:-1]] == [3.0, 6.0]


def test_criterion_3d_rbm_skew():
    """3d: RBM on [1,1,1,1,1,1,2,2,3] gives (-inf,1), [1,2), [2,+inf) with an empty first range."""
    ranges, parts = rbm_partitions(Stream("R", [1, 1, 1, 1, 1, 1, 2, 2, 3]), 3)
    assert ranges == [(-math.inf, 1.0), (1.0, 2.0), (2.0, math.inf)]
    assert parts[0] == []


def test_criterion_3e_obt_chunks():
    """3e: OBT on 9 elements with p=3 gives the 1st-3rd, 4th-6th and 7th-9th elements."""
    chunks = obt_chunks(Stream("R", [5, 1, 9, 3, 7, 2, 8, 6, 4]), 3)
    assert [c.values.tolist() for c in chunks] == [[1, 2, 3], [4, 5, 6], [7, 8, 9]]


def _defaults_instances(dist, seeds=range(30)):
    for seed in seeds:
        yield pair(dist, 1000 + seed, 1000)


def test_criterion_4_dominance_over_ftj():
    """4: Prefap <= FTJ on every default instance, lower mean; exact without re-partitioning."""
    cfg = Config(theta=(ThetaOp.GT,), partitions=10, window=1000, workers=WORKERS)
    for dist in DISTS:
        pre, ftj = [], []
        for r, s in _defaults_instances(dist):
            _, mp = filtering_join(r, s, cfg)
            _, mf = filtering_join(r, s, cfg, prefilter=False, amalgamation=False)
            assert mp.cartesian_count <= mf.cartesian_count, dist
            pre.append(mp.cartesian_count)
            ftj.append(mf.cartesian_count)
            _, mpn = filtering_join(r, s, cfg, repartition=False)
            _, mfn = filtering_join(r, s, cfg, prefilter=False, amalgamation=False, repartition=False)
            assert mpn.cartesian_count <= mfn.cartesian_count, dist
        assert np.mean(pre) < np.mean(ftj)
        print(f"\n  {dist}: mean Cartesian reduction vs FTJ {1 - np.mean(pre) / np.mean(ftj):.1%}")


def test_criterion_5_ablation_ordering():
    """5: mean cartesian_count full <= each single ablation <= double ablation."""
    base = Config(theta=(ThetaOp.GT,), partitions=10, window=1000, workers=WORKERS)
    for dist in ("uniform", "zipf"):
        totals = {k: [] for k in ("full", "pre", "amal", "both")}
        for r, s in _defaults_instances(dist):
            totals["full"].append(join(r, s, base)[1].cartesian_count)
            totals["pre"].append(join(r, s, replace(base, disable_prefilter=True))[1].cartesian_count)
            totals["amal"].append(join(r, s, replace(base, disable_amalgamation=True))[1].cartesian_count)
            totals["both"].append(join(r, s, replace(base, disable_prefilter=True, disable_amalgamation=True))[1].cartesian_count)
        mean = {k: np.mean(v) for k, v in totals.items()}
        assert mean["full"] <= mean["pre"] <= mean["both"], (dist, mean)
        assert mean["full"] <= mean["amal"] <= mean["both"], (dist, mean)
        print(f"\n  {dist}: " + ", ".join(f"{k} {v:.0f} ({v / mean['full'] - 1:+.1%})" for k, v in mean.items()))


def test_criterion_6_load_balancing(corpus):
    """6: lb ratios within [1, workers]; re-partitioning lowers mean lb_in on Zipf(1.2)."""
    for r in corpus:
        assert 1.0 <= r["m"].lb_in <= WORKERS and 1.0 <= r["m"].lb_out <= WORKERS
    cfg = Config(theta=(ThetaOp.GT,), workers=WORKERS)
    with_rep, without = [], []
    for seed in range(30):
        r = generate(DistSpec("zipf", (1.2,), stream_seed(seed, 0), 1000), "R")
        s = generate(DistSpec("zipf", (1.2,), stream_seed(seed, 1), 1000), "S")
        _, a = join(r, s, cfg)
        _, b = join(r, s, replace(cfg, disable_repartition=True))
        for m in (a, b):
            assert 1.0 <= m.lb_in <= WORKERS and 1.0 <= m.lb_out <= WORKERS
        with_rep.append(a.lb_in)
        without.append(b.lb_in)
    assert np.mean(with_rep) <= np.mean(without)
    print(f"\n  zipf(1.2) mean lb_in: {np.mean(with_rep):.3f} with re-partitioning, {np.mean(without):.3f} without")


def test_criterion_7_significance(capsys):
    """7: t-test p < 1e-6 for a clear separation, matching scipy to 1e-6; report has -log(p)."""
    rng = np.random.default_rng(2024)
    a, b = rng.normal(0, 0.1, 30), rng.normal(1, 0.1, 30)
    res = t_test(a, b)
    ref = stats.ttest_ind(a, b, equal_var=False, alternative="less")
    assert res.p_value < 1e-6
    assert abs(res.p_value - ref.pvalue) < 1e-6
    code = main(["bench", "--algo", "prefap,ftj", "--repeat", "30", "--significance", "--dist-r", "zipf:1.2", "--dist-s", "zipf:1.3"])
    out = capsys.readouterr().out
    assert code == 0
    import json

    sig = json.loads(out.splitlines()[-1])["significance"]
    assert set(sig) == {"cartesian_count", "elapsed_ms", "lb_in", "lb_out"}
    for metric, entry in sig.items():
        assert "neg_log_p" in entry and "p_value" in entry
        if entry["p_value"]:
            assert entry["neg_log_p"] == pytest.approx(-math.log(entry["p_value"]))


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "--algo", "prefap", "--dist-r", "uniform:20:50", "--dist-s", "uniform:10:40", "--n", "2000", "--seed", "7"],
        ["run", "--algo", "obt", "--theta", "le", "--dist-r", "normal:30:5", "--dist-s", "normal:25:5", "--seed", "3"],
        ["ablation", "--dist-r", "zipf:1.2", "--dist-s", "zipf:1.3", "--repeat", "3"],
        ["bench", "--repeat", "3", "--significance", "--theta", "lt", "--n", "500", "--window", "500"],
        ["run", "--algo", "cfs", "--theta", "lt,le", "--n", "100", "--window", "100"],
    ],
)
def test_criterion_8_determinism(capsys, argv):
    """8: identical flags and seed give byte-identical JSON once timing is masked."""
    outs = []
    for _ in range(2):
        assert main(argv) == 0
        outs.append(capsys.readouterr().out)
    assert mask_timing(outs[0]).encode() == mask_timing(outs[1]).encode()
