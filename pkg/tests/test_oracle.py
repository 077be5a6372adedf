import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prefap import Stream, ThetaOp, oracle_join, oracle_multiway
from prefap.model import ArityMismatch

from .conftest import values_lists


def test_two_way_examples():
    assert oracle_join(ThetaOp.GT, Stream("r", [1, 2]), Stream("s", [1, 2])) == ([(1, 0)], 4)
    assert oracle_join(ThetaOp.GT, Stream("r", [1, 2]), Stream("s", [])) == ([], 0)
    assert oracle_join(ThetaOp.GE, Stream("r", [3]), Stream("s", [3])) == ([(0, 0)], 1)


def test_output_order_is_r_then_s():
    res, _ = oracle_join(ThetaOp.LT, Stream("r", [0, 1]), Stream("s", [5, 2]))
    assert res == [(0, 0), (0, 1), (1, 0), (1, 1)]


@given(values_lists, values_lists)
def test_duality_and_bound(rv, sv):
    r, s = Stream("r", rv), Stream("s", sv)
    gt, n = oracle_join(ThetaOp.GT, r, s)
    lt, _ = oracle_join(ThetaOp.LT, s, r)
    assert sorted(gt) == sorted((b, a) for a, b in lt)
    assert len(gt) <= n == len(r) * len(s)


def test_multiway_examples():
    ones = [Stream(n, [1]) for n in "RST"]
    assert oracle_multiway(ones, [ThetaOp.LT, ThetaOp.LT]) == []
    pairs = [Stream(n, [1, 2]) for n in "RST"]
    assert oracle_multiway(pairs, [ThetaOp.LT, ThetaOp.LE]) == [(0, 1, 1)]


def test_multiway_visits_every_combination(monkeypatch):
    import prefap.oracle as oracle

    calls = []
    real = oracle.theta_holds
    monkeypatch.setattr(oracle, "theta_holds", lambda op, a, b: calls.append(1) or real(op, a, b))
    streams = [Stream("R", [1, 2]), Stream("S", [5, 6, 7]), Stream("T", [0, 1, 2, 3])]
    oracle_multiway(streams, [ThetaOp.GT, ThetaOp.GT])
    # the first predicate fails everywhere, so each of the 2*3*4 tuples costs one check
    assert len(calls) == 2 * 3 * 4


def test_multiway_arity():
    with pytest.raises(ArityMismatch):
        oracle_multiway([Stream("R", [1]), Stream("S", [1])], [])
