import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from symbolic_markov import metrics, pfsa
from symbolic_markov.errors import DimensionMismatch, NonPositiveEntry, ShapeMismatch
from symbolic_markov.partition import SymbolSeq

P, Q = (0.5, 0.5), (0.25, 0.75)


def model_from_rows(rows):
    e = np.asarray(rows, dtype=float)
    a = e.shape[1]
    d = round(math.log(e.shape[0], a))
    p = pfsa.stationary_dist(emission=e)
    return pfsa.DMarkovModel(d, a, np.zeros(e.shape, int), e, p)


def test_kl_closed_form_and_asymmetry():
    assert metrics.kl_divergence(P, P) == 0.0
    assert metrics.kl_divergence(P, Q) == pytest.approx(0.5 * math.log(2) + 0.5 * math.log(2 / 3), abs=1e-15)
    assert metrics.kl_divergence(P, Q) == pytest.approx(0.14384, abs=1e-5)
    assert metrics.kl_divergence(Q, P) == pytest.approx(0.13081, abs=1e-5)


def test_symmetric_kl():
    assert metrics.symmetric_kl(P, P) == 0.0
    assert metrics.symmetric_kl(P, Q) == pytest.approx(0.27465, abs=1e-5)
    assert metrics.symmetric_kl(P, Q) == metrics.symmetric_kl(Q, P)


def test_kl_input_validation():
    with pytest.raises(DimensionMismatch):
        metrics.kl_divergence(P, (0.2, 0.3, 0.5))
    with pytest.raises(NonPositiveEntry):
        metrics.kl_divergence((1.0, 0.0), P)
    with pytest.raises(ValueError):
        metrics.kl_divergence((0.6, 0.6), P)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 8))
def test_gibbs_inequality(seed, k):
    rng = np.random.default_rng(seed)
    p, q = rng.dirichlet(np.ones(k)) + 1e-3, rng.dirichlet(np.ones(k)) + 1e-3
    p, q = p / p.sum(), q / q.sum()
    d = metrics.kl_divergence(p, q)
    assert d == pytest.approx(oracles.kl(p, q), abs=1e-12)
    assert d >= 0
    if np.max(np.abs(p - q)) > 1e-6:
        assert d > 0


def test_model_complexity_examples():
    assert metrics.model_complexity(model_from_rows([[0.5, 0.5], [0.5, 0.5]])) == 0.0
    m = model_from_rows([[0.9, 0.1], [0.5, 0.5]])
    want = oracles.kl([0.9, 0.1], [0.5, 0.5]) + oracles.kl([0.5, 0.5], [0.9, 0.1])
    assert metrics.model_complexity(m) == pytest.approx(want, abs=1e-12)
    assert metrics.model_complexity(m) == pytest.approx(0.4 * math.log(9), abs=1e-12)


def test_model_complexity_middle_row_does_not_change_max():
    rows = [[0.9, 0.1, 1e-9], [0.1, 0.9, 1e-9]]
    rows = [np.array(r) / sum(r) for r in rows]
    two = metrics.model_complexity(rows)
    three = metrics.model_complexity(rows + [(rows[0] + rows[1]) / 2])
    assert three == pytest.approx(two, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.integers(1, 3))
def test_model_complexity_matches_pairwise_loop(seed, a, d):
    rows = np.random.default_rng(seed).dirichlet(np.ones(a), size=a**d) + 1e-4
    rows /= rows.sum(axis=1, keepdims=True)
    want = max(oracles.kl(x, y) + oracles.kl(y, x) for x in rows for y in rows)
    assert metrics.model_complexity(rows, block=3) == pytest.approx(want, abs=1e-10)


def test_discrepancy_zero_for_identical_rows():
    assert metrics.info_gain_discrepancy(model_from_rows([[0.3, 0.7]] * 4)) == pytest.approx(0, abs=1e-15)


def test_discrepancy_alternator_near_ln2():
    m = pfsa.build_model(SymbolSeq([0, 1] * 5000, 2), 1)
    got = metrics.info_gain_discrepancy(m)
    assert got == pytest.approx(oracles.mutual_information(m.stationary.tolist(), m.emission.tolist()), abs=1e-12)
    assert got == pytest.approx(math.log(2), abs=0.01)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.integers(1, 3))
def test_discrepancy_is_mutual_information(seed, a, d):
    rows = np.random.default_rng(seed).dirichlet(np.ones(a), size=a**d)
    rows = np.clip(rows, 1e-6, None)
    rows /= rows.sum(axis=1, keepdims=True)
    m = model_from_rows(rows)
    want = oracles.mutual_information(m.stationary.tolist(), m.emission.tolist())
    assert metrics.info_gain_discrepancy(m) == pytest.approx(want, abs=1e-10)


def test_pairwise_distance_properties():
    rng = np.random.default_rng(0)
    models = [pfsa.build_model(SymbolSeq(rng.integers(0, 3, size=300), 3), 2) for _ in range(6)]
    dm = metrics.distance_matrix(models)
    assert np.all(np.diag(dm) == 0)
    assert np.array_equal(dm, dm.T)
    for i in range(6):
        for j in range(6):
            for k in range(6):
                assert dm[i, k] <= dm[i, j] + dm[j, k] + 1e-15
    assert metrics.pairwise_model_distance(models[0], models[0]) == 0.0


def test_pairwise_distance_shape_mismatch():
    seq = SymbolSeq(np.arange(60) % 3, 3)
    with pytest.raises(ShapeMismatch):
        metrics.pairwise_model_distance(pfsa.build_model(seq, 1), pfsa.build_model(seq, 2))


def test_model_complexity_relabel_invariant():
    seq = SymbolSeq(np.random.default_rng(3).integers(0, 3, size=3000), 3)
    a = metrics.model_complexity(pfsa.build_model(seq, 2))
    b = metrics.model_complexity(pfsa.build_model(seq.relabel([1, 2, 0]), 2))
    assert abs(a - b) <= 1e-12
