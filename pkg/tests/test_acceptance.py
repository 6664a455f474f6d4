"""Exit criteria for the library. Each test prints one PASS/FAIL line; the
lines are repeated in the terminal summary."""
import csv
import itertools
import json
import math
import time

import numpy as np
import pytest

import oracles
from symbolic_markov import metrics, partition, pfsa, pipeline, synth
from symbolic_markov.order_est import OrderParams, estimate_order
from symbolic_markov.partition import SymbolSeq
from symbolic_markov.sigprep import preprocess, write_signal

SEEDS = range(20)
PARAMS = OrderParams(gamma=0.5, beta=0.2)

# |A| = 2; every pair of rows differs by >= 0.2 in total variation
CHAINS = {
    0: synth.ChainSpec.from_table(0, 2, [[0.5, 0.5]]),
    1: synth.ChainSpec.from_table(1, 2, [[0.8, 0.2], [0.3, 0.7]]),
    2: synth.ChainSpec.from_table(2, 2, [[0.1, 0.9], [0.8, 0.2], [0.3, 0.7], [0.6, 0.4]]),
}


def min_row_tv(spec):
    rows = spec.table()
    if len(rows) == 1:
        return math.inf
    return min(0.5 * np.abs(a - b).sum() for a, b in itertools.combinations(rows, 2))


def test_01_order_consistency(acceptance_line):
    t0 = time.perf_counter()
    fractions = {}
    for k, spec in CHAINS.items():
        assert min_row_tv(spec) >= 0.2
        for n in (1_000, 10_000, 100_000):
            hits = sum(estimate_order(synth.simulate_chain(spec, n, seed=s), PARAMS).order == k
                       for s in SEEDS)
            fractions[k, n] = hits
    elapsed = time.perf_counter() - t0
    at_max = all(fractions[k, 100_000] >= 18 for k in CHAINS)
    monotone = all(fractions[k, 1_000] <= fractions[k, 10_000] <= fractions[k, 100_000]
                   for k in CHAINS)
    ok = at_max and monotone and elapsed <= 60
    detail = ", ".join(f"k={k}: " + "/".join(str(fractions[k, n]) for n in (1_000, 10_000, 100_000))
                       for k in CHAINS) + f" hits of 20 at n=1e3/1e4/1e5; {elapsed:.1f}s"
    acceptance_line("1 order-estimator consistency", ok, detail)
    assert ok


def test_02_no_memory_inflation(acceptance_line):
    above = sum(estimate_order(synth.simulate_chain(CHAINS[1], 100_000, seed=100 + s),
                               PARAMS).order > 1 for s in SEEDS)
    ok = (20 - above) >= 19
    acceptance_line("2 order-1 chain not inflated", ok, f"{above}/20 estimates above 1")
    assert ok


def test_03_map_smoothing(acceptance_line):
    rng = np.random.default_rng(2024)
    worst_sum, min_entry = 0.0, 1.0
    for _ in range(1000):
        a = int(rng.integers(2, 6))
        q = int(rng.integers(1, 30))
        counts = rng.integers(0, 50, size=(q, a)) * rng.integers(0, 2, size=(q, 1))
        e = pfsa.map_emission(counts, a)
        worst_sum = max(worst_sum, float(np.abs(e.sum(axis=1) - 1).max()))
        min_entry = min(min_entry, float(e.min()))
    examples = (
        pfsa.map_emission([[0, 0, 0]]).tolist() == [[1 / 3, 1 / 3, 1 / 3]]
        and pfsa.map_emission([[4, 0, 1]]).tolist() == [[5 / 8, 1 / 8, 2 / 8]]
        and pfsa.map_emission([[99, 1]]).tolist() == [[100 / 102, 2 / 102]]
    )
    ok = worst_sum <= 1e-12 and min_entry > 0 and examples
    acceptance_line("3 MAP smoothing", ok,
                    f"max |row sum - 1| = {worst_sum:.1e}, min entry {min_entry:.2e}, "
                    f"worked examples {'exact' if examples else 'MISMATCH'}")
    assert ok


def _battery():
    rng = np.random.default_rng(77)
    out = []
    for k, spec in CHAINS.items():
        seq = synth.simulate_chain(spec, 20_000, seed=k)
        out += [pfsa.build_model(seq, d) for d in (1, 2, 3)]
    for a in (2, 3, 4):
        for d in (1, 2, 3):
            seq = SymbolSeq(rng.integers(0, a, size=3000), a)
            out.append(pfsa.build_model(seq, d))
    for seed in range(4):
        for gen in (synth.surrogate_stable, synth.surrogate_unstable):
            pre = preprocess(gen(5000, seed))
            seq = partition.symbolize(partition.fit_max_entropy(pre.signal, 3), pre.signal)
            out += [pfsa.build_model(seq, d) for d in (1, 2, 3, 4)]
    return out


def test_04_stationary_fixed_point(acceptance_line):
    models = _battery()
    worst = max(m.stationary_residual() for m in models)
    sums = max(abs(m.stationary.sum() - 1) for m in models)
    hand = pfsa.stationary_dist(np.array([[0.9, 0.1], [0.5, 0.5]]))
    hand_err = float(np.abs(hand - [5 / 6, 1 / 6]).max())
    ok = worst <= 1e-10 and sums <= 1e-12 and hand_err <= 1e-9
    acceptance_line("4 stationary fixed point", ok,
                    f"{len(models)} models, max ||pP - p||_1 = {worst:.1e}; hand case err {hand_err:.1e}")
    assert ok


def test_05_discrepancy_is_mutual_information(acceptance_line):
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(100):
        a = int(rng.integers(2, 5))
        d = int(rng.integers(1, 4))
        rows = rng.dirichlet(np.full(a, 0.7), size=a**d)
        rows = np.clip(rows, 1e-8, None)
        rows /= rows.sum(axis=1, keepdims=True)
        p = pfsa.stationary_dist(emission=rows)
        m = pfsa.DMarkovModel(d, a, np.zeros(rows.shape, int), rows, p)
        want = oracles.mutual_information(p.tolist(), rows.tolist())
        worst = max(worst, abs(metrics.info_gain_discrepancy(m) - want))
    ok = worst <= 1e-10
    acceptance_line("5 discrepancy == mutual information", ok, f"max abs diff {worst:.1e} over 100 models")
    assert ok


def test_06_mep_equal_frequency(acceptance_line):
    x = np.random.default_rng(6).permutation(3000) + np.random.default_rng(7).uniform(0, 0.5, 3000)
    assert np.unique(x).size == 3000
    seq = partition.symbolize(partition.fit_max_entropy(x, 3), x)
    counts = np.bincount(seq.symbols, minlength=3).tolist()
    h = partition.symbol_entropy(seq)
    ok = counts == [1000, 1000, 1000] and abs(h - math.log(3)) <= 1e-9
    acceptance_line("6 MEP equi-frequency", ok, f"counts {counts}, |H - ln 3| = {abs(h - math.log(3)):.1e}")
    assert ok


def auc(scores_pos, scores_neg):
    """Mann-Whitney AUC: P(pos > neg) + 0.5 P(tie)."""
    wins = sum((p > q) + 0.5 * (p == q) for p in scores_pos for q in scores_neg)
    return wins / (len(scores_pos) * len(scores_neg))


def _surrogate_run(tmp_path, n_each=50, n=10_000):
    for i in range(n_each):
        write_signal(synth.surrogate_stable(n, 1000 + i), tmp_path / f"stable_{i:02d}.csv")
        write_signal(synth.surrogate_unstable(n, 2000 + i), tmp_path / f"unstable_{i:02d}.csv")
    cfg = pipeline.PipelineConfig(
        inputs=(str(tmp_path / "*.csv"),), output_dir=str(tmp_path / "out"),
        alphabet_size=3, partition_method="maxentropy",
        labels={"stable_*": "stable", "unstable_*": "unstable"})
    return cfg, pipeline.run_pipeline(cfg)


@pytest.fixture(scope="module")
def surrogate_batch(tmp_path_factory):
    t0 = time.perf_counter()
    cfg, report = _surrogate_run(tmp_path_factory.mktemp("surrogates"))
    return cfg, report, time.perf_counter() - t0


def _metric_rows(report):
    rows = list(csv.DictReader(report.metrics_csv.splitlines()))
    return {lab: sorted((r for r in rows if r["label"] == lab), key=lambda r: r["source_file"])
            for lab in ("stable", "unstable")}


def test_07_class_separation(surrogate_batch, acceptance_line):
    cfg, report, elapsed = surrogate_batch
    assert report.ok
    rows = _metric_rows(report)
    st_, un = rows["stable"], rows["unstable"]
    assert len(st_) == len(un) == 50
    a = auc([float(r["d_M"]) for r in un], [float(r["d_M"]) for r in st_])
    pairs = sum(float(u["discrepancy"]) > float(s["discrepancy"]) for s, u in zip(st_, un))
    ok = a >= 0.95 and pairs >= 45 and elapsed <= 120
    acceptance_line("7 class separation", ok,
                    f"AUC(d_M) = {a:.3f}, discrepancy unstable > stable in {pairs}/50 pairs, {elapsed:.1f}s")
    assert ok


def test_08_spectral_depth_ordering(surrogate_batch, acceptance_line):
    cfg, report, _ = surrogate_batch
    depth = {"stable": [], "unstable": []}
    for path, arts in report.outputs.items():
        lab = json.loads(arts["diagnostics.json"])["label"]
        depth[lab].append(json.loads(arts["order.json"])["spectral"]["depth"])
    ms, mu = np.mean(depth["stable"]), np.mean(depth["unstable"])
    ok = mu > ms
    acceptance_line("8 spectral depth ordering", ok, f"mean D(0.05): stable {ms:.2f}, unstable {mu:.2f}")
    assert ok


def _tree_bytes(root):
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_09_determinism(tmp_path, acceptance_line):
    for i in range(3):
        write_signal(synth.surrogate_stable(5000, i), tmp_path / f"stable_{i}.csv")
        write_signal(synth.surrogate_unstable(5000, i), tmp_path / f"unstable_{i}.csv")
    trees = []
    for run in ("a", "b"):
        cfg = pipeline.PipelineConfig(inputs=(str(tmp_path / "*.csv"),),
                                      output_dir=str(tmp_path / run),
                                      labels={"stable_*": "stable", "unstable_*": "unstable"})
        pipeline.run_pipeline(cfg)
        trees.append(_tree_bytes(tmp_path / run))
    a, b = trees
    # report.json embeds the output directory, which differs by construction
    a.pop("report.json"), b.pop("report.json")
    ok = a == b and len(a) == 6 * 7 + 1
    acceptance_line("9 determinism", ok, f"{len(a)} artifacts byte-identical" if ok else "artifacts differ")
    assert ok


def test_10_alphabet_permutation_invariance(acceptance_line):
    rng = np.random.default_rng(10)
    worst, order_match = 0.0, 0
    for case in range(20):
        a = int(rng.integers(2, 5))
        k = int(rng.integers(0, 3))
        table = rng.dirichlet(np.ones(a), size=a**k)
        seq = synth.simulate_chain(synth.ChainSpec.from_table(k, a, table), 20_000, seed=case)
        perm = rng.permutation(a)
        other = seq.relabel(perm)
        e1, e2 = estimate_order(seq, PARAMS), estimate_order(other, PARAMS)
        order_match += (e1.order == e2.order and e1.delta_curve == e2.delta_curve)
        depth = max(1, k)
        m1, m2 = pfsa.build_model(seq, depth), pfsa.build_model(other, depth)
        worst = max(worst,
                    abs(metrics.model_complexity(m1) - metrics.model_complexity(m2)),
                    abs(metrics.info_gain_discrepancy(m1) - metrics.info_gain_discrepancy(m2)))
    ok = order_match == 20 and worst <= 1e-12
    acceptance_line("10 alphabet-permutation invariance", ok,
                    f"order/curve identical in {order_match}/20, max metric diff {worst:.1e}")
    assert ok
