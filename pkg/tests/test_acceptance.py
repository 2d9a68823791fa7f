"""Acceptance suite.

Each criterion prints one PASS/FAIL line (visible with `pytest -s` or in
the captured output on failure). Criterion 6 needs the public NIPS and
Facebook datasets; without them it is skipped and criteria 7 and 8 stand
in, per the criterion's own fallback.
"""

import json
import os
import time
from contextlib import contextmanager

import numpy as np
import pytest

from dylp.cli import main
from dylp.dyngraph import build_network
from dylp.geodesics import pair_distances
from dylp.harness import EvalConfig, compare_predictors, run_evaluation
from dylp.ingest import IngestConfig, bin_events, filter_nodes, parse_events, summarize
from dylp.metrics import (LabeledScores, max_f1, ndcg_at_k, pr_auc, pr_curve,
                          precision_at_k, roc_auc)
from dylp.predictors import PredictorConfig
from dylp.synth import SynthConfig, generate

from oracles import auc_bruteforce_outer, prauc_stepping


@contextmanager
def criterion(num, description):
    try:
        yield
    except pytest.skip.Exception:
        print(f"ACCEPTANCE {num} [SKIP] {description}")
        raise
    except BaseException:
        print(f"ACCEPTANCE {num} [FAIL] {description}")
        raise
    print(f"ACCEPTANCE {num} [PASS] {description}")


def _random_instance(rng, max_len, force_ties):
    m = int(rng.integers(2, max_len + 1))
    labels = rng.integers(0, 2, size=m)
    if labels.sum() == 0:
        labels[0] = 1
    if labels.sum() == m:
        labels[0] = 0
    if force_ties:
        scores = rng.integers(0, max(2, m // 4), size=m) / 7.0
    else:
        scores = rng.permutation(m).astype(float)
    return scores, labels


def test_criterion_1_auc_oracle_equivalence():
    with criterion(1, "roc_auc equals brute-force concordance counting (<= 1e-12)"):
        rng = np.random.default_rng(101)
        start = time.monotonic()
        for i in range(200):
            scores, labels = _random_instance(rng, 500, force_ties=i % 2 == 0)
            got = roc_auc(LabeledScores(scores, labels))
            want = auc_bruteforce_outer(scores, labels)
            assert abs(got - want) <= 1e-12
        elapsed = time.monotonic() - start
        assert elapsed < 5.0, f"took {elapsed:.2f}s"


def test_criterion_2_prauc_oracle_equivalence():
    with criterion(2, "pr_auc matches the unit-TP stepping oracle (<= 1e-6)"):
        rng = np.random.default_rng(202)
        start = time.monotonic()
        for i in range(100):
            scores, labels = _random_instance(rng, 300, force_ties=i % 2 == 0)
            got = pr_auc(LabeledScores(scores, labels))
            want = prauc_stepping(scores, labels)
            assert abs(got - want) <= 1e-6
        elapsed = time.monotonic() - start
        assert elapsed < 30.0, f"took {elapsed:.2f}s"


def test_criterion_3_random_baseline_laws():
    with criterion(3, "random predictor: AUC near 0.5, PRAUC near P/(P+N)"):
        # ring keeps every node seen at step 1; step 2 edges at prior 0.01
        n = 460  # C(460, 2) = 105570 candidate pairs
        rng = np.random.default_rng(303)
        ring = [(i, (i + 1) % n) for i in range(n)]
        ring = [(min(u, v), max(u, v)) for u, v in ring]
        iu, iv = np.triu_indices(n, k=1)
        mask = rng.random(iu.size) < 0.01
        step2 = list(zip(iu[mask].tolist(), iv[mask].tolist()))
        net = build_network([(1, ring), (2, step2)], directed=False, num_nodes=n)

        report = run_evaluation(net, PredictorConfig("random", seed=7)).report
        whole = report.whole
        assert whole["P"] + whole["N"] == n * (n - 1) // 2
        assert whole["P"] + whole["N"] >= 10 ** 5
        assert 0.48 <= whole["auc"] <= 0.52
        prior = whole["P"] / (whole["P"] + whole["N"])
        assert abs(whole["prauc"] - prior) / prior <= 0.25
        assert abs(prior - 0.01) / 0.01 < 0.2  # the class prior is as designed


def _directed_random_network(seed, n=25, steps=4, p=0.05):
    rng = np.random.default_rng(seed)
    snaps = []
    for t in range(1, steps + 1):
        edges = [(u, v) for u in range(n) for v in range(n)
                 if u != v and rng.random() < p]
        snaps.append((t, edges))
    return build_network(snaps, directed=True, num_nodes=n)


def test_criterion_4_gmauc_degenerate_predictor_exactly_zero():
    with criterion(4, "TS-Adj scores GMAUC exactly 0 wherever a new edge exists"):
        datasets = [
            generate(SynthConfig(num_nodes=50, num_steps=5, block_prob=0.02,
                                 persist_prob=0.5, seed=s))
            for s in (1, 2, 3)
        ]
        datasets += [
            generate(SynthConfig(num_nodes=120, num_steps=8, num_classes=3,
                                 block_prob=[[0.05, 0.002, 0.002],
                                             [0.002, 0.05, 0.002],
                                             [0.002, 0.002, 0.05]],
                                 persist_prob=0.3, seed=4)),
        ]
        datasets += [_directed_random_network(seed) for seed in (5, 6)]
        checked = 0
        for net in datasets:
            report = run_evaluation(net, PredictorConfig("ts_adj")).report
            if report.new["P"] < 1:
                continue
            checked += 1
            assert report.gmauc == 0.0  # exact, no tolerance
        assert checked >= 5


def test_criterion_5_split_vs_distance_consistency():
    with criterion(5, "previously-observed pairs equal the distance-1 bucket, set-wise"):
        configs = [
            SynthConfig(num_nodes=80, num_steps=5, block_prob=0.01,
                        persist_prob=0.4, seed=11),
            SynthConfig(num_nodes=300, num_steps=4, block_prob=2e-3,
                        persist_prob=0.3, seed=12),
            SynthConfig(num_nodes=150, num_steps=6, num_classes=2,
                        block_prob=[[0.03, 0.001], [0.001, 0.03]],
                        persist_prob=0.5, seed=13),
        ]
        for cfg in configs:
            net = generate(cfg)
            for t in range(1, net.num_steps + 1):
                keys, dist = pair_distances(net, t)
                at_distance_1 = np.sort(keys[dist == 1])
                assert np.array_equal(at_distance_1, net.union_keys(t))


def _check_events_path(var):
    path = os.environ.get(var)
    if not path:
        pytest.skip(f"{var} not set; public dataset unavailable "
                    f"(criteria 7-8 substitute)")
    if not os.path.exists(path):
        pytest.skip(f"{var}={path} does not exist")
    return path


def test_criterion_6_table_replication():
    """Real-data replication. Provide the datasets via environment:

    DYLP_NIPS_EVENTS: undirected co-authorship events `author author step`
        (pre-binned, one step per conference year).
    DYLP_FACEBOOK_EVENTS: directed wall posts `src dst unix_timestamp`.
    """
    with criterion(6, "dataset statistics and ordinal structure replicate"):
        nips_path = _check_events_path("DYLP_NIPS_EVENTS")
        fb_path = _check_events_path("DYLP_FACEBOOK_EVENTS")

        with open(nips_path) as fh:
            nips_events, _ = parse_events(fh)
        nips = bin_events(nips_events, IngestConfig(prebinned=True, directed=False))
        nips = filter_nodes(nips, IngestConfig(prebinned=True, drop_isolated=True))
        stats = summarize(nips)
        assert abs(nips.num_nodes - 2715) / 2715 <= 0.10
        assert abs(stats.mean_edge_prob - 1.7e-3) / 1.7e-3 <= 0.10
        assert abs(stats.mean_prev_edge_prob - 0.031) / 0.031 <= 0.10

        with open(fb_path) as fh:
            fb_events, _ = parse_events(fh)
        fb = bin_events(fb_events, IngestConfig(bin_width_seconds=90 * 86400,
                                                directed=True))
        fb = filter_nodes(fb, IngestConfig(prebinned=True, directed=True,
                                           min_total_degree=30))
        fb_stats = summarize(fb)
        assert abs(fb.num_nodes - 1330) / 1330 <= 0.10
        assert 8 <= fb.num_steps <= 10  # 90-day bins, +/-1 boundary effect
        assert abs(fb_stats.mean_prev_edge_prob - 0.27) / 0.27 <= 0.10

        start = time.monotonic()
        expectations = {  # dataset -> TS-Adj split AUC targets
            "nips": (nips, {"new": 0.500, "prev": 0.855}),
            "facebook": (fb, {"new": 0.500, "prev": 0.705}),
        }
        for name, (net, want) in expectations.items():
            rows = compare_predictors(net, [
                PredictorConfig("ts_adj"), PredictorConfig("ts_aa"),
                PredictorConfig("ts_katz"),
            ], EvalConfig(threads=os.cpu_count() or 1))
            by_name = {r.name: r.report for r in rows}
            adj, aa, katz = (by_name[k] for k in ("ts_adj", "ts_aa", "ts_katz"))
            assert abs(adj.new["auc"] - want["new"]) <= 0.02
            assert abs(adj.prev["auc"] - want["prev"]) <= 0.02
            # ordinal structure: TS-Adj dominates on prev, similarity
            # predictors dominate on new-link PRAUC, TS-Katz leads GMAUC
            assert adj.prev["auc"] > max(aa.prev["auc"], katz.prev["auc"])
            assert adj.prev["prauc"] > max(aa.prev["prauc"], katz.prev["prauc"])
            assert min(aa.new["prauc"], katz.new["prauc"]) > adj.new["prauc"]
            assert katz.gmauc == max(r.report.gmauc for r in rows)
        elapsed = time.monotonic() - start
        assert elapsed < 600.0, f"evaluation took {elapsed:.0f}s"


def test_criterion_7_synthetic_disparity():
    with criterion(7, "persist 0.3 / block 1e-3 yields >=50x disparity and "
                      ">=0.2 pooled-AUC inflation for TS-Adj"):
        cfg = SynthConfig(num_nodes=250, num_steps=6, block_prob=1e-3,
                          persist_prob=0.3, seed=77)
        net = generate(cfg)
        stats = summarize(net)
        assert stats.mean_new_edge_prob is not None
        ratio = stats.mean_prev_edge_prob / stats.mean_new_edge_prob
        assert ratio >= 50.0

        report = run_evaluation(net, PredictorConfig("ts_adj")).report
        assert report.new["auc"] is not None
        assert report.whole["auc"] - report.new["auc"] >= 0.2


class TestCriterion8PropertySuites:
    def test_rank_invariance_50_transforms(self):
        with criterion(8, "rank invariance under 50 increasing transforms"):
            rng = np.random.default_rng(808)
            scores = rng.integers(0, 64, size=400) / 16.0
            labels = rng.integers(0, 2, size=400)
            labels[:2] = [0, 1]
            ls = LabeledScores(scores, labels)
            base = (
                roc_auc(ls), pr_auc(ls), max_f1(pr_curve(ls)),
                precision_at_k(ls, 25), ndcg_at_k(ls, 25),
            )
            blocks = np.unique(scores, return_inverse=True)[1][np.argsort(scores)]
            for i in range(50):
                a = float(rng.uniform(0.1, 10.0))
                b = float(rng.uniform(-5.0, 5.0))
                nonlinear = [
                    lambda x: a * x + b,
                    lambda x: np.exp(x / 8.0) * a,
                    lambda x: np.arctan(x) * a + b,
                    lambda x: x ** 3 + a * x,
                ][i % 4]
                moved = nonlinear(scores)
                same_blocks = np.unique(moved, return_inverse=True)[1][np.argsort(moved)]
                assert np.array_equal(blocks, same_blocks), "transform collapsed ties"
                ls2 = LabeledScores(moved, labels)
                got = (
                    roc_auc(ls2), pr_auc(ls2), max_f1(pr_curve(ls2)),
                    precision_at_k(ls2, 25), ndcg_at_k(ls2, 25),
                )
                assert got == base

    def test_auc_complement_identity(self):
        with criterion(8, "AUC complement identity on tie-free instances"):
            rng = np.random.default_rng(809)
            for _ in range(30):
                m = int(rng.integers(4, 400))
                scores = rng.permutation(m).astype(float)
                labels = rng.integers(0, 2, size=m)
                labels[:2] = [0, 1]
                auc = roc_auc(LabeledScores(scores, labels))
                flipped = roc_auc(LabeledScores(-scores, labels))
                assert abs(flipped - (1.0 - auc)) <= 1e-12

    def test_partition_completeness(self):
        with criterion(8, "new + prev partition every step's candidates"):
            net = generate(SynthConfig(num_nodes=90, num_steps=6, block_prob=0.01,
                                       persist_prob=0.4, seed=88))
            run = run_evaluation(net, PredictorConfig("ts_adj"))
            for row, (step, start, stop) in zip(run.report.per_step, run.step_bounds):
                size = stop - start
                new_size = row["new"]["P"] + row["new"]["N"]
                prev_size = row["prev"]["P"] + row["prev"]["N"]
                assert new_size + prev_size == size
                prev_mask = run.prev[start:stop]
                assert prev_mask.sum() == prev_size
                assert (~prev_mask).sum() == new_size

    def test_determinism_byte_identical_reports(self, tmp_path, monkeypatch):
        with criterion(8, "two identical runs produce byte-identical reports"):
            monkeypatch.setenv("SOURCE_DATE_EPOCH", "1600000000")
            net = generate(SynthConfig(num_nodes=60, num_steps=5, block_prob=0.02,
                                       persist_prob=0.4, seed=99))
            events = tmp_path / "events.txt"
            from dylp.synth import write_events
            write_events(net, events)
            net_file = tmp_path / "net.dyln"
            assert main(["ingest", "--events", str(events), "--prebinned",
                         "--out", str(net_file)]) == 0
            outputs = []
            for name in ("r1", "r2"):
                out_dir = tmp_path / name
                code = main(["evaluate", "--network", str(net_file),
                             "--predictors", "ts_adj,cumulative,ts_aa,ts_katz,random",
                             "--seed", "5", "--out-dir", str(out_dir),
                             "--threads", "2", "--no-figures"])
                assert code == 0
                outputs.append((out_dir / "report.json").read_bytes())
            assert outputs[0] == outputs[1]
            # the parsed report carries identical metric values as well
            r = json.loads(outputs[0])
            assert len(r["predictors"]) == 5
