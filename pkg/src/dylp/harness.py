"""Rolling one-step-forward evaluation.

For each cutoff t = 1..T-1 the harness scores every candidate pair (all
pairs of nodes already seen by the cutoff), labels them with the edges of
step t+1, and splits them by whether the pair was previously observed.
Scores and labels are concatenated across steps into three populations
(all pairs, new-only, previously-observed-only) before any metric is
computed, so the headline numbers are pooled, with per-step breakdowns
kept for debugging.

The whole-network population gets AUC, PRAUC and max-F1; the two split
populations get AUC and PRAUC; the unified score combines the new-link
PRAUC and previously-observed AUC with the pooled new-candidate class
counts. Undefined metrics surface as None, never as silent zeros.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import metrics
from .dyngraph import DynamicNetwork, canonical_pair, decode_pair_keys
from .errors import InsufficientHistoryError, UndefinedMetricError
from .predictors import PredictorConfig, ScoreSet, predict


class CandidateSet:
    """Evaluable pairs at one prediction step.

    ``pair_keys`` enumerates the candidate universe at the cutoff,
    ``labels`` holds the step t+1 edge indicators, and ``prev`` flags the
    pairs with a previously observed edge. Pairs involving nodes unseen
    at the cutoff are excluded, including their step t+1 edges.
    """

    __slots__ = ("target_step", "pair_keys", "labels", "prev", "num_nodes", "directed")

    def __init__(self, target_step, pair_keys, labels, prev, num_nodes, directed):
        self.target_step = int(target_step)
        self.pair_keys = pair_keys
        self.labels = labels
        self.prev = prev
        self.num_nodes = int(num_nodes)
        self.directed = bool(directed)

    def __len__(self) -> int:
        return int(self.pair_keys.size)

    def pairs(self):
        u, v = decode_pair_keys(self.pair_keys, self.num_nodes)
        yield from zip(u.tolist(), v.tolist())

    def _index(self, pair) -> int:
        u, v = canonical_pair(*pair, self.directed)
        key = np.int64(u) * self.num_nodes + v
        pos = int(np.searchsorted(self.pair_keys, key))
        if pos >= len(self.pair_keys) or self.pair_keys[pos] != key:
            raise KeyError(f"{pair} is not a candidate at step {self.target_step}")
        return pos

    def label(self, pair) -> int:
        return int(self.labels[self._index(pair)])

    def previously_observed(self, pair) -> bool:
        return bool(self.prev[self._index(pair)])


def _membership(sorted_keys: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Boolean membership of queries in a sorted key array."""
    pos = np.searchsorted(sorted_keys, queries)
    ok = pos < sorted_keys.size
    ok[ok] = sorted_keys[pos[ok]] == queries[ok]
    return ok


def candidate_set(network: DynamicNetwork, cutoff: int) -> CandidateSet:
    """Candidate pairs, labels and the previously-observed mask at a cutoff."""
    if not 1 <= cutoff <= network.num_steps - 1:
        raise ValueError(
            f"cutoff {cutoff} out of range 1..{network.num_steps - 1} "
            f"(need a following step for labels)"
        )
    keys = network.candidate_pair_keys(cutoff)
    labels = np.zeros(keys.size, dtype=np.int8)
    prev = np.zeros(keys.size, dtype=bool)

    edge_keys = network.edge_keys(cutoff + 1)
    if edge_keys.size:
        seen = network.seen_nodes(cutoff)
        u, v = decode_pair_keys(edge_keys, network.num_nodes)
        both_seen = _membership(seen, u) & _membership(seen, v)
        inside = edge_keys[both_seen]
        pos = np.searchsorted(keys, inside)
        labels[pos] = 1
    union = network.union_keys(cutoff)
    if union.size:
        pos = np.searchsorted(keys, union)
        prev[pos] = True
    return CandidateSet(cutoff + 1, keys, labels, prev, network.num_nodes, network.directed)


@dataclass(frozen=True)
class EvalConfig:
    """Evaluation options: optional top-k metrics and the thread budget."""

    k: int | None = None
    threads: int = 1


@dataclass
class MetricReport:
    """Pooled metrics per population plus the unified score."""

    whole: dict
    new: dict
    prev: dict
    gmauc: float | None
    per_step: list

    def as_dict(self) -> dict:
        return {
            "whole": self.whole,
            "new": self.new,
            "prev": self.prev,
            "gmauc": self.gmauc,
            "per_step": self.per_step,
        }


@dataclass
class EvaluationRun:
    """Scores, labels and masks pooled over all prediction steps."""

    predictor: PredictorConfig
    network: DynamicNetwork
    scores: np.ndarray
    labels: np.ndarray
    prev: np.ndarray
    step_bounds: list  # (target_step, start, stop) slices into the pooled arrays
    report: MetricReport

    def step_scoreset(self, target_step: int) -> ScoreSet:
        for step, start, stop in self.step_bounds:
            if step == target_step:
                keys = self.network.candidate_pair_keys(target_step - 1)
                return ScoreSet(target_step, keys, self.scores[start:stop],
                                self.network.num_nodes, self.network.directed)
        raise KeyError(f"no prediction for target step {target_step}")

    def population(self, which: str) -> metrics.LabeledScores:
        if which == "all":
            return metrics.LabeledScores(self.scores, self.labels)
        if which == "prev":
            mask = self.prev
        elif which == "new":
            mask = ~self.prev
        else:
            raise ValueError(f"unknown population {which!r}")
        return metrics.LabeledScores(self.scores[mask], self.labels[mask])


def _split_bundle(ls: metrics.LabeledScores) -> dict:
    out: dict = {"P": ls.P, "N": ls.N}
    try:
        out["auc"] = metrics.roc_auc(ls)
    except UndefinedMetricError:
        out["auc"] = None
    try:
        out["prauc"] = metrics.pr_auc(ls)
    except UndefinedMetricError:
        out["prauc"] = None
    return out


def _gmauc_or_none(new_bundle: dict, prev_bundle: dict) -> float | None:
    prauc_new = new_bundle.get("prauc")
    auc_prev = prev_bundle.get("auc")
    if prauc_new is None or auc_prev is None:
        return None
    try:
        return metrics.gmauc(metrics.GmaucInputs(
            prauc_new=prauc_new,
            auc_prev=auc_prev,
            P_new=new_bundle["P"],
            N_new=new_bundle["N"],
        ))
    except UndefinedMetricError:
        return None


def run_evaluation(network: DynamicNetwork, predictor: PredictorConfig,
                   config: EvalConfig = EvalConfig()) -> EvaluationRun:
    """Score every prediction step, pool, and compute the metric report."""
    T = network.num_steps
    if T < 2:
        raise InsufficientHistoryError("evaluation needs at least two time steps")

    def one_step(cutoff: int):
        cs = candidate_set(network, cutoff)
        ss = predict(network, cutoff, predictor)
        if not np.array_equal(ss.pair_keys, cs.pair_keys):
            raise RuntimeError("predictor and candidate enumeration disagree")
        return cs, ss

    cutoffs = list(range(1, T))
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(one_step, cutoffs))
    else:
        results = [one_step(c) for c in cutoffs]

    scores = np.concatenate([ss.values for _, ss in results]) if results else np.empty(0)
    labels = np.concatenate([cs.labels for cs, _ in results])
    prev = np.concatenate([cs.prev for cs, _ in results])
    bounds = []
    offset = 0
    for cs, _ in results:
        bounds.append((cs.target_step, offset, offset + len(cs)))
        offset += len(cs)

    ls_all = metrics.LabeledScores(scores, labels)
    ls_new = metrics.LabeledScores(scores[~prev], labels[~prev])
    ls_prev = metrics.LabeledScores(scores[prev], labels[prev])

    whole = metrics.bundle(ls_all, k=config.k)
    new_bundle = _split_bundle(ls_new)
    prev_bundle = _split_bundle(ls_prev)
    unified = _gmauc_or_none(new_bundle, prev_bundle)

    per_step = []
    for (cs, _), (step, start, stop) in zip(results, bounds):
        s = scores[start:stop]
        l = labels[start:stop]
        p = prev[start:stop]
        row = {"target_step": step}
        row["all"] = _split_bundle(metrics.LabeledScores(s, l))
        row["new"] = _split_bundle(metrics.LabeledScores(s[~p], l[~p]))
        row["prev"] = _split_bundle(metrics.LabeledScores(s[p], l[p]))
        per_step.append(row)

    report = MetricReport(whole=whole, new=new_bundle, prev=prev_bundle,
                          gmauc=unified, per_step=per_step)
    return EvaluationRun(predictor=predictor, network=network, scores=scores,
                         labels=labels, prev=prev, step_bounds=bounds, report=report)


@dataclass
class ComparisonRow:
    name: str
    report: MetricReport
    rank: int


def compare_predictors(network: DynamicNetwork, configs,
                       eval_config: EvalConfig = EvalConfig()) -> list[ComparisonRow]:
    """Evaluate several predictors and rank them by the unified score.

    Rows keep the input order; ``rank`` orders by descending gmauc with
    undefined scores last and ties broken by predictor name.
    """
    configs = list(configs)
    if not configs:
        raise ValueError("need at least one predictor config")
    names = [c.label for c in configs]
    if len(set(names)) != len(names):
        raise ValueError(f"predictor names must be unique, got {names}")
    runs = [(name, run_evaluation(network, cfg, eval_config))
            for name, cfg in zip(names, configs)]
    order = sorted(
        range(len(runs)),
        key=lambda i: (
            runs[i][1].report.gmauc is None,
            -(runs[i][1].report.gmauc or 0.0),
            runs[i][0],
        ),
    )
    ranks = {i: r + 1 for r, i in enumerate(order)}
    return [ComparisonRow(name=name, report=run.report, rank=ranks[i])
            for i, (name, run) in enumerate(runs)]
