"""Threshold-curve and fixed-threshold accuracy metrics.

Everything here operates on a :class:`LabeledScores` bundle (real-valued
scores against binary labels) and depends only on the induced ranking,
so any strictly increasing transform of the scores leaves every metric
unchanged. Tied scores collapse into single sweep steps: a trapezoid
over the tie block for ROC, a single interpolated segment for PR.

The ROC area is computed as the exact rank statistic (concordant pairs
plus half the ties, over P*N). The PR area uses the nonlinear
interpolation of Davis and Goadrich between achievable confusion states;
linear interpolation in PR space overstates the area and is deliberately
not offered.

Degenerate inputs (no positives, or no negatives where negatives are
required) raise :class:`~dylp.errors.UndefinedMetricError` instead of
silently returning 0, because a silent zero would corrupt downstream
combinations such as the geometric-mean score.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UndefinedMetricError


class LabeledScores:
    """Score vector paired with binary labels.

    Attributes
    ----------
    scores : ndarray of float64
    labels : ndarray of int8, values in {0, 1}
    P, N : int
        Number of positive / negative labels.
    """

    __slots__ = ("scores", "labels", "P", "N")

    def __init__(self, scores, labels):
        scores = np.asarray(scores, dtype=np.float64)
        labels = np.asarray(labels)
        if scores.ndim != 1 or labels.ndim != 1 or scores.shape != labels.shape:
            raise ValueError("scores and labels must be 1-d arrays of equal length")
        if scores.size and not np.all(np.isfinite(scores)):
            raise ValueError("scores must be finite")
        if labels.size and not np.isin(labels, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")
        self.scores = scores
        self.labels = labels.astype(np.int8)
        self.P = int(self.labels.sum())
        self.N = int(labels.size - self.P)

    def __len__(self) -> int:
        return int(self.scores.size)


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0


@dataclass(frozen=True)
class ThresholdCurve:
    """Sweep curve with one point per distinct threshold.

    ``kind`` is "roc" (x = false positive rate, y = true positive rate)
    or "pr" (x = recall, y = precision). ``thresholds[i]`` is the lowest
    score still predicted positive at point i; the ROC origin (0, 0)
    carries threshold +inf.
    """

    kind: str
    x: np.ndarray
    y: np.ndarray
    thresholds: np.ndarray
    area: float

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.y.tolist()))


def confusion_at_threshold(ls: LabeledScores, threshold: float) -> ConfusionMatrix:
    """Confusion counts when predicting positive iff score >= threshold."""
    pred = ls.scores >= threshold
    pos = ls.labels == 1
    tp = int(np.count_nonzero(pred & pos))
    fp = int(np.count_nonzero(pred & ~pos))
    fn = ls.P - tp
    tn = ls.N - fp
    return ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)


def _block_counts(ls: LabeledScores):
    """Positive/negative counts per distinct score, descending by score.

    Returns (thresholds_desc, pos_per_block, neg_per_block) where ties
    share one block.
    """
    uniq, inverse = np.unique(ls.scores, return_inverse=True)
    pos = np.bincount(inverse, weights=ls.labels, minlength=uniq.size).astype(np.int64)
    tot = np.bincount(inverse, minlength=uniq.size).astype(np.int64)
    neg = tot - pos
    return uniq[::-1], pos[::-1], neg[::-1]


def _rank_auc(pos_desc: np.ndarray, neg_desc: np.ndarray, P: int, N: int) -> float:
    # Concordant pairs: positive block vs negatives in strictly lower blocks.
    neg_below = np.concatenate([np.cumsum(neg_desc[::-1])[::-1][1:], [0]])
    greater = int(np.dot(pos_desc, neg_below))
    ties = int(np.dot(pos_desc, neg_desc))
    return (greater + 0.5 * ties) / (P * N)


def roc_curve(ls: LabeledScores) -> ThresholdCurve:
    """ROC curve and its area.

    The area equals the rank statistic: the probability that a uniformly
    random positive outscores a uniformly random negative, ties counted
    half. Requires at least one positive and one negative.
    """
    if ls.P == 0 or ls.N == 0:
        raise UndefinedMetricError(
            f"ROC needs at least one positive and one negative (P={ls.P}, N={ls.N})"
        )
    thr, pos, neg = _block_counts(ls)
    tp = np.cumsum(pos)
    fp = np.cumsum(neg)
    x = np.concatenate([[0.0], fp / ls.N])
    y = np.concatenate([[0.0], tp / ls.P])
    thresholds = np.concatenate([[np.inf], thr])
    area = _rank_auc(pos, neg, ls.P, ls.N)
    return ThresholdCurve("roc", x, y, thresholds, area)


def roc_auc(ls: LabeledScores) -> float:
    """Area under the ROC curve (rank statistic with half-weight ties)."""
    return roc_curve(ls).area


def _dg_area(tp: np.ndarray, fp: np.ndarray, P: int) -> float:
    """Davis-Goadrich area from cumulative (tp, fp) block states.

    Each segment walks from one achievable confusion state to the next,
    interpolating false positives linearly in true positives and
    integrating precision over recall in closed form. The first segment
    starts from the empty prediction state (0, 0), where precision along
    the segment is the constant block precision.
    """
    tp0 = np.concatenate([[0], tp[:-1]])
    fp0 = np.concatenate([[0], fp[:-1]])
    dtp = (tp - tp0).astype(np.float64)
    dfp = (fp - fp0).astype(np.float64)
    base = (tp0 + fp0).astype(np.float64)
    tp0 = tp0.astype(np.float64)

    move = dtp > 0
    area = 0.0
    # Segments leaving the empty state: constant precision dtp/(dtp+dfp).
    start = move & (base == 0)
    if np.any(start):
        area += float(np.sum((dtp[start] / P) * (dtp[start] / (dtp[start] + dfp[start]))))
    rest = move & (base > 0)
    if np.any(rest):
        a, f0, d = tp0[rest], base[rest], dtp[rest]
        c = 1.0 + dfp[rest] / d
        log_term = np.log((c * d + f0) / f0)
        area += float(np.sum(d / (c * P) + (a / c - f0 / (c * c)) * log_term / P))
    # precision never exceeds 1, so the exact area is in [0, 1]; keep
    # closed-form rounding from drifting past the boundary
    return min(1.0, max(0.0, area))


def pr_curve(ls: LabeledScores) -> ThresholdCurve:
    """Precision-recall curve with Davis-Goadrich area.

    Curve points are the achievable states, one per distinct threshold,
    starting at the top-score block; no synthetic (0, 1) anchor is added.
    Requires at least one positive.
    """
    if ls.P == 0:
        raise UndefinedMetricError("PR curve needs at least one positive (P=0)")
    thr, pos, neg = _block_counts(ls)
    tp = np.cumsum(pos)
    fp = np.cumsum(neg)
    recall = tp / ls.P
    predicted = tp + fp  # always >= 1 past the first block
    precision = tp / predicted
    area = _dg_area(tp, fp, ls.P)
    return ThresholdCurve("pr", recall, precision, thr, area)


def pr_auc(ls: LabeledScores) -> float:
    """Area under the PR curve with nonlinear interpolation."""
    return pr_curve(ls).area


def max_f1(pr: ThresholdCurve) -> float:
    """Maximum F1 over the achievable points of a PR curve (0/0 -> 0)."""
    if pr.kind != "pr":
        raise ValueError("max_f1 expects a PR curve")
    if pr.x.size == 0:
        raise ValueError("curve has no points")
    r, p = pr.x, pr.y
    denom = p + r
    f1 = np.where(denom > 0, 2.0 * p * r / np.where(denom > 0, denom, 1.0), 0.0)
    return float(f1.max())


def precision_at_k(ls: LabeledScores, k: int) -> float:
    """Fraction of positives among the k top-scored items.

    A tie block straddling the k-th position contributes its expected
    positive count under a uniformly random ordering of the block.
    """
    if not 1 <= k <= len(ls):
        raise ValueError(f"k={k} out of range 1..{len(ls)}")
    _, pos, neg = _block_counts(ls)
    tot = pos + neg
    hits = 0.0
    remaining = k
    for p_b, t_b in zip(pos.tolist(), tot.tolist()):
        if remaining >= t_b:
            hits += p_b
            remaining -= t_b
            if remaining == 0:
                break
        else:
            hits += remaining * (p_b / t_b)
            break
    return hits / k


def ndcg_at_k(ls: LabeledScores, k: int) -> float:
    """Normalized discounted cumulative gain over the top k.

    Binary gains with 1/log2(rank+1) discounts, normalized by the ideal
    ordering. Ties keep their input order (stable sort), which makes the
    value deterministic and invariant under increasing score transforms.
    """
    if not 1 <= k <= len(ls):
        raise ValueError(f"k={k} out of range 1..{len(ls)}")
    if ls.P == 0:
        raise UndefinedMetricError("NDCG needs at least one positive (P=0)")
    order = np.argsort(-ls.scores, kind="stable")
    gains = ls.labels[order[:k]].astype(np.float64)
    discounts = 1.0 / np.log2(np.arange(2, k + 2, dtype=np.float64))
    dcg = float(np.dot(gains, discounts))
    ideal = float(discounts[: min(ls.P, k)].sum())
    return dcg / ideal


@dataclass(frozen=True)
class GmaucInputs:
    """Inputs for the unified score: new-link PRAUC, previously-observed
    link AUC, and the new-candidate class counts that set the PRAUC
    baseline."""

    prauc_new: float
    auc_prev: float
    P_new: int
    N_new: int

    def __post_init__(self):
        if self.P_new < 0 or self.N_new < 0 or self.P_new + self.N_new == 0:
            raise ValueError("P_new and N_new must be non-negative with a positive sum")
        if not (0.0 <= self.prauc_new <= 1.0 and 0.0 <= self.auc_prev <= 1.0):
            raise ValueError("prauc_new and auc_prev must lie in [0, 1]")


def gmauc(inputs: GmaucInputs) -> float:
    """Geometric mean of the two baseline-corrected category scores.

    The new-link PRAUC is corrected by the random baseline P/(P+N) and
    rescaled to [0, 1]; the previously-observed AUC is corrected by the
    random baseline 0.5 and doubled. Either term clamps to 0 when the
    predictor is at or below its random baseline, so a predictor that is
    blind to one of the two categories scores exactly 0.
    """
    p0 = inputs.P_new / (inputs.P_new + inputs.N_new)
    if p0 == 1.0:
        raise UndefinedMetricError(
            "baseline correction undefined: every new-candidate pair is an edge"
        )
    a = max(0.0, (inputs.prauc_new - p0) / (1.0 - p0))
    b = max(0.0, 2.0 * (inputs.auc_prev - 0.5))
    return math.sqrt(a * b)


def bundle(ls: LabeledScores, k: int | None = None) -> dict:
    """Metric bundle for one labeled population, None where undefined.

    Keys: auc, prauc, max_f1, optionally precision_at_k / ndcg_at_k, and
    the class counts P and N.
    """
    out: dict = {"P": ls.P, "N": ls.N}
    try:
        out["auc"] = roc_auc(ls)
    except UndefinedMetricError:
        out["auc"] = None
    try:
        curve = pr_curve(ls)
        out["prauc"] = curve.area
        out["max_f1"] = max_f1(curve)
    except UndefinedMetricError:
        out["prauc"] = None
        out["max_f1"] = None
    if k is not None:
        out["precision_at_k"] = precision_at_k(ls, k)
        try:
            out["ndcg_at_k"] = ndcg_at_k(ls, k)
        except UndefinedMetricError:
            out["ndcg_at_k"] = None
    return out
