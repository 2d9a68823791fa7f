"""Baseline dynamic link predictors.

Every predictor maps (network, cutoff, config) to a :class:`ScoreSet`
holding one finite score per candidate pair at that cutoff. The time
series predictors smooth a per-snapshot quantity with an exponentially
weighted moving average initialized at the first observation:

    s_1 = x_1,   s_t = decay * x_t + (1 - decay) * s_{t-1}

which is equivalent to the weight vector produced by
:func:`ewma_weights`; the matrix implementations use that linear form so
never-observed pairs score exactly 0 without being enumerated.

TS-Adj smooths the pair's own 0/1 adjacency series and therefore cannot
rank never-connected pairs (all score 0). The cumulative predictor is
the growing-window mean of the same series. TS-AA and TS-Katz smooth
per-snapshot Adamic-Adar and truncated Katz similarity scores; both are
computed on each snapshot individually, not on the aggregate graph.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .dyngraph import DynamicNetwork, canonical_pair, decode_pair_keys, pair_keys
from .errors import StructuralError

KINDS = ("ts_adj", "cumulative", "ts_aa", "ts_katz", "random")


@dataclass(frozen=True)
class PredictorConfig:
    """Predictor selection and hyperparameters.

    ``decay`` is the EWMA decay factor in (0, 1]; ``katz_beta`` and
    ``katz_max_length`` control the truncated Katz sum; ``seed`` drives
    the random control predictor.
    """

    kind: str
    decay: float = 0.5
    katz_beta: float = 0.05
    katz_max_length: int = 4
    seed: int = 0
    name: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown predictor kind {self.kind!r}; choose from {KINDS}")
        if not 0.0 < self.decay <= 1.0:
            raise ValueError("decay must lie in (0, 1]")
        if self.katz_beta <= 0.0:
            raise ValueError("katz_beta must be positive")
        if self.katz_max_length < 2:
            raise ValueError("katz_max_length must be at least 2")

    @property
    def label(self) -> str:
        return self.name or self.kind


class ScoreSet:
    """One real score per candidate pair for one prediction step.

    ``pair_keys`` is the ascending encoded candidate universe at the
    training cutoff and ``values`` is aligned with it. ``time_step`` is
    the predicted (target) step, i.e. cutoff + 1.
    """

    __slots__ = ("time_step", "pair_keys", "values", "num_nodes", "directed")

    def __init__(self, time_step, pair_keys, values, num_nodes, directed):
        pair_keys = np.asarray(pair_keys, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        if pair_keys.shape != values.shape:
            raise StructuralError("scores must align with the candidate pairs")
        if values.size and not np.all(np.isfinite(values)):
            raise StructuralError("scores must be finite")
        self.time_step = int(time_step)
        self.pair_keys = pair_keys
        self.values = values
        self.num_nodes = int(num_nodes)
        self.directed = bool(directed)

    def __len__(self) -> int:
        return int(self.values.size)

    def score(self, u: int, v: int) -> float:
        cu, cv = canonical_pair(u, v, self.directed)
        key = np.int64(cu) * self.num_nodes + cv
        pos = int(np.searchsorted(self.pair_keys, key))
        if pos >= len(self.pair_keys) or self.pair_keys[pos] != key:
            raise KeyError(f"({u},{v}) is not a candidate pair at step {self.time_step}")
        return float(self.values[pos])

    def items(self):
        u, v = decode_pair_keys(self.pair_keys, self.num_nodes)
        for uu, vv, s in zip(u.tolist(), v.tolist(), self.values.tolist()):
            yield (uu, vv), s


def ewma_update(prev_score: float, observation: float, decay: float) -> float:
    """One smoothing step; callers seed the recursion with the first observation."""
    return decay * observation + (1.0 - decay) * prev_score


def ewma_path(observations, decay: float) -> list[float]:
    """Smoothed value after each observation, starting at the first one."""
    out: list[float] = []
    for x in observations:
        out.append(x if not out else ewma_update(out[-1], x, decay))
    return out


def ewma_weights(t: int, decay: float) -> np.ndarray:
    """Weights w such that the EWMA after t observations is sum(w_i * x_i)."""
    if t < 1:
        raise ValueError("need at least one observation")
    w = decay * (1.0 - decay) ** (t - 1 - np.arange(t, dtype=np.float64))
    w[0] = (1.0 - decay) ** (t - 1)
    return w


# -- per-snapshot similarity matrices -----------------------------------------


def adamic_adar(graph: sp.spmatrix, pair) -> float:
    """Adamic-Adar score of one pair on a symmetric binary adjacency.

    Sum of 1/ln(degree) over common neighbors; a common neighbor of two
    distinct nodes always has degree at least 2.
    """
    adj = graph.tocsr()
    u, v = pair
    nu = adj.indices[adj.indptr[u]:adj.indptr[u + 1]]
    nv = adj.indices[adj.indptr[v]:adj.indptr[v + 1]]
    common = np.intersect1d(nu, nv, assume_unique=True)
    if common.size == 0:
        return 0.0
    deg = np.diff(adj.indptr)[common]
    deg = deg[deg >= 2]
    return float(np.sum(1.0 / np.log(deg)))


def truncated_katz(graph: sp.spmatrix, pair, beta: float, max_length: int) -> float:
    """Sum of beta^l * (walks of length l) between the pair, l = 1..max_length.

    Walk counts come from iterated sparse adjacency application restricted
    to the source row; directed graphs count directed walks.
    """
    if max_length < 2:
        raise ValueError("max_length must be at least 2")
    if beta <= 0:
        raise ValueError("beta must be positive")
    adj = graph.tocsr()
    u, v = pair
    row = adj.getrow(u)
    total = 0.0
    for length in range(1, max_length + 1):
        total += beta ** length * row[0, v]
        if length < max_length:
            row = row @ adj
    if not np.isfinite(total):
        raise OverflowError("katz sum overflowed; reduce beta or max_length")
    return float(total)


def _aa_matrix(network: DynamicNetwork, t: int) -> sp.csr_matrix:
    def compute():
        adj = network.adjacency(t, symmetrize=True)
        deg = np.asarray(adj.sum(axis=1)).ravel()
        inv_log = np.zeros_like(deg)
        mask = deg >= 2
        inv_log[mask] = 1.0 / np.log(deg[mask])
        m = (adj @ sp.diags(inv_log)) @ adj
        m = m.tocoo()
        off = m.row != m.col
        return sp.csr_matrix((m.data[off], (m.row[off], m.col[off])), shape=m.shape)

    return network._memo(("aa", t), compute)


def _katz_matrix(network: DynamicNetwork, t: int, beta: float, L: int) -> sp.csr_matrix:
    def compute():
        adj = network.adjacency(t)
        acc = beta * adj
        power = adj
        for length in range(2, L + 1):
            power = power @ adj
            acc = acc + beta ** length * power
        m = acc.tocoo()
        off = m.row != m.col
        return sp.csr_matrix((m.data[off], (m.row[off], m.col[off])), shape=m.shape)

    return network._memo(("katz", t, float(beta), int(L)), compute)


def _smoothed_matrix(network, cutoff, per_step, decay) -> sp.csr_matrix:
    w = ewma_weights(cutoff, decay)
    acc = None
    for t in range(1, cutoff + 1):
        if w[t - 1] == 0.0:
            continue
        term = per_step(t) * w[t - 1]
        acc = term if acc is None else acc + term
    if acc is None:
        n = network.num_nodes
        return sp.csr_matrix((n, n))
    return acc.tocsr()


def _matrix_scoreset(network: DynamicNetwork, cutoff: int, mat: sp.spmatrix) -> ScoreSet:
    """Scatter sparse matrix entries onto the dense candidate vector.

    Off-candidate entries cannot occur because every endpoint of a stored
    similarity value is seen by the cutoff; this is asserted, not assumed.
    """
    keys = network.candidate_pair_keys(cutoff)
    values = np.zeros(keys.size, dtype=np.float64)
    csr = mat.tocsr()
    csr.eliminate_zeros()
    coo = csr.tocoo()
    r, c, data = coo.row, coo.col, coo.data
    if network.directed:
        take = r != c
    else:
        take = r < c
    r, c, data = r[take], c[take], data[take]
    if r.size:
        entry_keys = pair_keys(r, c, network.num_nodes)
        pos = np.searchsorted(keys, entry_keys)
        if np.any(pos >= keys.size) or not np.array_equal(keys[pos], entry_keys):
            raise StructuralError("similarity entry outside the candidate universe")
        values[pos] = data
    return ScoreSet(cutoff + 1, keys, values, network.num_nodes, network.directed)


# -- predictors ----------------------------------------------------------------


def predict_ts_adj(network: DynamicNetwork, cutoff: int, config: PredictorConfig) -> ScoreSet:
    """EWMA of the pair's binary adjacency series; unseen pairs score 0."""
    network._check_step(cutoff)
    mat = _smoothed_matrix(network, cutoff, lambda t: network.adjacency(t), config.decay)
    ss = _matrix_scoreset(network, cutoff, mat)
    np.minimum(ss.values, 1.0, out=ss.values)  # guard weight-sum rounding
    return ss


def predict_cumulative(network: DynamicNetwork, cutoff: int, config: PredictorConfig) -> ScoreSet:
    """Fraction of steps up to the cutoff in which the pair had an edge."""
    network._check_step(cutoff)
    acc = network.adjacency(1).copy()
    for t in range(2, cutoff + 1):
        acc = acc + network.adjacency(t)
    ss = _matrix_scoreset(network, cutoff, acc)
    ss.values /= cutoff
    return ss


def predict_ts_aa(network: DynamicNetwork, cutoff: int, config: PredictorConfig) -> ScoreSet:
    """EWMA of per-snapshot Adamic-Adar scores (directed input symmetrized)."""
    network._check_step(cutoff)
    mat = _smoothed_matrix(network, cutoff, lambda t: _aa_matrix(network, t), config.decay)
    return _matrix_scoreset(network, cutoff, mat)


def predict_ts_katz(network: DynamicNetwork, cutoff: int, config: PredictorConfig) -> ScoreSet:
    """EWMA of per-snapshot truncated Katz scores (directed walks as given)."""
    network._check_step(cutoff)
    _warn_on_large_beta(network, cutoff, config.katz_beta)
    mat = _smoothed_matrix(
        network, cutoff,
        lambda t: _katz_matrix(network, t, config.katz_beta, config.katz_max_length),
        config.decay,
    )
    return _matrix_scoreset(network, cutoff, mat)


def _warn_on_large_beta(network, cutoff, beta) -> None:
    # beta * max_degree < 1 is a cheap proxy for beta below 1/spectral radius;
    # the truncated sum stays finite regardless, so only warn.
    u, v = decode_pair_keys(network.union_keys(cutoff), network.num_nodes)
    if u.size == 0:
        return
    deg = np.bincount(np.concatenate([u, v]), minlength=network.num_nodes)
    max_deg = int(deg.max())
    if beta * max_deg >= 1.0:
        warnings.warn(
            f"katz_beta={beta} times max degree {max_deg} is >= 1; "
            f"scores may be dominated by the longest walks",
            RuntimeWarning,
            stacklevel=3,
        )


def predict_random(network: DynamicNetwork, cutoff: int, config: PredictorConfig) -> ScoreSet:
    """Seeded i.i.d. uniform(0,1) scores; the stream is split per step."""
    network._check_step(cutoff)
    keys = network.candidate_pair_keys(cutoff)
    rng = np.random.default_rng([int(config.seed), int(cutoff)])
    values = rng.random(keys.size)
    return ScoreSet(cutoff + 1, keys, values, network.num_nodes, network.directed)


_DISPATCH = {
    "ts_adj": predict_ts_adj,
    "cumulative": predict_cumulative,
    "ts_aa": predict_ts_aa,
    "ts_katz": predict_ts_katz,
    "random": predict_random,
}


def predict(network: DynamicNetwork, cutoff: int, config: PredictorConfig) -> ScoreSet:
    """Dispatch to the configured predictor."""
    return _DISPATCH[config.kind](network, cutoff, config)
