"""Geodesic distances on the aggregate past graph and distance-stratified
edge-formation statistics.

Distances are hop counts on the undirected union of all snapshots up to a
cutoff (directed networks are projected to undirected first), so a pair
at distance 1 is exactly a pair with a previously observed edge. For each
prediction target step, every pair of seen nodes is bucketed by that
distance, and the pairs gaining an edge at the target step are counted
per bucket. Finite distances at or above ``d_max`` share one bucket;
disconnected pairs get their own.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .dyngraph import DynamicNetwork, decode_pair_keys, pair_keys
from .errors import InsufficientHistoryError

UNREACHABLE = -1


def bfs_distances(graph: sp.spmatrix, source: int, max_depth: int | None = None) -> dict[int, int]:
    """Hop distances from one source by breadth-first search.

    ``graph`` is a symmetric binary adjacency. Returns {node: distance}
    for every node reachable within ``max_depth`` hops (all reachable
    nodes when None); unreachable nodes are absent.
    """
    adj = graph.tocsr()
    n = adj.shape[0]
    if not 0 <= source < n:
        raise ValueError(f"source {source} out of range 0..{n - 1}")
    dist = {source: 0}
    frontier = [source]
    depth = 0
    while frontier and (max_depth is None or depth < max_depth):
        depth += 1
        nxt = []
        for node in frontier:
            for nbr in adj.indices[adj.indptr[node]:adj.indptr[node + 1]]:
                nbr = int(nbr)
                if nbr not in dist:
                    dist[nbr] = depth
                    nxt.append(nbr)
        frontier = nxt
    return dist


def _hop_matrix(adj: sp.csr_matrix) -> np.ndarray:
    """All-pairs hop distances via level-synchronous expansion.

    Returns an int32 matrix with UNREACHABLE where no path exists. Dense
    in the number of nodes; intended for the (sub)graph of seen nodes.
    """
    n = adj.shape[0]
    dist = np.full((n, n), UNREACHABLE, dtype=np.int32)
    np.fill_diagonal(dist, 0)
    if n == 0:
        return dist
    mat = adj.astype(np.float32)
    reached = np.eye(n, dtype=bool)
    frontier = np.eye(n, dtype=np.float32)
    depth = 0
    while True:
        depth += 1
        nxt = (mat @ frontier) > 0
        nxt &= ~reached
        if not nxt.any():
            return dist
        dist[nxt] = depth
        reached |= nxt
        frontier = nxt.astype(np.float32)


def pair_distances(network: DynamicNetwork, cutoff: int) -> tuple[np.ndarray, np.ndarray]:
    """Distances between all unordered pairs of seen nodes at a cutoff.

    Returns (pair keys in canonical (min,max) encoding, distances), with
    UNREACHABLE for disconnected pairs. Distance 1 holds exactly for the
    pairs with a union edge (either direction for directed networks).
    """
    seen = network.seen_nodes(cutoff)
    k = seen.size
    if k < 2:
        empty = np.empty(0, dtype=np.int64)
        return empty, np.empty(0, dtype=np.int32)
    full = network.adjacency_union(cutoff)
    sub = full[seen][:, seen].tocsr()
    dist = _hop_matrix(sub)
    iu, iv = np.triu_indices(k, k=1)
    keys = pair_keys(seen[iu], seen[iv], network.num_nodes)
    return keys, dist[iu, iv]


@dataclass(frozen=True)
class DistanceBucket:
    label: str
    pairs: int
    edges_formed: int
    fraction_of_edges: float
    edge_probability: float | None


@dataclass(frozen=True)
class DistanceHistogram:
    """Aggregated pair and formed-edge counts per geodesic distance.

    Buckets run 1, 2, ..., d_max-1, ">=d_max", "inf". Fractions are over
    all edges formed at any distance; probabilities divide formed edges
    by the pairs sitting at that distance (None for empty buckets).
    """

    d_max: int
    buckets: tuple[DistanceBucket, ...]

    def bucket(self, label: str) -> DistanceBucket:
        for b in self.buckets:
            if b.label == label:
                return b
        raise KeyError(label)


def _bucket_index(distances: np.ndarray, d_max: int) -> np.ndarray:
    """Map distances to bucket slots 0..d_max-1 plus d_max for unreachable."""
    idx = np.minimum(distances, d_max) - 1
    idx[distances == UNREACHABLE] = d_max
    return idx


def distance_stratified_stats(network: DynamicNetwork, d_max: int = 6) -> DistanceHistogram:
    """Distance histogram of candidate pairs and newly formed edges.

    For every target step t+1, pairs of nodes seen by the cutoff t are
    bucketed by their distance on the union graph through t, and pairs
    holding an edge at t+1 are tallied per bucket. Counts aggregate over
    all target steps.
    """
    if d_max < 2:
        raise ValueError("d_max must be at least 2")
    T = network.num_steps
    if T < 2:
        raise InsufficientHistoryError("distance stratification needs at least two steps")

    n_buckets = d_max + 1  # distances 1..d_max-1, >=d_max, unreachable
    pair_counts = np.zeros(n_buckets, dtype=np.int64)
    edge_counts = np.zeros(n_buckets, dtype=np.int64)

    for cutoff in range(1, T):
        keys, dists = pair_distances(network, cutoff)
        if keys.size == 0:
            continue
        idx = _bucket_index(dists, d_max)
        pair_counts += np.bincount(idx, minlength=n_buckets)

        formed = _undirected_edge_keys(network, cutoff + 1)
        pos = np.searchsorted(keys, formed)
        inside = (pos < keys.size)
        inside[inside] = keys[pos[inside]] == formed[inside]
        hit = pos[inside]
        edge_counts += np.bincount(idx[hit], minlength=n_buckets)

    total_edges = int(edge_counts.sum())
    labels = [str(d) for d in range(1, d_max)] + [f">={d_max}", "inf"]
    buckets = []
    for i, label in enumerate(labels):
        pairs = int(pair_counts[i])
        formed = int(edge_counts[i])
        frac = formed / total_edges if total_edges else 0.0
        prob = formed / pairs if pairs else None
        buckets.append(DistanceBucket(label, pairs, formed, frac, prob))
    return DistanceHistogram(d_max=d_max, buckets=tuple(buckets))


def _undirected_edge_keys(network: DynamicNetwork, t: int) -> np.ndarray:
    """Canonical (min,max) keys of the step's edges, collapsed across direction."""
    u, v = decode_pair_keys(network.edge_keys(t), network.num_nodes)
    lo = np.minimum(u, v)
    hi = np.maximum(u, v)
    return np.unique(pair_keys(lo, hi, network.num_nodes))
