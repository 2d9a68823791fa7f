"""Snapshot-sequence data model for dynamic networks.

A :class:`DynamicNetwork` is an ordered list of edge-set snapshots over a
fixed registry of dense integer node ids. The union of all edges up to a
cutoff step defines which node pairs count as previously observed, which
is the backbone of the split evaluation: every candidate pair at a given
cutoff is either previously observed or new, never both.

Networks are immutable after construction. Derived structures (pair-key
arrays, cumulative unions, adjacency matrices) are cached lazily, so
repeated queries and concurrent reads are cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
import scipy.sparse as sp

from .errors import StructuralError

Pair = tuple[int, int]


def canonical_pair(u: int, v: int, directed: bool) -> Pair:
    """Stored orientation of a node pair: (min, max) when undirected."""
    if directed or u <= v:
        return (u, v)
    return (v, u)


def pair_keys(u: np.ndarray, v: np.ndarray, num_nodes: int) -> np.ndarray:
    """Encode pairs as int64 keys u * num_nodes + v."""
    return u.astype(np.int64) * np.int64(num_nodes) + v.astype(np.int64)


def decode_pair_keys(keys: np.ndarray, num_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`pair_keys`."""
    if keys.size == 0:
        return keys.copy(), keys.copy()
    return keys // num_nodes, keys % num_nodes


@dataclass(frozen=True)
class Snapshot:
    """Edge set observed at one time step.

    Undirected snapshots store each pair exactly once in (min, max) order;
    directed snapshots store ordered pairs. Self-loops are never stored.
    """

    time_step: int
    edges: frozenset
    directed: bool

    def __contains__(self, pair: Pair) -> bool:
        u, v = pair
        return canonical_pair(u, v, self.directed) in self.edges

    def __len__(self) -> int:
        return len(self.edges)


class DynamicNetwork:
    """Validated sequence of snapshots sharing one node registry.

    Parameters
    ----------
    snapshots : sequence of Snapshot
        Must be consecutive, starting at time step 1, all with the same
        directedness as the network.
    num_nodes : int
        Size of the dense node registry; every edge endpoint must lie in
        ``range(num_nodes)``. Registered nodes may appear in no snapshot.
    node_labels : sequence of str, optional
        Original external identifier per dense node id.
    """

    def __init__(self, snapshots, num_nodes: int, directed: bool,
                 node_labels=None, self_loops_dropped: int = 0):
        snapshots = tuple(snapshots)
        if not snapshots:
            raise StructuralError("a network needs at least one snapshot")
        if num_nodes < 0:
            raise StructuralError("num_nodes must be non-negative")
        for expected, snap in enumerate(snapshots, start=1):
            if snap.time_step != expected:
                raise StructuralError(
                    f"snapshots must cover consecutive steps starting at 1; "
                    f"expected step {expected}, found {snap.time_step}"
                )
            if snap.directed != directed:
                raise StructuralError(
                    f"snapshot {snap.time_step} directedness disagrees with the network"
                )
            for u, v in snap.edges:
                if u == v:
                    raise StructuralError(f"self-loop ({u},{u}) at step {snap.time_step}")
                if not (0 <= u < num_nodes and 0 <= v < num_nodes):
                    raise StructuralError(
                        f"edge ({u},{v}) at step {snap.time_step} references an "
                        f"unregistered node (registry size {num_nodes})"
                    )
                if not directed and u > v:
                    raise StructuralError(
                        f"undirected edge ({u},{v}) at step {snap.time_step} "
                        f"is not in canonical (min,max) order"
                    )
        if node_labels is not None:
            node_labels = tuple(str(x) for x in node_labels)
            if len(node_labels) != num_nodes:
                raise StructuralError("node_labels length must equal num_nodes")
        self.snapshots = snapshots
        self.num_nodes = int(num_nodes)
        self.directed = bool(directed)
        self.node_labels = node_labels
        self.self_loops_dropped = int(self_loops_dropped)
        self._edge_keys: dict[int, np.ndarray] = {}
        self._union_keys: dict[int, np.ndarray] = {}
        self._seen: dict[int, np.ndarray] = {}
        self._memo_cache: dict = {}

    # -- basic accessors ---------------------------------------------------

    @property
    def num_steps(self) -> int:
        return len(self.snapshots)

    def snapshot(self, t: int) -> Snapshot:
        self._check_step(t)
        return self.snapshots[t - 1]

    def total_edges(self) -> int:
        return sum(len(s) for s in self.snapshots)

    def _check_step(self, t: int) -> None:
        if not 1 <= t <= self.num_steps:
            raise ValueError(f"time step {t} out of range 1..{self.num_steps}")

    # -- cached derived structures ------------------------------------------

    def edge_keys(self, t: int) -> np.ndarray:
        """Sorted int64 pair keys of the edges at step t."""
        self._check_step(t)
        if t not in self._edge_keys:
            snap = self.snapshots[t - 1]
            if snap.edges:
                arr = np.array(sorted(snap.edges), dtype=np.int64)
                keys = pair_keys(arr[:, 0], arr[:, 1], self.num_nodes)
            else:
                keys = np.empty(0, dtype=np.int64)
            keys.sort()
            keys.flags.writeable = False
            self._edge_keys[t] = keys
        return self._edge_keys[t]

    def union_keys(self, t: int) -> np.ndarray:
        """Sorted keys of pairs with an edge in any step <= t."""
        self._check_step(t)
        if t not in self._union_keys:
            prev = self.union_keys(t - 1) if t > 1 else np.empty(0, dtype=np.int64)
            keys = np.union1d(prev, self.edge_keys(t))
            keys.flags.writeable = False
            self._union_keys[t] = keys
        return self._union_keys[t]

    def seen_nodes(self, t: int) -> np.ndarray:
        """Sorted ids of nodes with at least one incident edge in steps <= t."""
        self._check_step(t)
        if t not in self._seen:
            u, v = decode_pair_keys(self.union_keys(t), self.num_nodes)
            seen = np.unique(np.concatenate([u, v]))
            seen.flags.writeable = False
            self._seen[t] = seen
        return self._seen[t]

    def candidate_pair_keys(self, cutoff: int) -> np.ndarray:
        """Ascending keys of every evaluable pair at the given cutoff.

        All ordered pairs of distinct seen nodes for directed networks; all
        unordered pairs in canonical order otherwise. Pairs involving nodes
        unseen by the cutoff are excluded because their identities are not
        available to a predictor trained on steps 1..cutoff.
        """
        seen = self.seen_nodes(cutoff)
        k = seen.size
        if k < 2:
            return np.empty(0, dtype=np.int64)
        if self.directed:
            u = np.repeat(seen, k)
            v = np.tile(seen, k)
            mask = u != v
            u, v = u[mask], v[mask]
        else:
            iu, iv = np.triu_indices(k, k=1)
            u, v = seen[iu], seen[iv]
        return pair_keys(u, v, self.num_nodes)

    def adjacency(self, t: int, symmetrize: bool = False) -> sp.csr_matrix:
        """Binary adjacency of step t (undirected networks are symmetric).

        ``symmetrize=True`` returns the union of both directions for a
        directed network; it is a no-op for undirected ones.
        """
        self._check_step(t)
        key = ("adj", t, bool(symmetrize) or not self.directed)
        if key not in self._memo_cache:
            n = self.num_nodes
            u, v = decode_pair_keys(self.edge_keys(t), n)
            if key[2]:  # symmetric output
                rows = np.concatenate([u, v])
                cols = np.concatenate([v, u])
            else:
                rows, cols = u, v
            data = np.ones(rows.size, dtype=np.float64)
            mat = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
            mat.data[:] = 1.0  # symmetrizing a directed reciprocal pair may sum to 2
            self._memo_cache[key] = mat
        return self._memo_cache[key]

    def adjacency_union(self, cutoff: int) -> sp.csr_matrix:
        """Symmetric binary adjacency of the union graph through a cutoff.

        Directed networks are projected to undirected here; this is the
        graph on which geodesic distances are defined.
        """
        self._check_step(cutoff)
        key = ("adj_union", cutoff)
        if key not in self._memo_cache:
            n = self.num_nodes
            u, v = decode_pair_keys(self.union_keys(cutoff), n)
            rows = np.concatenate([u, v])
            cols = np.concatenate([v, u])
            data = np.ones(rows.size, dtype=np.float64)
            mat = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
            mat.data[:] = 1.0
            self._memo_cache[key] = mat
        return self._memo_cache[key]

    def _memo(self, key, compute: Callable):
        """Small memo for predictor-owned per-snapshot matrices.

        Concurrent builders may duplicate work; results are pure so the
        last write wins harmlessly.
        """
        if key not in self._memo_cache:
            self._memo_cache[key] = compute()
        return self._memo_cache[key]


@dataclass(frozen=True)
class PairHistory:
    """Union view of a network through a cutoff step."""

    network: DynamicNetwork
    cutoff: int
    union_edges: frozenset
    seen_nodes: frozenset


def build_network(snapshot_list: Iterable[tuple[int, Iterable[Pair]]],
                  directed: bool,
                  num_nodes: int | None = None,
                  node_labels=None) -> DynamicNetwork:
    """Build a validated DynamicNetwork from (time_step, edge list) pairs.

    Self-loops are dropped (count recorded on ``self_loops_dropped``), edge
    multiplicity within a step collapses to a single binary edge, and
    undirected pairs are canonicalized. Time steps must form a contiguous
    range starting at 1.
    """
    items = sorted(snapshot_list, key=lambda kv: kv[0])
    if not items:
        raise StructuralError("snapshot list is empty")
    steps = [t for t, _ in items]
    if len(set(steps)) != len(steps):
        raise StructuralError(f"duplicate time steps in {steps}")
    if steps != list(range(1, len(steps) + 1)):
        raise StructuralError(
            f"time steps must be contiguous starting at 1, got {steps}"
        )

    dropped = 0
    max_node = -1
    cleaned: list[frozenset] = []
    for _, edges in items:
        kept = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u < 0 or v < 0:
                raise StructuralError(f"negative node id in edge ({u},{v})")
            if u == v:
                dropped += 1
                continue
            max_node = max(max_node, u, v)
            kept.add(canonical_pair(u, v, directed))
        cleaned.append(frozenset(kept))
    if num_nodes is None:
        num_nodes = max_node + 1
    snapshots = [Snapshot(t, edges, directed) for t, edges in enumerate(cleaned, start=1)]
    return DynamicNetwork(snapshots, num_nodes, directed,
                          node_labels=node_labels, self_loops_dropped=dropped)


def pair_history(network: DynamicNetwork, cutoff: int) -> PairHistory:
    """Union edges and seen nodes of all snapshots up to the cutoff."""
    network._check_step(cutoff)
    u, v = decode_pair_keys(network.union_keys(cutoff), network.num_nodes)
    edges = frozenset(zip(u.tolist(), v.tolist()))
    seen = frozenset(network.seen_nodes(cutoff).tolist())
    return PairHistory(network, cutoff, edges, seen)


def was_previously_observed(history: PairHistory, pair: Pair) -> bool:
    """True iff the pair had an edge in any step up to the history cutoff.

    Directed networks use ordered-pair semantics: observing u->v says
    nothing about v->u.
    """
    u, v = pair
    n = history.network.num_nodes
    if not (0 <= u < n and 0 <= v < n):
        raise ValueError(f"pair ({u},{v}) references an unregistered node")
    return canonical_pair(u, v, history.network.directed) in history.union_edges
