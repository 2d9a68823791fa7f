"""Synthetic dynamic-network generator with block structure and edge churn.

Step 1 samples every unordered pair independently from its block
probability; afterwards an existing edge survives to the next step with
``persist_prob`` while an absent pair appears with its block probability.
Setting ``persist_prob`` well above the block probabilities yields
networks whose previously-observed edge probability dwarfs the new-edge
probability, which is the regime the split evaluation is built for.

Output is always undirected and deterministic given the seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dyngraph import DynamicNetwork, build_network
from .errors import StructuralError


@dataclass(frozen=True)
class SynthConfig:
    num_nodes: int
    num_steps: int
    num_classes: int = 1
    class_assignment: tuple | None = None  # node -> class; contiguous blocks when None
    block_prob: object = 0.01  # scalar, KxK matrix, or one matrix per step
    persist_prob: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.num_nodes < 1 or self.num_steps < 1 or self.num_classes < 1:
            raise StructuralError("num_nodes, num_steps and num_classes must be >= 1")
        if not 0.0 <= self.persist_prob <= 1.0:
            raise StructuralError("persist_prob must lie in [0, 1]")

    def classes(self) -> np.ndarray:
        if self.class_assignment is not None:
            arr = np.asarray(self.class_assignment, dtype=np.int64)
            if arr.shape != (self.num_nodes,):
                raise StructuralError("class_assignment must list one class per node")
            if arr.min() < 0 or arr.max() >= self.num_classes:
                raise StructuralError("class ids must lie in 0..num_classes-1")
            return arr
        return (np.arange(self.num_nodes) * self.num_classes) // self.num_nodes

    def block_matrices(self) -> list[np.ndarray]:
        """One validated KxK symmetric probability matrix per step."""
        k = self.num_classes
        raw = self.block_prob
        if np.isscalar(raw):
            mats = [np.full((k, k), float(raw))] * self.num_steps
        else:
            arr = np.asarray(raw, dtype=np.float64)
            if arr.ndim == 2:
                mats = [arr] * self.num_steps
            elif arr.ndim == 3 and arr.shape[0] == self.num_steps:
                mats = [arr[t] for t in range(self.num_steps)]
            else:
                raise StructuralError(
                    "block_prob must be a scalar, a KxK matrix, or one matrix per step"
                )
        for m in mats:
            if m.shape != (k, k):
                raise StructuralError(f"block matrix must be {k}x{k}")
            if (m < 0).any() or (m > 1).any():
                raise StructuralError("block probabilities must lie in [0, 1]")
            if not np.array_equal(m, m.T):
                raise StructuralError("block matrices must be symmetric (undirected output)")
        return mats


def generate(config: SynthConfig) -> DynamicNetwork:
    """Sample a DynamicNetwork from the churn model, deterministic per seed."""
    n = config.num_nodes
    classes = config.classes()
    mats = config.block_matrices()
    iu, iv = np.triu_indices(n, k=1)
    pair_class = (classes[iu], classes[iv])
    rng = np.random.default_rng(config.seed)

    snapshots = []
    present = np.zeros(iu.size, dtype=bool)
    for t in range(1, config.num_steps + 1):
        appear = mats[t - 1][pair_class]
        draw = rng.random(iu.size)
        if t == 1:
            present = draw < appear
        else:
            present = np.where(present, draw < config.persist_prob, draw < appear)
        edges = list(zip(iu[present].tolist(), iv[present].tolist()))
        snapshots.append((t, edges))
    return build_network(snapshots, directed=False, num_nodes=n)


def write_events(network: DynamicNetwork, path) -> None:
    """Emit the network as pre-binned `u v step` lines (ingest-compatible)."""
    with open(path, "w") as fh:
        for snap in network.snapshots:
            for u, v in sorted(snap.edges):
                fh.write(f"{u} {v} {snap.time_step}\n")
