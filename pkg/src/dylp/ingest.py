"""Parsing and binning of raw timestamped edge data.

Raw events are `src dst timestamp` lines (comma, tab, or whitespace
separated). Timestamped events fall into fixed-width bins counted from an
origin; incomplete trailing bins are dropped so every retained step covers
a full window. Pre-binned inputs carry the step number directly in the
third column.

The module also reads and writes the versioned `dyln v1` network file
format used by the command-line tools.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from .dyngraph import DynamicNetwork, build_network, decode_pair_keys
from .errors import EmptyNetworkError, InsufficientHistoryError, StructuralError


@dataclass(frozen=True)
class RawEvent:
    src: str
    dst: str
    timestamp: int


@dataclass(frozen=True)
class IngestConfig:
    """Binning and filtering parameters.

    ``bin_width_seconds`` is required unless ``prebinned``; a None origin
    defaults to the earliest event timestamp. ``min_total_degree``
    removes nodes whose aggregate in- and out-degree (plain degree when
    undirected) both fall below the threshold; ``drop_isolated`` removes
    nodes with no edge in any snapshot.
    """

    bin_width_seconds: int | None = None
    origin_epoch_seconds: int | None = None
    directed: bool = False
    min_total_degree: int = 0
    drop_isolated: bool = False
    prebinned: bool = False

    _KEYS = ("bin_width_seconds", "origin_epoch_seconds", "directed",
             "min_total_degree", "drop_isolated", "prebinned")

    @classmethod
    def from_mapping(cls, mapping: dict) -> "IngestConfig":
        unknown = set(mapping) - set(cls._KEYS)
        if unknown:
            raise StructuralError(f"unknown ingest config keys: {sorted(unknown)}")
        coerced = dict(mapping)
        for key in ("bin_width_seconds", "origin_epoch_seconds", "min_total_degree"):
            if coerced.get(key) is not None:
                value = coerced[key]
                if int(value) != value:
                    raise StructuralError(f"{key} must be an integer, got {value!r}")
                coerced[key] = int(value)
        cfg = cls(**coerced)
        if not cfg.prebinned:
            if cfg.bin_width_seconds is None or cfg.bin_width_seconds <= 0:
                raise StructuralError("bin_width_seconds must be a positive integer")
        if cfg.min_total_degree < 0:
            raise StructuralError("min_total_degree must be >= 0")
        return cfg


def parse_events(stream: Iterable[str]) -> tuple[list[RawEvent], int]:
    """Parse `src dst timestamp` lines; returns (events, malformed count).

    Lines starting with '#' and blank lines are skipped silently; lines
    with the wrong field count, a non-integer timestamp, or a negative
    timestamp are counted as malformed and skipped.
    """
    events: list[RawEvent] = []
    malformed = 0
    for line in stream:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split(",") if "," in line else line.split()
        if len(fields) != 3:
            malformed += 1
            continue
        src, dst, ts_text = (f.strip() for f in fields)
        try:
            ts = int(ts_text)
        except ValueError:
            malformed += 1
            continue
        if ts < 0 or not src or not dst:
            malformed += 1
            continue
        events.append(RawEvent(src, dst, ts))
    return events, malformed


def bin_events(events: list[RawEvent], config: IngestConfig) -> DynamicNetwork:
    """Assemble events into a DynamicNetwork of binned snapshots.

    An event at timestamp s lands in step floor((s - origin)/width) + 1.
    Events before the origin or past the last complete bin are dropped;
    duplicate pairs within one bin collapse to a single edge. External
    node ids map to dense ids in first-appearance order over the retained
    events; the mapping is kept on ``node_labels``.
    """
    if not events:
        raise EmptyNetworkError("no events to bin")

    if config.prebinned:
        steps = [e.timestamp for e in events]
        if min(steps) < 1:
            raise StructuralError("pre-binned steps must be >= 1")
        num_steps = max(steps)
        retained = list(zip(steps, events))
    else:
        width = config.bin_width_seconds
        if width is None or width <= 0:
            raise StructuralError("bin_width_seconds must be a positive integer")
        stamps = [e.timestamp for e in events]
        origin = config.origin_epoch_seconds
        if origin is None:
            origin = min(stamps)
        last = max(stamps)
        num_steps = max(0, (last - origin + 1) // width)
        retained = []
        for e in events:
            if e.timestamp < origin:
                continue
            step = (e.timestamp - origin) // width + 1
            if step <= num_steps:
                retained.append((step, e))
    if num_steps < 1 or not retained:
        raise EmptyNetworkError("every event falls outside the binning window")

    ids: dict[str, int] = {}
    per_step: list[set] = [set() for _ in range(num_steps)]
    for step, e in retained:
        u = ids.setdefault(e.src, len(ids))
        v = ids.setdefault(e.dst, len(ids))
        per_step[step - 1].add((u, v))
    labels = [None] * len(ids)
    for name, i in ids.items():
        labels[i] = name
    return build_network(
        [(t, edges) for t, edges in enumerate(per_step, start=1)],
        directed=config.directed,
        num_nodes=len(ids),
        node_labels=labels,
    )


def _union_degrees(network: DynamicNetwork):
    """(in_degree, out_degree) over the aggregate union graph (binary)."""
    n = network.num_nodes
    u, v = decode_pair_keys(network.union_keys(network.num_steps), n)
    out_deg = np.bincount(u, minlength=n)
    in_deg = np.bincount(v, minlength=n)
    if not network.directed:
        total = in_deg + out_deg  # each undirected edge stored once
        return total, total
    return in_deg, out_deg


def filter_nodes(network: DynamicNetwork, config: IngestConfig) -> DynamicNetwork:
    """Remove low-degree and/or isolated nodes, re-densifying ids.

    The degree test uses the aggregate union graph and repeats until no
    node falls below the threshold, so the result is a fixed point and
    the operation is idempotent.
    """
    current = network
    while True:
        in_deg, out_deg = _union_degrees(current)
        keep = np.ones(current.num_nodes, dtype=bool)
        if config.min_total_degree > 0:
            keep &= (in_deg >= config.min_total_degree) | (out_deg >= config.min_total_degree)
        if config.drop_isolated:
            keep &= (in_deg + out_deg) > 0
        if keep.all():
            return current
        new_id = np.cumsum(keep) - 1
        labels = None
        if current.node_labels is not None:
            labels = [lab for lab, k in zip(current.node_labels, keep) if k]
        remapped = []
        for snap in current.snapshots:
            edges = [
                (int(new_id[u]), int(new_id[v]))
                for u, v in snap.edges
                if keep[u] and keep[v]
            ]
            remapped.append((snap.time_step, edges))
        current = build_network(
            remapped,
            directed=current.directed,
            num_nodes=int(keep.sum()),
            node_labels=labels,
        )


@dataclass(frozen=True)
class StepStats:
    step: int
    edges: int
    edge_prob: float
    new_edge_prob: float | None
    prev_edge_prob: float | None
    deletion_rate: float | None


@dataclass(frozen=True)
class NetworkSummary:
    num_nodes: int
    directed: bool
    num_steps: int
    pair_universe: int
    steps: tuple[StepStats, ...]
    mean_edges: float
    mean_edge_prob: float
    mean_new_edge_prob: float | None
    mean_prev_edge_prob: float | None
    mean_deletion_rate: float | None


def _mean(values: list[float]) -> float | None:
    return sum(values) / len(values) if values else None


def summarize(network: DynamicNetwork) -> NetworkSummary:
    """Per-step and mean edge statistics over the full pair universe.

    The edge probability at step t is the edge count over the number of
    registered node pairs. The new-edge probability divides edges between
    never-before-connected pairs by the count of such pairs; the
    previously-observed probability divides re-occurring edges by the
    count of previously connected pairs. Means run over the prediction
    targets t = 2..T, where all three quantities are defined. The
    deletion rate at step t is the fraction of its edges absent at t+1.
    """
    T = network.num_steps
    if T < 2:
        raise InsufficientHistoryError("summary needs at least two time steps")
    n = network.num_nodes
    universe = n * (n - 1) if network.directed else n * (n - 1) // 2
    if universe == 0:
        raise EmptyNetworkError("network has fewer than two nodes")

    rows = []
    for t in range(1, T + 1):
        edges_t = network.edge_keys(t)
        m = edges_t.size
        new_p = prev_p = None
        if t >= 2:
            union_prev = network.union_keys(t - 1)
            reoccur = np.intersect1d(edges_t, union_prev, assume_unique=True).size
            prev_pairs = union_prev.size
            new_pairs = universe - prev_pairs
            if prev_pairs > 0:
                prev_p = reoccur / prev_pairs
            if new_pairs > 0:
                new_p = (m - reoccur) / new_pairs
        deletion = None
        if t < T:
            nxt = network.edge_keys(t + 1)
            if m > 0:
                kept = np.intersect1d(edges_t, nxt, assume_unique=True).size
                deletion = (m - kept) / m
        rows.append(StepStats(t, int(m), m / universe, new_p, prev_p, deletion))

    tail = rows[1:]
    return NetworkSummary(
        num_nodes=n,
        directed=network.directed,
        num_steps=T,
        pair_universe=universe,
        steps=tuple(rows),
        mean_edges=_mean([r.edges for r in tail]),
        mean_edge_prob=_mean([r.edge_prob for r in tail]),
        mean_new_edge_prob=_mean([r.new_edge_prob for r in tail if r.new_edge_prob is not None]),
        mean_prev_edge_prob=_mean([r.prev_edge_prob for r in tail if r.prev_edge_prob is not None]),
        mean_deletion_rate=_mean([r.deletion_rate for r in rows if r.deletion_rate is not None]),
    )


def write_summary_csv(summary: NetworkSummary, path) -> None:
    """Summary table with a trailing mean row (columns per step stats)."""

    def cell(x):
        return "" if x is None else repr(float(x))

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "edges", "edge_prob", "new_edge_prob",
                    "prev_edge_prob", "deletion_rate"])
        for r in summary.steps:
            w.writerow([r.step, r.edges, cell(r.edge_prob),
                        cell(r.new_edge_prob), cell(r.prev_edge_prob),
                        cell(r.deletion_rate)])
        w.writerow(["mean", cell(summary.mean_edges), cell(summary.mean_edge_prob),
                    cell(summary.mean_new_edge_prob), cell(summary.mean_prev_edge_prob),
                    cell(summary.mean_deletion_rate)])


# -- dyln v1 network file -----------------------------------------------------

_HEADER_MAGIC = "dyln"
_HEADER_VERSION = "v1"


def write_network_file(network: DynamicNetwork, path) -> None:
    """Write the line-oriented `dyln v1` format: header, then `t u v` lines."""
    mode = "directed" if network.directed else "undirected"
    with open(path, "w") as fh:
        fh.write(f"{_HEADER_MAGIC} {_HEADER_VERSION} {mode} "
                 f"{network.num_nodes} {network.num_steps}\n")
        for snap in network.snapshots:
            for u, v in sorted(snap.edges):
                fh.write(f"{snap.time_step} {u} {v}\n")


def read_network_file(path_or_stream) -> DynamicNetwork:
    """Read a `dyln v1` file back into a DynamicNetwork."""
    if hasattr(path_or_stream, "read"):
        return _read_network(path_or_stream)
    with open(path_or_stream) as fh:
        return _read_network(fh)


def _read_network(fh: IO[str]) -> DynamicNetwork:
    header = fh.readline().split()
    if len(header) != 5 or header[0] != _HEADER_MAGIC:
        raise StructuralError("not a dyln network file")
    if header[1] != _HEADER_VERSION:
        raise StructuralError(f"unsupported dyln version {header[1]!r}")
    if header[2] not in ("directed", "undirected"):
        raise StructuralError(f"bad directedness flag {header[2]!r}")
    directed = header[2] == "directed"
    try:
        num_nodes, num_steps = int(header[3]), int(header[4])
    except ValueError as exc:
        raise StructuralError("malformed dyln header counts") from exc
    if num_steps < 1:
        raise StructuralError("dyln file must declare at least one step")
    per_step: list[list] = [[] for _ in range(num_steps)]
    for lineno, line in enumerate(fh, start=2):
        line = line.strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 3:
            raise StructuralError(f"line {lineno}: expected `t u v`")
        try:
            t, u, v = (int(f) for f in fields)
        except ValueError as exc:
            raise StructuralError(f"line {lineno}: non-integer field") from exc
        if not 1 <= t <= num_steps:
            raise StructuralError(f"line {lineno}: step {t} outside 1..{num_steps}")
        per_step[t - 1].append((u, v))
    return build_network(
        [(t, edges) for t, edges in enumerate(per_step, start=1)],
        directed=directed,
        num_nodes=num_nodes,
    )
