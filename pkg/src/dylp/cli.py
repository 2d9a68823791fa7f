"""Command-line interface: ingest, evaluate, distances, synth.

Every emitted report embeds a run manifest (tool version, config hash,
dataset fingerprint, timestamp). Reports honor SOURCE_DATE_EPOCH so two
identical runs can produce byte-identical output. Exit codes: 0 success,
2 input/config errors, 3 when every metric in a requested population is
undefined.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .dyngraph import DynamicNetwork, decode_pair_keys
from .errors import DylpError
from .geodesics import DistanceHistogram, distance_stratified_stats
from .harness import ComparisonRow, EvalConfig, run_evaluation
from .ingest import (IngestConfig, bin_events, filter_nodes, parse_events,
                     read_network_file, summarize, write_network_file,
                     write_summary_csv)
from .metrics import LabeledScores, pr_curve, roc_curve
from .predictors import KINDS, PredictorConfig
from .synth import SynthConfig, generate, write_events

POPULATIONS = ("whole", "new", "prev")


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _default_threads() -> int:
    return os.cpu_count() or 1


def _resolve_threads(args) -> int:
    env = os.environ.get("DYLP_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise DylpError(f"DYLP_THREADS must be an integer, got {env!r}")
    return max(1, args.threads)


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        moment = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    else:
        moment = datetime.now(tz=timezone.utc)
    return moment.replace(microsecond=0).isoformat()


def _config_hash(payload) -> str:
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def manifest(network: DynamicNetwork, config_payload) -> dict:
    return {
        "tool": "dylp",
        "version": __version__,
        "created_utc": _timestamp(),
        "config_hash": _config_hash(config_payload),
        "dataset": {
            "num_nodes": network.num_nodes,
            "num_steps": network.num_steps,
            "total_edges": network.total_edges(),
            "directed": network.directed,
        },
    }


def _load_json(path: Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise DylpError(f"{path}: invalid JSON ({exc})")


# -- ingest --------------------------------------------------------------------


def cmd_ingest(args) -> int:
    events_path = Path(args.events)
    if not events_path.exists():
        return _fail(f"events file not found: {events_path}")
    mapping = {}
    if args.config:
        config_path = Path(args.config)
        if not config_path.exists():
            return _fail(f"config file not found: {config_path}")
        mapping = _load_json(config_path)
    if args.prebinned:
        mapping["prebinned"] = True
    config = IngestConfig.from_mapping(mapping)

    with open(events_path) as fh:
        events, malformed = parse_events(fh)
    if malformed:
        print(f"warning: skipped {malformed} malformed line(s)", file=sys.stderr)
    network = bin_events(events, config)
    if network.self_loops_dropped:
        print(f"warning: dropped {network.self_loops_dropped} self-loop(s)",
              file=sys.stderr)
    network = filter_nodes(network, config)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_network_file(network, out)

    summary = summarize(network)
    summary_path = out.with_name(out.stem + "_summary.csv")
    write_summary_csv(summary, summary_path)

    if network.node_labels is not None:
        nodes_path = out.with_name(out.stem + "_nodes.csv")
        with open(nodes_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["node_id", "label"])
            for i, label in enumerate(network.node_labels):
                w.writerow([i, label])

    print(f"wrote {out} ({network.num_nodes} nodes, {network.num_steps} steps, "
          f"{network.total_edges()} edges) and {summary_path}")
    return 0


# -- evaluate ------------------------------------------------------------------


def _predictor_configs(args) -> list[PredictorConfig]:
    overrides = {}
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise DylpError(f"config file not found: {path}")
        payload = _load_json(path)
        overrides = payload.get("predictor", payload)
        unknown = set(overrides) - {"kind", "decay", "katz_beta", "katz_max_length", "seed"}
        if unknown:
            raise DylpError(f"unknown predictor config keys: {sorted(unknown)}")
    requested = args.predictors if args.predictors else overrides.get("kind", "")
    kinds = [k.strip() for k in str(requested).split(",") if k.strip()]
    if not kinds:
        raise DylpError("no predictors requested (use --predictors or predictor.kind)")
    if len(set(kinds)) != len(kinds):
        raise DylpError(f"duplicate predictors requested: {kinds}")
    configs = []
    for kind in kinds:
        params = {k: v for k, v in overrides.items() if k != "kind"}
        if args.seed is not None:
            params["seed"] = args.seed
        try:
            configs.append(PredictorConfig(kind=kind, **params))
        except ValueError as exc:
            raise DylpError(str(exc))
    return configs


def _curve_csv(curve, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "threshold"])
        for x, y, thr in zip(curve.x, curve.y, curve.thresholds):
            w.writerow([repr(float(x)), repr(float(y)), repr(float(thr))])


def _population_scores(run, which: str) -> LabeledScores:
    return run.population({"whole": "all", "new": "new", "prev": "prev"}[which])


def _dump_scores(run, path) -> None:
    n = run.network.num_nodes
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "u", "v", "score", "label", "prev_flag"])
        for step, start, stop in run.step_bounds:
            keys = run.network.candidate_pair_keys(step - 1)
            u, v = decode_pair_keys(keys, n)
            for uu, vv, s, l, p in zip(
                u.tolist(), v.tolist(),
                run.scores[start:stop].tolist(),
                run.labels[start:stop].tolist(),
                run.prev[start:stop].tolist(),
            ):
                w.writerow([step, uu, vv, repr(s), int(l), int(p)])


def _fmt(x) -> str:
    if x is None:
        return "-"
    return f"{x:.4g}"


def _print_table(rows, k=None) -> None:
    header = ["predictor", "auc", "prauc", "max_f1", "new_auc", "new_prauc",
              "prev_auc", "prev_prauc", "gmauc", "rank"]
    if k is not None:
        header[4:4] = [f"p@{k}", f"ndcg@{k}"]
    table = [header]
    for row in rows:
        r = row.report
        cells = [
            row.name, _fmt(r.whole["auc"]), _fmt(r.whole["prauc"]),
            _fmt(r.whole["max_f1"]), _fmt(r.new["auc"]), _fmt(r.new["prauc"]),
            _fmt(r.prev["auc"]), _fmt(r.prev["prauc"]), _fmt(r.gmauc), str(row.rank),
        ]
        if k is not None:
            cells[4:4] = [_fmt(r.whole.get("precision_at_k")),
                          _fmt(r.whole.get("ndcg_at_k"))]
        table.append(cells)
    widths = [max(len(line[i]) for line in table) for i in range(len(header))]
    for line in table:
        print("  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip())


def cmd_evaluate(args) -> int:
    network_path = Path(args.network)
    if not network_path.exists():
        return _fail(f"network file not found: {network_path}")
    network = read_network_file(network_path)
    configs = _predictor_configs(args)
    threads = _resolve_threads(args)
    eval_config = EvalConfig(k=args.k, threads=threads)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    runs = {}
    for cfg in configs:
        run = run_evaluation(network, cfg, eval_config)
        runs[cfg.label] = run
    order = sorted(
        runs,
        key=lambda name: (
            runs[name].report.gmauc is None,
            -(runs[name].report.gmauc or 0.0),
            name,
        ),
    )
    ranks = {name: i + 1 for i, name in enumerate(order)}

    config_payload = {
        "predictors": [asdict(c) for c in configs],
        "k": args.k,
        "network": str(network_path),
    }
    report = {
        "manifest": manifest(network, config_payload),
        "eval": {"k": args.k, "threads": threads},
        "predictors": [],
    }

    curve_data = {pop: {"roc": [], "pr": []} for pop in POPULATIONS}
    for cfg in configs:
        name = cfg.label
        run = runs[name]
        rep = run.report
        rows.append(ComparisonRow(name=name, report=rep, rank=ranks[name]))
        report["predictors"].append({
            "name": name,
            "config": asdict(cfg),
            "rank_by_gmauc": ranks[name],
            "metrics": rep.as_dict(),
        })
        for pop in POPULATIONS:
            ls = _population_scores(run, pop)
            for kind, builder in (("roc", roc_curve), ("pr", pr_curve)):
                try:
                    curve = builder(ls)
                except DylpError:
                    continue
                curve_data[pop][kind].append((name, curve))
                _curve_csv(curve, out_dir / f"{name}_{pop}_{kind}.csv")
        if args.dump_scores:
            _dump_scores(run, out_dir / f"{name}_scores.csv")

    report_path = out_dir / "report.json"
    with open(report_path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")

    if not args.no_figures:
        from . import plots
        for pop in POPULATIONS:
            for kind in ("roc", "pr"):
                curves = curve_data[pop][kind]
                if curves:
                    plots.save_curve_overlay(
                        curves, kind, out_dir / f"{pop}_{kind}.png",
                        title=f"{pop} population",
                    )

    _print_table(rows, k=args.k)
    print(f"report written to {report_path}")

    for pop, key in (("whole", "whole"), ("new", "new"), ("prev", "prev")):
        bundles = [getattr(r.report, key) for r in rows]
        if all(b.get("auc") is None and b.get("prauc") is None for b in bundles):
            print(f"error: every metric in the {pop!r} population is undefined",
                  file=sys.stderr)
            return 3
    return 0


# -- distances -----------------------------------------------------------------


def _histogram_csv(hist: DistanceHistogram, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["distance", "pairs", "edges_formed", "fraction_of_edges",
                    "edge_probability"])
        for b in hist.buckets:
            prob = "" if b.edge_probability is None else repr(b.edge_probability)
            w.writerow([b.label, b.pairs, b.edges_formed,
                        repr(b.fraction_of_edges), prob])


def cmd_distances(args) -> int:
    network_path = Path(args.network)
    if not network_path.exists():
        return _fail(f"network file not found: {network_path}")
    network = read_network_file(network_path)
    hist = distance_stratified_stats(network, d_max=args.dmax)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    _histogram_csv(hist, out)
    if not args.no_figures:
        from . import plots
        plots.save_distance_figure(hist, out.with_suffix(".png"))
    print(f"distance histogram written to {out}")
    return 0


# -- synth ---------------------------------------------------------------------


def cmd_synth(args) -> int:
    config_path = Path(args.config)
    if not config_path.exists():
        return _fail(f"config file not found: {config_path}")
    payload = _load_json(config_path)
    known = {"num_nodes", "num_steps", "num_classes", "class_assignment",
             "block_prob", "persist_prob", "seed"}
    unknown = set(payload) - known
    if unknown:
        return _fail(f"unknown synth config keys: {sorted(unknown)}")
    if "class_assignment" in payload and payload["class_assignment"] is not None:
        payload["class_assignment"] = tuple(payload["class_assignment"])
    config = SynthConfig(**payload)
    network = generate(config)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_events(network, out)
    print(f"wrote {network.total_edges()} edge events over "
          f"{network.num_steps} steps to {out}")
    return 0


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dylp",
        description="Dynamic link prediction evaluation toolkit",
    )
    parser.add_argument("--version", action="version", version=f"dylp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse and bin raw edge events into a network file")
    p.add_argument("--events", required=True, help="timestamped or pre-binned edge events")
    p.add_argument("--config", help="JSON ingest configuration")
    p.add_argument("--prebinned", action="store_true",
                   help="treat the third column as a time step")
    p.add_argument("--out", required=True, help="output network file (dyln v1)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("evaluate", help="run predictors and compute the metric report")
    p.add_argument("--network", required=True, help="dyln v1 network file")
    p.add_argument("--predictors",
                   help=f"comma-separated predictor kinds from {','.join(KINDS)} "
                        f"(default: predictor.kind from --config)")
    p.add_argument("--config", help="JSON predictor hyperparameters")
    p.add_argument("--k", type=int, help="also report precision@k and NDCG@k")
    p.add_argument("--seed", type=int, help="seed for the random predictor")
    p.add_argument("--out-dir", default=".", help="directory for report and curve files")
    p.add_argument("--dump-scores", action="store_true",
                   help="write per-pair score dumps for auditing")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p.add_argument("--threads", type=int, default=_default_threads(),
                   help="evaluation thread budget (DYLP_THREADS overrides)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("distances", help="distance-stratified edge formation statistics")
    p.add_argument("--network", required=True, help="dyln v1 network file")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--dmax", type=int, default=6,
                   help="largest finite distance kept as its own bucket boundary")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p.set_defaults(func=cmd_distances)

    p = sub.add_parser("synth", help="generate a synthetic dynamic network")
    p.add_argument("--config", required=True, help="JSON generator configuration")
    p.add_argument("--out", required=True, help="output pre-binned event file")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DylpError, ValueError) as exc:
        return _fail(str(exc))
    except OSError as exc:
        return _fail(str(exc))


def entrypoint() -> None:
    sys.exit(main())
