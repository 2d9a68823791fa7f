"""Evaluation toolkit for dynamic link prediction with edge addition and removal.

Splits the evaluation into new-link and previously-observed-link
populations (PRAUC for the former, AUC for the latter), combines them
into the unified geometric-mean score, and ships the baseline predictors
and dataset plumbing needed to run the full pipeline end to end.
"""

__version__ = "0.1.0"

from .dyngraph import (DynamicNetwork, PairHistory, Snapshot, build_network,
                       pair_history, was_previously_observed)
from .errors import (DylpError, EmptyNetworkError, InsufficientHistoryError,
                     StructuralError, UndefinedMetricError)
from .geodesics import (DistanceHistogram, bfs_distances,
                        distance_stratified_stats)
from .harness import (CandidateSet, ComparisonRow, EvalConfig, EvaluationRun,
                      MetricReport, candidate_set, compare_predictors,
                      run_evaluation)
from .ingest import (IngestConfig, NetworkSummary, RawEvent, bin_events,
                     filter_nodes, parse_events, read_network_file, summarize,
                     write_network_file)
from .metrics import (ConfusionMatrix, GmaucInputs, LabeledScores,
                      ThresholdCurve, confusion_at_threshold, gmauc, max_f1,
                      ndcg_at_k, pr_auc, pr_curve, precision_at_k, roc_auc,
                      roc_curve)
from .predictors import (PredictorConfig, ScoreSet, adamic_adar, ewma_path,
                         ewma_update, predict, predict_cumulative,
                         predict_random, predict_ts_adj, predict_ts_aa,
                         predict_ts_katz, truncated_katz)
from .synth import SynthConfig, generate

__all__ = [name for name in dir() if not name.startswith("_")]
