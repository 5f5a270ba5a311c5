"""Retrieval evaluation: AP/mAP, efficiency, bucket statistics, parameter
sweeps, per-class analysis, correlation, and distractor robustness.

The evaluation protocol indexes the full dataset and queries it with held-out
members; a query vector is always excluded from both its own result list and
its relevant set, so self-matches never inflate precision. Efficiency (IE) is
the ratio of total sequential-scan cost to total index cost over a query set,
costs measured in distance computations.
"""

from __future__ import annotations

import csv
import json
import os
import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .binary_lsh import BinaryLshIndex, BinaryLshParams
from .dataset import Dataset
from .exact import knn_exact
from .real_lsh import DEFAULT_WIDTH, RealLshIndex, RealLshParams, child_rng

STREAM_HOLDOUT = 2

INDEX_KINDS = ("real", "binary", "none")

SWEEP_CSV_HEADER = (
    "L,K,mAP,IE,avg_purity,std_purity,num_buckets,num_items,avg_per_bucket,std_per_bucket"
)


# ---------------------------------------------------------------------------
# Core metrics
# ---------------------------------------------------------------------------

def average_precision(ranked_ids: Sequence[int], relevant) -> float:
    """Mean of precision-at-rank over the relevant ranks, divided by the
    number of relevant items; 1.0 exactly when the relevant items fill the
    top |relevant| ranks."""
    relevant = {int(i) for i in relevant}
    if not relevant:
        raise ValueError("relevant set must be non-empty")
    hits = 0
    acc = 0.0
    for rank, rid in enumerate(ranked_ids, start=1):
        if int(rid) in relevant:
            hits += 1
            acc += hits / rank
    return acc / len(relevant)


def mean_average_precision(queries: Sequence[tuple[Sequence[int], Iterable[int]]]) -> float:
    """Arithmetic mean of per-query average precision."""
    if not queries:
        raise ValueError("query list must be non-empty")
    return float(np.mean([average_precision(ranked, relevant) for ranked, relevant in queries]))


def improvement_in_efficiency(seq_cost: int, index_cost: int) -> float:
    """Sequential-scan cost divided by index cost (distance computations)."""
    if seq_cost <= 0:
        raise ValueError(f"sequential cost must be positive, got {seq_cost}")
    if index_cost <= 0:
        raise ValueError(
            f"index cost must be positive, got {index_cost}; a zero cost signals "
            "an empty-candidate accounting bug upstream"
        )
    return seq_cost / index_cost


def pearson_correlation(xs, ys) -> float:
    """Standard product-moment coefficient; requires two non-constant
    sequences of equal length >= 2."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.ndim != 1 or ys.ndim != 1 or xs.shape != ys.shape:
        raise ValueError(f"length mismatch: {xs.shape} vs {ys.shape}")
    if len(xs) < 2:
        raise ValueError("need at least 2 points")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sx = np.sqrt((dx * dx).sum())
    sy = np.sqrt((dy * dy).sum())
    if sx == 0.0 or sy == 0.0:
        raise ValueError("correlation undefined for constant input")
    return float((dx * dy).sum() / (sx * sy))


# ---------------------------------------------------------------------------
# Bucket statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BucketStats:
    avg_purity: float
    std_purity: float
    num_buckets: int
    num_items: int
    avg_per_bucket: float
    std_per_bucket: float


def compute_bucket_stats(bucket_label_groups: Iterable[Sequence]) -> BucketStats:
    """Statistics over buckets given as per-bucket label sequences.

    Purity of a bucket is majority-class count / bucket size; the average is
    unweighted over buckets (each bucket counts once regardless of size).
    Standard deviations are population deviations. Empty groups are ignored.
    """
    purities: list[float] = []
    sizes: list[int] = []
    for labels in bucket_label_groups:
        size = len(labels)
        if size == 0:
            continue
        majority = max(Counter(labels).values())
        purities.append(majority / size)
        sizes.append(size)
    if not sizes:
        return BucketStats(0.0, 0.0, 0, 0, 0.0, 0.0)
    purities_arr = np.asarray(purities)
    sizes_arr = np.asarray(sizes, dtype=np.float64)
    num_items = int(sizes_arr.sum())
    return BucketStats(
        avg_purity=float(purities_arr.mean()),
        std_purity=float(purities_arr.std()),
        num_buckets=len(sizes),
        num_items=num_items,
        avg_per_bucket=num_items / len(sizes),
        std_per_bucket=float(sizes_arr.std()),
    )


def bucket_statistics(index: RealLshIndex | BinaryLshIndex) -> BucketStats:
    """The six bucket statistics of a built index, pooled over all L tables.

    num_items comes out as n*L because every table holds every vector once.
    """
    ds = index.dataset
    label_by_id = {int(i): int(lab) for i, lab in zip(ds.ids, ds.label_ids)}
    groups = (
        [label_by_id[i] for i in bucket]
        for table in index.tables
        for bucket in table.values()
    )
    return compute_bucket_stats(groups)


# ---------------------------------------------------------------------------
# Hold-out query selection and backend dispatch
# ---------------------------------------------------------------------------

def select_queries(
    ds: Dataset,
    seed: int,
    holdout_fraction: float = 0.25,
    queries_per_class: int = 1,
) -> list[int]:
    """Reserve a per-class hold-out pool and pick query ids from it.

    Default mirrors the evaluation protocol used throughout: 25% of each
    class held out, one query per class. Selection is deterministic per seed.
    """
    if not 0.0 < holdout_fraction <= 1.0:
        raise ValueError(f"holdout_fraction must be in (0, 1], got {holdout_fraction}")
    if queries_per_class < 1:
        raise ValueError("queries_per_class must be >= 1")
    rng = child_rng(seed, STREAM_HOLDOUT)
    queries: list[int] = []
    for label_id in range(len(ds.labels)):
        members = ds.class_ids(label_id)
        if len(members) == 0:
            continue
        if len(members) < 2:
            raise ValueError(f"class {ds.labels[label_id]!r} has fewer than 2 samples")
        held = max(1, int(round(holdout_fraction * len(members))))
        perm = rng.permutation(len(members))
        queries.extend(int(i) for i in members[perm[:held]][:queries_per_class])
    if not queries:
        raise ValueError("dataset has no populated classes to draw queries from")
    return queries


def _backend_query(backend, ds: Dataset, q, k: int, metric: str):
    if isinstance(backend, str):
        if backend != "exact":
            raise ValueError(f"unknown backend {backend!r}")
        return knn_exact(ds, q, k, metric)
    return backend.query(q, k, metric)


def _ranked_excluding(backend, ds: Dataset, query_id: int, k: int, metric: str):
    """Top-k ids for a dataset member, with the member itself removed."""
    qv = ds.get(query_id).values
    results, stats = _backend_query(backend, ds, qv, k + 1, metric)
    ranked = [rid for rid, _ in results if rid != query_id][:k]
    return ranked, stats


# ---------------------------------------------------------------------------
# Single-configuration evaluation and sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EvalReport:
    """One row of a parameter study: configuration, accuracy, efficiency,
    and bucket statistics. Baseline (index_kind 'none') rows carry L=K=0 and
    zeroed bucket fields."""

    L: int
    K: int
    mean_ap: float
    ie: float
    avg_purity: float
    std_purity: float
    num_buckets: int
    num_items: int
    avg_per_bucket: float
    std_per_bucket: float

    def csv_row(self) -> str:
        return ",".join(
            str(v)
            for v in (
                self.L,
                self.K,
                self.mean_ap,
                self.ie,
                self.avg_purity,
                self.std_purity,
                self.num_buckets,
                self.num_items,
                self.avg_per_bucket,
                self.std_per_bucket,
            )
        )


@dataclass(frozen=True)
class QueryOutcome:
    """Per-query detail behind an EvalReport, for inspection."""

    query_id: int
    ap: float
    seq_cost: int
    index_cost: int
    charged_cost: int
    empty_candidates: bool

    @property
    def ie(self) -> float:
        return self.seq_cost / self.charged_cost


def run_config(
    ds: Dataset,
    held_out_queries: Sequence[int],
    index_kind: str,
    L: int | None = None,
    K: int | None = None,
    w: float = DEFAULT_WIDTH,
    seed: int = 0,
    k: int = 10,
    metric: str = "cosine",
) -> tuple[EvalReport, list[QueryOutcome]]:
    """Evaluate one configuration and keep the per-query outcomes.

    The full dataset is indexed; each held-out query is excluded from its
    own relevant set and result list. An empty candidate set is charged cost
    1 (and flagged with a warning) to keep the efficiency ratio defined.
    """
    if index_kind not in INDEX_KINDS:
        raise ValueError(f"index_kind must be one of {INDEX_KINDS}, got {index_kind!r}")
    if not held_out_queries:
        raise ValueError("held_out_queries must be non-empty")
    if index_kind != "none" and (L is None or K is None):
        raise ValueError(f"L and K are required for index kind {index_kind!r}")

    if index_kind == "real":
        backend = RealLshIndex.build(ds, RealLshParams(L=L, K=K, w=w, seed=seed))
    elif index_kind == "binary":
        backend = BinaryLshIndex.build(ds, BinaryLshParams(L=L, K=K, seed=seed))
    else:
        backend = "exact"

    n = len(ds)
    outcomes: list[QueryOutcome] = []
    for qid in held_out_queries:
        fv = ds.get(qid)
        relevant = {int(i) for i in ds.class_ids(fv.label_id)} - {qid}
        if not relevant:
            raise ValueError(f"query {qid}: its class has no other member")
        ranked, stats = _ranked_excluding(backend, ds, qid, k, metric)
        raw = stats.distance_computations
        outcomes.append(
            QueryOutcome(
                query_id=qid,
                ap=average_precision(ranked, relevant),
                seq_cost=n,
                index_cost=raw,
                charged_cost=max(1, raw),
                empty_candidates=stats.candidates_examined == 0,
            )
        )

    empty = sum(o.empty_candidates for o in outcomes)
    if empty:
        warnings.warn(
            f"{empty} of {len(outcomes)} queries hit an empty candidate set; "
            "each charged cost 1",
            RuntimeWarning,
            stacklevel=2,
        )

    mean_ap = float(np.mean([o.ap for o in outcomes]))
    if index_kind == "none":
        report = EvalReport(0, 0, mean_ap, 1.0, 0.0, 0.0, 0, 0, 0.0, 0.0)
    else:
        ie = improvement_in_efficiency(
            sum(o.seq_cost for o in outcomes), sum(o.charged_cost for o in outcomes)
        )
        stats_ = bucket_statistics(backend)
        report = EvalReport(
            L,
            K,
            mean_ap,
            ie,
            stats_.avg_purity,
            stats_.std_purity,
            stats_.num_buckets,
            stats_.num_items,
            stats_.avg_per_bucket,
            stats_.std_per_bucket,
        )
    return report, outcomes


def evaluate_config(
    ds: Dataset,
    held_out_queries: Sequence[int],
    index_kind: str,
    L: int | None = None,
    K: int | None = None,
    w: float = DEFAULT_WIDTH,
    seed: int = 0,
    k: int = 10,
    metric: str = "cosine",
) -> EvalReport:
    report, _ = run_config(ds, held_out_queries, index_kind, L, K, w, seed, k, metric)
    return report


def parameter_sweep(
    ds: Dataset,
    L_values: Sequence[int],
    K_values: Sequence[int],
    index_kind: str = "real",
    query_ids: Sequence[int] | None = None,
    w: float = DEFAULT_WIDTH,
    seed: int = 0,
    k: int = 10,
    metric: str = "cosine",
) -> list[EvalReport]:
    """One EvalReport per (L, K) grid cell, in grid order (L outer, K inner).

    All cells share the same seed and the same held-out queries, so rows are
    comparable and reproducible.
    """
    if not L_values or not K_values:
        raise ValueError("L_values and K_values must be non-empty")
    if index_kind == "none":
        raise ValueError("parameter_sweep needs an index kind; use evaluate_config for the baseline")
    if query_ids is None:
        query_ids = select_queries(ds, seed=seed)
    return [
        evaluate_config(ds, query_ids, index_kind, L=L, K=K, w=w, seed=seed, k=k, metric=metric)
        for L in L_values
        for K in K_values
    ]


def sweep_csv_text(reports: Sequence[EvalReport]) -> str:
    lines = [SWEEP_CSV_HEADER]
    lines.extend(r.csv_row() for r in reports)
    return "\n".join(lines) + "\n"


def write_sweep_csv(reports: Sequence[EvalReport], path: str | os.PathLike) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(sweep_csv_text(reports))


def best_tradeoff(reports: Sequence[EvalReport], ie_target: float) -> EvalReport | None:
    """The row maximizing mAP subject to IE >= ie_target; ties prefer higher
    IE, then smaller (L, K). None when no row meets the target."""
    eligible = [r for r in reports if r.ie >= ie_target]
    if not eligible:
        return None
    return min(eligible, key=lambda r: (-r.mean_ap, -r.ie, r.L, r.K))


# ---------------------------------------------------------------------------
# Class-by-class analysis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassReport:
    """Per-class retrieval summary: AP aggregate over the class's queries,
    its spread, and the best/worst query samples."""

    class_label: str
    mean_ap: float
    min_ap: float
    max_ap: float
    range_ap: float
    std_ap: float
    best_id: int
    worst_id: int

    def to_dict(self) -> dict:
        return {
            "class": self.class_label,
            "mAP": self.mean_ap,
            "min_ap": self.min_ap,
            "max_ap": self.max_ap,
            "range_ap": self.range_ap,
            "std_ap": self.std_ap,
            "best_id": self.best_id,
            "worst_id": self.worst_id,
        }


def class_analysis(
    ds: Dataset,
    backend="exact",
    k: int = 10,
    metric: str = "cosine",
    query_ids: Sequence[int] | None = None,
) -> list[ClassReport]:
    """Query every class with its own samples and aggregate per-class AP.

    backend is the string "exact" or a built index over ds. By default every
    sample of every class is used as a query in turn; pass query_ids to
    restrict the protocol (classes left with no query are skipped). Classes
    need at least 2 samples so the relevant set is never empty.
    """
    allowed = None if query_ids is None else {int(i) for i in query_ids}
    reports: list[ClassReport] = []
    for label_id in range(len(ds.labels)):
        members = [int(i) for i in ds.class_ids(label_id)]
        if not members:
            continue
        if len(members) < 2:
            raise ValueError(f"class {ds.labels[label_id]!r} has fewer than 2 samples")
        queries = members if allowed is None else [i for i in members if i in allowed]
        if not queries:
            continue
        aps: dict[int, float] = {}
        for qid in queries:
            relevant = set(members) - {qid}
            ranked, _ = _ranked_excluding(backend, ds, qid, k, metric)
            aps[qid] = average_precision(ranked, relevant)
        values = np.array([aps[q] for q in queries])
        max_ap = float(values.max())
        min_ap = float(values.min())
        reports.append(
            ClassReport(
                class_label=ds.labels[label_id],
                mean_ap=float(values.mean()),
                min_ap=min_ap,
                max_ap=max_ap,
                range_ap=max_ap - min_ap,
                std_ap=float(values.std()),
                best_id=min(q for q in queries if aps[q] == max_ap),
                worst_id=min(q for q in queries if aps[q] == min_ap),
            )
        )
    return reports


def class_reports_json_lines(reports: Sequence[ClassReport]) -> str:
    """One JSON object per class, one per line."""
    return "\n".join(json.dumps(r.to_dict()) for r in reports) + "\n"


def read_class_metric_csv(path: str | os.PathLike) -> dict[str, float]:
    """Read a per-class metric file: CSV rows ``class,value`` with an
    optional header line."""
    out: dict[str, float] = {}
    with open(path, "r", newline="", encoding="utf-8") as fh:
        for row_no, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            if len(row) != 2:
                raise ValueError(f"{path}: row {row_no}: expected 'class,value'")
            name, raw = row
            try:
                value = float(raw)
            except ValueError:
                if row_no == 1:
                    continue  # header line
                raise ValueError(f"{path}: row {row_no}: malformed value {raw!r}") from None
            if name in out:
                raise ValueError(f"{path}: row {row_no}: duplicate class {name!r}")
            out[name] = value
    return out


def class_metric_correlation(xs: dict[str, float], ys: dict[str, float]) -> tuple[float, int]:
    """Pearson coefficient over the classes shared by two per-class metric
    tables; returns (coefficient, number of shared classes)."""
    common = sorted(set(xs) & set(ys))
    if len(common) < 2:
        raise ValueError(f"only {len(common)} shared classes; need at least 2")
    return pearson_correlation([xs[c] for c in common], [ys[c] for c in common]), len(common)


# ---------------------------------------------------------------------------
# Distractor robustness
# ---------------------------------------------------------------------------

def distractor_contamination(
    backend,
    k: int = 10,
    metric: str = "cosine",
    query_ids: Sequence[int] | None = None,
) -> float:
    """Fraction of top-k results drawn from the distractor source.

    backend is a merged Dataset (exact scan) or an index built over one; the
    dataset must carry the source flags attached by merge_datasets. Queries
    default to every source-a vector. Self-matches count like any result.
    """
    ds = backend if isinstance(backend, Dataset) else backend.dataset
    if ds.sources is None:
        raise ValueError("dataset carries no source flags; build it with merge_datasets")
    if query_ids is None:
        query_ids = [int(i) for i in ds.ids[ds.sources == 0]]
    if not query_ids:
        raise ValueError("no queries: the merged dataset has no source-a vectors")
    source_by_id = {int(i): int(s) for i, s in zip(ds.ids, ds.sources)}
    search = "exact" if isinstance(backend, Dataset) else backend
    total = 0
    from_distractor = 0
    for qid in query_ids:
        results, _ = _backend_query(search, ds, ds.get(qid).values, k, metric)
        for rid, _dist in results:
            total += 1
            from_distractor += source_by_id[rid]
    return from_distractor / total if total else 0.0
