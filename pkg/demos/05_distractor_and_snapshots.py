"""Distractor robustness and index snapshots.

Robustness test: mix a foreign collection into the index and check that
queries from the original collection still surface only original items.
Then persist an index to disk and verify the loaded copy answers queries
identically.
"""

import tempfile
from pathlib import Path

import numpy as np

from lshkit import (
    BinaryLshParams,
    Dataset,
    RealLshParams,
    build_binary_index,
    build_real_index,
    distractor_contamination,
    generate_synthetic,
    load_index,
    merge_datasets,
    save_index,
)

# Two sources: the collection we care about (a) and a distractor (b) shifted
# far away in feature space, so a robust system should never surface b items
# for an a query.
a = generate_synthetic(num_classes=6, per_class=20, dim=16, cluster_std=0.1, seed=1)
b_raw = generate_synthetic(num_classes=6, per_class=20, dim=16, cluster_std=0.1, seed=2)
b = Dataset(b_raw.dim, b_raw.labels, b_raw.ids, b_raw.label_ids, b_raw.vectors + np.float32(4.0))

merged = merge_datasets(a, b, label_namespace="distractor/")
print(f"merged: {len(merged)} vectors, sources: {np.bincount(merged.sources).tolist()}")

# Contamination = fraction of top-k results that come from the distractor,
# aggregated over every source-a query.
print(f"exact scan contamination @10: {distractor_contamination(merged, k=10)}")
real = build_real_index(merged, RealLshParams(L=5, K=2, seed=3))
binary = build_binary_index(merged, BinaryLshParams(L=5, K=8, seed=3))
print(f"real LSH contamination @10:   {distractor_contamination(real, k=10)}")
print(f"binary LSH contamination @10: {distractor_contamination(binary, k=10)}")

# Snapshots: coefficients are stored as f32 (the same precision the index
# hashes with), so a loaded index is query-identical to the original. The
# snapshot also records a fingerprint of the dataset it was built over and
# refuses to load against anything else.
with tempfile.TemporaryDirectory() as td:
    path = Path(td) / "merged_real.idx"
    save_index(real, path)
    print(f"\nsnapshot: {path.stat().st_size} bytes")
    loaded = load_index(path, merged)

    rng = np.random.default_rng(4)
    identical = all(
        loaded.query(q, k=10) == real.query(q, k=10)
        for q in rng.standard_normal((50, merged.dim)).astype(np.float32)
    )
    print(f"loaded index answers 50 random queries identically: {identical}")

    try:
        load_index(path, a)
    except Exception as exc:
        print(f"loading against the wrong dataset fails: {type(exc).__name__}: {exc}")
