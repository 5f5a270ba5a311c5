"""Class-by-class analysis and correlating per-class metrics.

Some classes retrieve far better than others. This demo queries every class
with each of its own samples, aggregates per-class AP, finds each class's
best and worst query sample, and correlates the per-class retrieval quality
against another per-class score (here: a synthetic classifier-recall stand-in
loaded from a CSV, the same file format the CLI's `corr` command reads).
"""

import tempfile
from pathlib import Path

import numpy as np

from lshkit import (
    class_analysis,
    class_metric_correlation,
    class_reports_json_lines,
    generate_synthetic,
    pearson_correlation,
    read_class_metric_csv,
)

# Large per-class spread: a noisy mixture makes some classes compact (easy)
# and, by chance, some diffuse (hard).
ds = generate_synthetic(num_classes=12, per_class=10, dim=16, cluster_std=0.9, seed=314)
reports = class_analysis(ds, backend="exact", k=10)

print(f"{'class':<11} {'mAP':>6} {'min':>6} {'max':>6} {'range':>6} {'best':>5} {'worst':>5}")
for r in sorted(reports, key=lambda r: r.mean_ap):
    print(f"{r.class_label:<11} {r.mean_ap:>6.3f} {r.min_ap:>6.3f} {r.max_ap:>6.3f} "
          f"{r.range_ap:>6.3f} {r.best_id:>5} {r.worst_id:>5}")

# Each report serializes to one JSON object (the CLI writes these lines):
print("\nJSON form of the first class:")
print(class_reports_json_lines(reports[:1]).strip())

# Correlate retrieval mAP against another per-class metric. A classifier's
# per-class recall typically tracks retrieval quality: classes that cluster
# tightly are easy for both. Simulate that with a noisy monotone transform.
rng = np.random.default_rng(0)
recall = {r.class_label: min(1.0, max(0.0, 0.2 + 0.75 * r.mean_ap + 0.05 * rng.standard_normal()))
          for r in reports}

with tempfile.TemporaryDirectory() as td:
    recall_csv = Path(td) / "recall.csv"
    recall_csv.write_text(
        "class,value\n" + "\n".join(f"{c},{v}" for c, v in recall.items()) + "\n"
    )
    loaded = read_class_metric_csv(recall_csv)

map_by_class = {r.class_label: r.mean_ap for r in reports}
coeff, shared = class_metric_correlation(map_by_class, loaded)
print(f"\nPearson correlation of class mAP vs class recall ({shared} classes): {coeff:.3f}")

# The coefficient is invariant under positive affine rescaling of either side:
xs = [map_by_class[c] for c in sorted(map_by_class)]
ys = [loaded[c] for c in sorted(loaded)]
print(f"affine invariance check: {pearson_correlation(xs, [10 * y + 3 for y in ys]):.3f}")
