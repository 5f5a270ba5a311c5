"""Tuning (L, K): the accuracy/efficiency trade-off.

Evaluates a grid of index configurations against held-out queries. Raising K
splits buckets finer: queries get cheaper (IE up) but recall suffers (mAP
down). Raising L adds tables: recall recovers at the price of more distance
computations. The sweep emits one CSV row per cell plus a trade-off pick.
"""

from lshkit import best_tradeoff, generate_synthetic, parameter_sweep, select_queries, sweep_csv_text

ds = generate_synthetic(num_classes=30, per_class=20, dim=64, cluster_std=0.3, seed=99)
queries = select_queries(ds, seed=99)  # 25% of each class held out, 1 query per class
print(f"dataset: {len(ds)} vectors; {len(queries)} held-out queries (one per class)\n")

reports = parameter_sweep(
    ds,
    L_values=[1, 3, 5, 7],
    K_values=[1, 2, 3],
    index_kind="real",
    query_ids=queries,
    seed=5,
    k=10,
)

print(f"{'L':>2} {'K':>2} {'mAP':>7} {'IE':>9} {'purity':>7} {'buckets':>8} {'items/bkt':>9}")
for r in reports:
    print(
        f"{r.L:>2} {r.K:>2} {r.mean_ap:>7.4f} {r.ie:>9.3f} "
        f"{r.avg_purity:>7.4f} {r.num_buckets:>8} {r.avg_per_bucket:>9.2f}"
    )

# Pick the most accurate configuration that still speeds queries up by at
# least 3x over the sequential scan.
choice = best_tradeoff(reports, ie_target=3.0)
print(f"\nbest mAP subject to IE >= 3: L={choice.L}, K={choice.K} "
      f"(mAP={choice.mean_ap:.4f}, IE={choice.ie:.2f})")

# The CSV emitted by `lshkit sweep` is exactly this text:
print("\nfirst CSV lines:")
print("\n".join(sweep_csv_text(reports).split("\n")[:3]))
