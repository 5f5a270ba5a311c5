"""Independent brute-force oracles used to cross-check the library.

Everything here is deliberately written in plain Python over Python floats,
with no shared code paths with the package under test.
"""

import math


def oracle_distance(a, b, metric):
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    if metric == "euclidean":
        return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(x * x for x in b))
    if na == 0.0 or nb == 0.0:
        return 1.0
    dot = sum(x * y for x, y in zip(a, b))
    return 1.0 - dot / (na * nb)


def oracle_ranking(ds, q, metric):
    """Full sort of every dataset vector by (distance, id)."""
    rows = sorted((oracle_distance(fv.values, q, metric), fv.id) for fv in ds)
    return [(vid, dist) for dist, vid in rows]


def oracle_average_precision(ranked_ids, relevant):
    hits = 0
    acc = 0.0
    for rank, rid in enumerate(ranked_ids, start=1):
        if rid in relevant:
            hits += 1
            acc += hits / rank
    return acc / len(relevant)


def oracle_member_ap(ds, query_id, k, metric):
    """AP for a dataset member under the self-excluding protocol: full-sort
    ranking, drop the query, truncate to k, relevant = same class minus it."""
    fv = ds.get(query_id)
    ranked = [vid for vid, _ in oracle_ranking(ds, fv.values, metric) if vid != query_id][:k]
    relevant = {int(i) for i in ds.class_ids(fv.label_id)} - {query_id}
    return oracle_average_precision(ranked, relevant)
