"""Real-valued random-projection LSH.

Each of the L hash tables keys vectors by a K-tuple of integer hashes
floor((v . X + b) / w), with X drawn Gaussian(0,1) per coordinate and b
uniform in [0, w]. Similar vectors land in the same bucket of at least one
table with high probability; query time only ranks the union of the L
buckets the query hashes to.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .distances import as_query, check_metric, distances_to, rank_top_k
from .exact import QueryStats

_MASK64 = (1 << 64) - 1

# spawn-key stream tags, so the per-(table, slot) generators of the two
# index families never collide for the same master seed
STREAM_REAL = 0
STREAM_BINARY = 1

DEFAULT_WIDTH = 4.0


def child_rng(seed: int, *key: int) -> np.random.Generator:
    """Child generator for (seed, *key): PCG64 over SeedSequence(seed, spawn_key=key).

    Coefficients at (table t, slot j) depend only on (seed, t, j), never on
    L or K, so an index with more tables or longer keys reuses the smaller
    index's functions as a prefix.
    """
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed & _MASK64, spawn_key=key)
    )


@dataclass(frozen=True)
class RealLshParams:
    """L tables, K integer hashes per key, segment width w (default 4)."""

    L: int
    K: int
    w: float = DEFAULT_WIDTH
    seed: int = 0

    def __post_init__(self):
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if not self.w > 0:
            raise ValueError(f"w must be positive, got {self.w}")


@dataclass(frozen=True)
class ProjectionFunction:
    """One elementary hash: projection axis X and offset b, kept in float32."""

    X: np.ndarray
    b: float


def _floor_keys(values64: np.ndarray, axes64: np.ndarray, offsets64: np.ndarray, w: float) -> np.ndarray:
    # einsum (not BLAS) keeps each row's accumulation independent of batch
    # size, so a vector hashes identically at build and at query time
    proj = np.einsum("nd,kd->nk", values64, axes64) + offsets64
    return np.floor(proj / w).astype(np.int64)


def projection_hash(vector, fn: ProjectionFunction, width: float) -> int:
    """floor((vector . X + b) / width), mathematical floor toward -inf."""
    v = np.asarray(vector, dtype=np.float64).reshape(1, -1)
    axis = np.asarray(fn.X, dtype=np.float64).reshape(1, -1)
    keys = _floor_keys(v, axis, np.float64(fn.b), width)
    return int(keys[0, 0])


class RealLshIndex:
    """Frozen after build: concurrent readers, no mutation."""

    kind = "real"

    def __init__(
        self,
        params: RealLshParams,
        dim: int,
        axes: np.ndarray,
        offsets: np.ndarray,
        tables: list[dict[tuple[int, ...], list[int]]],
        dataset: Dataset,
    ):
        self.params = params
        self.dim = dim
        self.axes = np.ascontiguousarray(axes, dtype=np.float32).reshape(params.L, params.K, dim)
        self.offsets = np.ascontiguousarray(offsets, dtype=np.float32).reshape(params.L, params.K)
        self.tables = tables
        self.dataset = dataset
        self._axes64 = self.axes.reshape(params.L * params.K, dim).astype(np.float64)
        self._offsets64 = self.offsets.reshape(-1).astype(np.float64)

    @classmethod
    def build(cls, ds: Dataset, params: RealLshParams) -> "RealLshIndex":
        if len(ds) == 0:
            raise ValueError("cannot build an index over an empty dataset")
        axes = np.empty((params.L, params.K, ds.dim), dtype=np.float32)
        offsets = np.empty((params.L, params.K), dtype=np.float32)
        for t in range(params.L):
            for j in range(params.K):
                rng = child_rng(params.seed, STREAM_REAL, t, j)
                axes[t, j] = rng.standard_normal(ds.dim).astype(np.float32)
                offsets[t, j] = np.float32(rng.uniform(0.0, params.w))
        index = cls(params, ds.dim, axes, offsets, [], ds)
        keys = index._keys_for(ds.values64)
        tables: list[dict[tuple[int, ...], list[int]]] = []
        for t in range(params.L):
            table: dict[tuple[int, ...], list[int]] = {}
            table_keys = keys[:, t, :].tolist()
            for row, key in enumerate(table_keys):
                table.setdefault(tuple(key), []).append(int(ds.ids[row]))
            tables.append(table)
        index.tables = tables
        return index

    def _keys_for(self, values64: np.ndarray) -> np.ndarray:
        """(n, L, K) integer hash array for a float64 batch."""
        L, K = self.params.L, self.params.K
        flat = _floor_keys(values64, self._axes64, self._offsets64, self.params.w)
        return flat.reshape(-1, L, K)

    def projection(self, table_index: int, slot: int) -> ProjectionFunction:
        return ProjectionFunction(self.axes[table_index, slot], float(self.offsets[table_index, slot]))

    def bucket_key(self, table_index: int, vector) -> tuple[int, ...]:
        """The K-tuple key of ``vector`` under table ``table_index``."""
        if not 0 <= table_index < self.params.L:
            raise ValueError(f"table_index {table_index} out of range for L={self.params.L}")
        qv = as_query(vector, self.dim).astype(np.float64)
        keys = self._keys_for(qv.reshape(1, -1))
        return tuple(int(h) for h in keys[0, table_index])

    def candidates(self, q) -> tuple[np.ndarray, int]:
        """Deduplicated candidate ids for a query, plus the multiset count
        of bucket members across all L tables (the charged query cost)."""
        qv = as_query(q, self.dim).astype(np.float64)
        keys = self._keys_for(qv.reshape(1, -1))[0]
        gathered: list[int] = []
        for t, table in enumerate(self.tables):
            gathered.extend(table.get(tuple(int(h) for h in keys[t]), ()))
        unique = np.unique(np.asarray(gathered, dtype=np.int64))
        return unique, len(gathered)

    def query(
        self, q, k: int = 10, metric: str = "cosine"
    ) -> tuple[list[tuple[int, float]], QueryStats]:
        """Rank the union of the query's L buckets; at most k results.

        Ties on distance break by ascending id. distance_computations counts
        bucket members with multiplicity across tables; the returned list is
        deduplicated before ranking.
        """
        check_metric(metric)
        unique, multiset = self.candidates(q)
        stats = QueryStats(distance_computations=multiset, candidates_examined=len(unique))
        if len(unique) == 0:
            return [], stats
        rows = np.fromiter((self.dataset.row_of(i) for i in unique), dtype=np.int64, count=len(unique))
        dists = distances_to(self.dataset.values64[rows], as_query(q, self.dim), metric)
        return rank_top_k(unique, dists, k), stats


def build_real_index(ds: Dataset, params: RealLshParams) -> RealLshIndex:
    return RealLshIndex.build(ds, params)
