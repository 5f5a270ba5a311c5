"""Labeled feature-vector datasets: loading, saving, generation, merging.

A Dataset is an immutable collection of d-dimensional float32 vectors, each
carrying a dense integer id and a class label. Two on-disk formats are
supported:

* fvec  -- a little-endian binary format (magic ``LSHF``) that round-trips
           bit-exactly,
* csv   -- a text format whose values are written with the shortest decimal
           representation that parses back to the same float32.
"""

from __future__ import annotations

import csv
import io
import os
import struct
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

FVEC_MAGIC = b"LSHF"
FVEC_VERSION = 1

_MASK64 = (1 << 64) - 1


class DatasetFormatError(ValueError):
    """A dataset file violates the fvec or csv format contract."""


@dataclass(frozen=True)
class FeatureVector:
    """One data point: a dense id, a label index, and its feature values."""

    id: int
    label_id: int
    values: np.ndarray


class Dataset:
    """Immutable labeled collection of equal-length float32 feature vectors.

    Invariants enforced at construction: ids are unique non-negative ints,
    every label_id indexes into ``labels``, all vectors have length ``dim``
    and contain only finite values. ``sources`` is an optional per-vector
    membership flag (0/1) attached by :func:`merge_datasets`.
    """

    def __init__(
        self,
        dim: int,
        labels: Sequence[str],
        ids: np.ndarray,
        label_ids: np.ndarray,
        vectors: np.ndarray,
        sources: np.ndarray | None = None,
    ):
        if dim < 1:
            raise ValueError(f"dim must be positive, got {dim}")
        labels = list(labels)
        if len(set(labels)) != len(labels):
            raise ValueError("label table contains duplicates")

        ids = np.ascontiguousarray(ids, dtype=np.int64)
        label_ids = np.ascontiguousarray(label_ids, dtype=np.int64)
        vectors = np.ascontiguousarray(vectors, dtype=np.float32).reshape(-1, dim)
        n = len(ids)
        if label_ids.shape != (n,) or vectors.shape != (n, dim):
            raise ValueError("ids, label_ids and vectors disagree on length")
        if n and ids.min() < 0:
            raise ValueError("vector ids must be non-negative")
        if len(np.unique(ids)) != n:
            raise ValueError("vector ids must be unique")
        if n and (label_ids.min() < 0 or label_ids.max() >= len(labels)):
            raise ValueError("label_id out of range of the label table")
        if not np.isfinite(vectors).all():
            raise ValueError("vectors contain non-finite values")
        if sources is not None:
            sources = np.ascontiguousarray(sources, dtype=np.uint8)
            if sources.shape != (n,):
                raise ValueError("sources must have one flag per vector")

        self.dim = int(dim)
        self.labels = tuple(labels)
        self.ids = ids
        self.label_ids = label_ids
        self.vectors = vectors
        self.sources = sources
        for arr in (ids, label_ids, vectors) + ((sources,) if sources is not None else ()):
            arr.setflags(write=False)
        self._row_of = {int(i): r for r, i in enumerate(ids)}
        self._values64: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self) -> Iterator[FeatureVector]:
        for row in range(len(self)):
            yield FeatureVector(int(self.ids[row]), int(self.label_ids[row]), self.vectors[row])

    def get(self, vector_id: int) -> FeatureVector:
        row = self.row_of(vector_id)
        return FeatureVector(vector_id, int(self.label_ids[row]), self.vectors[row])

    def row_of(self, vector_id: int) -> int:
        try:
            return self._row_of[int(vector_id)]
        except KeyError:
            raise KeyError(f"no vector with id {vector_id}") from None

    def label_of(self, vector_id: int) -> str:
        return self.labels[int(self.label_ids[self.row_of(vector_id)])]

    def class_ids(self, label_id: int) -> np.ndarray:
        """Ids of all vectors carrying the given label, in storage order."""
        return self.ids[self.label_ids == label_id]

    @property
    def values64(self) -> np.ndarray:
        """Float64 view of the vectors, cached; used by all distance math."""
        if self._values64 is None:
            self._values64 = self.vectors.astype(np.float64)
            self._values64.setflags(write=False)
        return self._values64


# ---------------------------------------------------------------------------
# fvec binary format
# ---------------------------------------------------------------------------

def _record_dtype(dim: int) -> np.dtype:
    return np.dtype([("id", "<u8"), ("label_id", "<u4"), ("values", "<f4", (dim,))])


def to_fvec_bytes(ds: Dataset) -> bytes:
    """Serialize a dataset to the fvec wire format."""
    buf = io.BytesIO()
    buf.write(FVEC_MAGIC)
    buf.write(struct.pack("<HII", FVEC_VERSION, ds.dim, len(ds.labels)))
    for label in ds.labels:
        raw = label.encode("utf-8")
        if len(raw) > 0xFFFF:
            raise ValueError(f"label too long for fvec format: {label[:32]}...")
        buf.write(struct.pack("<H", len(raw)))
        buf.write(raw)
    buf.write(struct.pack("<Q", len(ds)))
    records = np.zeros(len(ds), dtype=_record_dtype(ds.dim))
    records["id"] = ds.ids
    records["label_id"] = ds.label_ids
    records["values"] = ds.vectors
    buf.write(records.tobytes())
    return buf.getvalue()


def from_fvec_bytes(data: bytes) -> Dataset:
    """Parse the fvec wire format, reporting the byte offset of any defect."""
    if data[:4] != FVEC_MAGIC:
        raise DatasetFormatError("not an fvec file: bad magic at offset 0")
    try:
        version, dim, label_count = struct.unpack_from("<HII", data, 4)
        offset = 14
        if version != FVEC_VERSION:
            raise DatasetFormatError(f"unsupported fvec version {version}")
        labels = []
        for _ in range(label_count):
            (length,) = struct.unpack_from("<H", data, offset)
            offset += 2
            labels.append(data[offset : offset + length].decode("utf-8"))
            offset += length
        (count,) = struct.unpack_from("<Q", data, offset)
        offset += 8
    except struct.error as exc:
        raise DatasetFormatError(f"truncated fvec header near offset {offset}") from exc

    if dim == 0:
        raise DatasetFormatError("fvec header declares dim=0")
    dtype = _record_dtype(dim)
    expected = count * dtype.itemsize
    body = data[offset:]
    if len(body) != expected:
        raise DatasetFormatError(
            f"fvec body has {len(body)} bytes at offset {offset}, expected {expected}"
        )
    records = np.frombuffer(body, dtype=dtype)
    ids = records["id"].astype(np.int64)
    label_ids = records["label_id"].astype(np.int64)
    vectors = records["values"].astype(np.float32)

    bad = np.flatnonzero(~np.isfinite(vectors).all(axis=1))
    if bad.size:
        raise DatasetFormatError(f"non-finite value in record {bad[0]}")
    if count and len(np.unique(ids)) != count:
        seen: set[int] = set()
        for row, i in enumerate(ids):
            if int(i) in seen:
                raise DatasetFormatError(f"duplicate id {int(i)} in record {row}")
            seen.add(int(i))
    return Dataset(dim, labels, ids, label_ids, vectors)


# ---------------------------------------------------------------------------
# csv format
# ---------------------------------------------------------------------------

def _format_f32(value: np.float32) -> str:
    # str() of a float32 scalar is the shortest decimal that parses back
    # to the identical float32
    return str(np.float32(value))


def _write_csv(ds: Dataset, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["id", "label", f"dim={ds.dim}"])
    for fv in ds:
        row = [str(fv.id), ds.labels[fv.label_id]]
        row.extend(_format_f32(v) for v in fv.values)
        writer.writerow(row)


def _read_csv(fh) -> Dataset:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise DatasetFormatError("empty csv file: missing header") from None
    if len(header) != 3 or header[0] != "id" or header[1] != "label" or not header[2].startswith("dim="):
        raise DatasetFormatError(f"malformed csv header: {header!r}")
    try:
        dim = int(header[2][4:])
    except ValueError:
        raise DatasetFormatError(f"malformed csv header dim field: {header[2]!r}") from None
    if dim < 1:
        raise DatasetFormatError(f"csv header declares non-positive dim={dim}")

    ids: list[int] = []
    labels: list[str] = []
    label_index: dict[str, int] = {}
    label_ids: list[int] = []
    values: list[list[np.float32]] = []
    seen: set[int] = set()
    for row_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2 + dim:
            raise DatasetFormatError(
                f"row {row_no}: expected {2 + dim} fields for dim={dim}, got {len(row)}"
            )
        try:
            vid = int(row[0])
        except ValueError:
            raise DatasetFormatError(f"row {row_no}: malformed id {row[0]!r}") from None
        if vid in seen:
            raise DatasetFormatError(f"row {row_no}: duplicate id {vid}")
        seen.add(vid)
        label = row[1]
        if label not in label_index:
            label_index[label] = len(labels)
            labels.append(label)
        try:
            vals = [np.float32(tok) for tok in row[2:]]
        except ValueError:
            raise DatasetFormatError(f"row {row_no}: malformed value") from None
        if not all(np.isfinite(v) for v in vals):
            raise DatasetFormatError(f"row {row_no}: non-finite value")
        ids.append(vid)
        label_ids.append(label_index[label])
        values.append(vals)

    vectors = np.array(values, dtype=np.float32).reshape(len(ids), dim)
    return Dataset(dim, labels, np.array(ids, dtype=np.int64), np.array(label_ids, dtype=np.int64), vectors)


# ---------------------------------------------------------------------------
# public load / save / generate / merge
# ---------------------------------------------------------------------------

def _infer_format(path: str | os.PathLike, fmt: str | None) -> str:
    if fmt is not None:
        if fmt not in ("csv", "fvec"):
            raise ValueError(f"unknown dataset format {fmt!r}, expected 'csv' or 'fvec'")
        return fmt
    ext = os.path.splitext(os.fspath(path))[1].lower()
    if ext == ".csv":
        return "csv"
    if ext == ".fvec":
        return "fvec"
    raise ValueError(f"cannot infer dataset format from {path!r}; pass fmt='csv' or 'fvec'")


def load_dataset(path: str | os.PathLike, fmt: str | None = None) -> Dataset:
    """Load a dataset from an fvec or csv file (format inferred from extension)."""
    fmt = _infer_format(path, fmt)
    if fmt == "fvec":
        with open(path, "rb") as fh:
            return from_fvec_bytes(fh.read())
    with open(path, "r", newline="", encoding="utf-8") as fh:
        return _read_csv(fh)


def save_dataset(ds: Dataset, path: str | os.PathLike, fmt: str | None = None) -> None:
    """Write a dataset; fvec round-trips bit-exactly, csv within float32 repr."""
    fmt = _infer_format(path, fmt)
    if fmt == "fvec":
        with open(path, "wb") as fh:
            fh.write(to_fvec_bytes(ds))
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            _write_csv(ds, fh)


def generate_synthetic(
    num_classes: int,
    per_class: int,
    dim: int,
    cluster_std: float,
    seed: int,
) -> Dataset:
    """Deterministic isotropic Gaussian-mixture dataset.

    Class centroids are drawn N(0,1) per coordinate, then each class sample
    is centroid + N(0, cluster_std^2) noise. All draws come from a single
    PCG64 generator seeded with ``seed`` (centroids first, then noise), so
    equal arguments always produce equal datasets.
    """
    if num_classes < 1 or per_class < 1 or dim < 1:
        raise ValueError("num_classes, per_class and dim must be positive")
    if cluster_std < 0:
        raise ValueError("cluster_std must be non-negative")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed & _MASK64))
    centroids = rng.standard_normal((num_classes, dim))
    noise = rng.standard_normal((num_classes, per_class, dim)) * cluster_std
    vectors = (centroids[:, None, :] + noise).reshape(-1, dim).astype(np.float32)
    n = num_classes * per_class
    labels = [f"class_{c:03d}" for c in range(num_classes)]
    label_ids = np.repeat(np.arange(num_classes, dtype=np.int64), per_class)
    return Dataset(dim, labels, np.arange(n, dtype=np.int64), label_ids, vectors)


def merge_datasets(a: Dataset, b: Dataset, label_namespace: str = "b/") -> Dataset:
    """Union of two datasets of equal dimensionality.

    b's ids are reassigned densely above a's maximum id, b's labels are
    appended under ``label_namespace``, and every vector keeps a source flag
    (0 = from a, 1 = from b) exposed as ``Dataset.sources``.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} != {b.dim}")
    b_labels = [label_namespace + lab for lab in b.labels]
    labels = list(a.labels) + b_labels
    if len(set(labels)) != len(labels):
        raise ValueError("label namespace collision while merging")

    next_id = int(a.ids.max()) + 1 if len(a) else 0
    b_ids = np.arange(next_id, next_id + len(b), dtype=np.int64)
    ids = np.concatenate([a.ids, b_ids])
    label_ids = np.concatenate([a.label_ids, b.label_ids + len(a.labels)])
    vectors = np.concatenate([a.vectors, b.vectors])
    sources = np.concatenate(
        [np.zeros(len(a), dtype=np.uint8), np.ones(len(b), dtype=np.uint8)]
    )
    return Dataset(a.dim, labels, ids, label_ids, vectors, sources=sources)
