"""Versioned binary snapshots of built indexes.

Layout (little-endian): magic ``LSHIDX``, u16 version, u8 kind (0 = real,
1 = binary), a params block (u32 L, u32 K, [f64 w for the real kind],
u64 seed, u32 dim), the u64 dataset fingerprint, the hash coefficients as
f32, then the tables: u64 table count, per table a u64 bucket count, per
bucket a u16 key length, the key bytes (K little-endian i64 for real keys,
one u64 for binary signatures), a u64 id count and the ids as u64.

Coefficients are stored in f32 and the in-memory index already computes from
f32 coefficients, so a loaded index hashes bit-identically to the original.
A snapshot only loads against a dataset whose fvec serialization hashes to
the stored fingerprint.
"""

from __future__ import annotations

import hashlib
import os
import struct
import tempfile

import numpy as np

from .binary_lsh import BinaryLshIndex, BinaryLshParams
from .dataset import Dataset, to_fvec_bytes
from .real_lsh import RealLshIndex, RealLshParams

SNAPSHOT_MAGIC = b"LSHIDX"
SNAPSHOT_VERSION = 1

_KIND_CODES = {"real": 0, "binary": 1}
_MASK64 = (1 << 64) - 1


class SnapshotError(ValueError):
    """A snapshot file is malformed, truncated, or does not match the dataset."""


def dataset_fingerprint(ds: Dataset) -> int:
    """64-bit stable hash of the dataset's fvec serialization."""
    digest = hashlib.blake2b(to_fvec_bytes(ds), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def save_index(index: RealLshIndex | BinaryLshIndex, path: str | os.PathLike) -> None:
    """Write a snapshot atomically (temp file + rename)."""
    payload = _serialize(index)
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _serialize(index) -> bytes:
    chunks = [SNAPSHOT_MAGIC, struct.pack("<HB", SNAPSHOT_VERSION, _KIND_CODES[index.kind])]
    params = index.params
    if index.kind == "real":
        chunks.append(struct.pack("<IIdQI", params.L, params.K, params.w, params.seed & _MASK64, index.dim))
        chunks.append(struct.pack("<Q", dataset_fingerprint(index.dataset)))
        chunks.append(index.axes.astype("<f4").tobytes())
        chunks.append(index.offsets.astype("<f4").tobytes())
        key_bytes = lambda key: struct.pack(f"<{params.K}q", *key)
    else:
        chunks.append(struct.pack("<IIQI", params.L, params.K, params.seed & _MASK64, index.dim))
        chunks.append(struct.pack("<Q", dataset_fingerprint(index.dataset)))
        chunks.append(index.hyperplanes.astype("<f4").tobytes())
        key_bytes = lambda key: struct.pack("<Q", key)

    chunks.append(struct.pack("<Q", len(index.tables)))
    for table in index.tables:
        chunks.append(struct.pack("<Q", len(table)))
        for key, ids in table.items():
            kb = key_bytes(key)
            chunks.append(struct.pack("<H", len(kb)))
            chunks.append(kb)
            chunks.append(struct.pack("<Q", len(ids)))
            chunks.append(np.asarray(ids, dtype="<u8").tobytes())
    return b"".join(chunks)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, fmt: str):
        try:
            values = struct.unpack_from(fmt, self.data, self.offset)
        except struct.error as exc:
            raise SnapshotError(f"truncated snapshot at offset {self.offset}") from exc
        self.offset += struct.calcsize(fmt)
        return values

    def take_array(self, count: int, dtype) -> np.ndarray:
        nbytes = count * np.dtype(dtype).itemsize
        chunk = self.data[self.offset : self.offset + nbytes]
        if len(chunk) != nbytes:
            raise SnapshotError(f"truncated snapshot at offset {self.offset}")
        self.offset += nbytes
        return np.frombuffer(chunk, dtype=dtype)


def load_index(path: str | os.PathLike, ds: Dataset) -> RealLshIndex | BinaryLshIndex:
    """Load a snapshot and bind it to its dataset.

    Raises SnapshotError on a bad magic, unknown version, truncation, or a
    dataset whose fingerprint does not match the one stored at save time.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:6] != SNAPSHOT_MAGIC:
        raise SnapshotError("not an index snapshot: bad magic")
    reader = _Reader(data)
    reader.offset = 6
    version, kind_code = reader.take("<HB")
    if version != SNAPSHOT_VERSION:
        raise SnapshotError(f"unsupported snapshot version {version}")
    if kind_code == _KIND_CODES["real"]:
        L, K, w, seed, dim = reader.take("<IIdQI")
    elif kind_code == _KIND_CODES["binary"]:
        L, K, seed, dim = reader.take("<IIQI")
    else:
        raise SnapshotError(f"unknown index kind code {kind_code}")
    if dim != ds.dim:
        raise SnapshotError(f"snapshot dimensionality {dim} does not match dataset dim {ds.dim}")

    (fingerprint,) = reader.take("<Q")
    if fingerprint != dataset_fingerprint(ds):
        raise SnapshotError(
            "dataset fingerprint mismatch: this snapshot was built over a different dataset"
        )

    if kind_code == _KIND_CODES["real"]:
        axes = reader.take_array(L * K * dim, "<f4").reshape(L, K, dim)
        offsets = reader.take_array(L * K, "<f4").reshape(L, K)
    else:
        planes = reader.take_array(L * K * dim, "<f4").reshape(L, K, dim)

    (table_count,) = reader.take("<Q")
    tables = []
    for _ in range(table_count):
        (bucket_count,) = reader.take("<Q")
        table = {}
        for _ in range(bucket_count):
            (key_len,) = reader.take("<H")
            if kind_code == _KIND_CODES["real"]:
                if key_len != 8 * K:
                    raise SnapshotError(f"real bucket key of {key_len} bytes, expected {8 * K}")
                key = tuple(int(v) for v in reader.take(f"<{K}q"))
            else:
                if key_len != 8:
                    raise SnapshotError(f"binary bucket key of {key_len} bytes, expected 8")
                key = int(reader.take("<Q")[0])
            (id_count,) = reader.take("<Q")
            ids = reader.take_array(id_count, "<u8")
            table[key] = [int(i) for i in ids]
        tables.append(table)
    if reader.offset != len(data):
        raise SnapshotError(f"{len(data) - reader.offset} trailing bytes after tables")

    if kind_code == _KIND_CODES["real"]:
        params = RealLshParams(L=L, K=K, w=w, seed=seed)
        return RealLshIndex(params, dim, axes, offsets, tables, ds)
    params = BinaryLshParams(L=L, K=K, seed=seed)
    return BinaryLshIndex(params, dim, planes, tables, ds)
