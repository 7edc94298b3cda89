"""Records, datasets, seeded random streams and dataset CSV I/O."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import MalformedCell, SchemaMismatch

Record = tuple[int, ...]


@dataclass(frozen=True)
class AttributeSchema:
    """Names of the ``d`` binary attributes of every record."""

    names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if len(self.names) < 1:
            raise ValueError("schema needs at least one attribute")
        if len(set(self.names)) != len(self.names):
            raise ValueError("attribute names must be unique")

    @classmethod
    def default(cls, d: int) -> "AttributeSchema":
        return cls(tuple(f"attr_{j + 1}" for j in range(d)))

    @property
    def d(self) -> int:
        return len(self.names)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """``n`` records over ``{0,1}^d``, stored as a read-only ``(n, d)`` uint8 array."""

    schema: AttributeSchema
    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows)
        if rows.size == 0:
            rows = rows.reshape(0, self.schema.d)
        if rows.ndim != 2 or rows.shape[1] != self.schema.d:
            raise SchemaMismatch(
                f"rows have shape {rows.shape}, schema has d={self.schema.d}"
            )
        if rows.size and not np.isin(rows, (0, 1)).all():
            raise MalformedCell("dataset cells must be 0 or 1")
        object.__setattr__(self, "rows", _frozen(rows.astype(np.uint8)))

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], d: int | None = None) -> "Dataset":
        rows = [tuple(int(b) for b in r) for r in rows]
        if d is None:
            if not rows:
                raise ValueError("d is required for an empty dataset")
            d = len(rows[0])
        if any(len(r) != d for r in rows):
            raise SchemaMismatch("ragged rows")
        arr = np.array(rows, dtype=np.uint8).reshape(len(rows), d)
        return cls(AttributeSchema.default(d), arr)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.schema.d

    def records(self) -> list[Record]:
        return [tuple(int(b) for b in r) for r in self.rows]

    def replace_row(self, i: int, record: Sequence[int]) -> "Dataset":
        rows = np.array(self.rows)
        rows[i] = record
        return Dataset(self.schema, rows)

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.schema == other.schema and np.array_equal(self.rows, other.rows)

    def __hash__(self):
        return hash((self.schema, self.rows.tobytes()))


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Pairs ``(x, y)`` with ``x`` in ``{-1,+1}^d`` and ``y`` in ``{-1,+1}``."""

    schema: AttributeSchema
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.features)
        y = np.asarray(self.labels)
        if X.size == 0:
            X = X.reshape(0, self.schema.d)
        if X.ndim != 2 or X.shape[1] != self.schema.d:
            raise SchemaMismatch(
                f"features have shape {X.shape}, schema has d={self.schema.d}"
            )
        if y.shape != (X.shape[0],):
            raise SchemaMismatch("one label per row required")
        if X.size and not np.isin(X, (-1, 1)).all():
            raise MalformedCell("features must be -1 or +1")
        if y.size and not np.isin(y, (-1, 1)).all():
            raise MalformedCell("labels must be -1 or +1")
        object.__setattr__(self, "features", _frozen(X.astype(np.int8)))
        object.__setattr__(self, "labels", _frozen(y.astype(np.int8)))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.schema.d

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, LabeledDataset):
            return NotImplemented
        return (
            self.schema == other.schema
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
        )

    def __hash__(self):
        return hash((self.schema, self.features.tobytes(), self.labels.tobytes()))


def hamming_distance(a: Sequence[int], b: Sequence[int]) -> int:
    """Number of positions where ``a`` and ``b`` differ."""
    if len(a) != len(b):
        raise SchemaMismatch(f"records of length {len(a)} and {len(b)}")
    return sum(1 for u, v in zip(a, b) if u != v)


class RngStream:
    """Deterministic random stream identified by ``(seed, path)``.

    Backed by the counter-based Philox generator keyed from a
    ``SeedSequence`` whose spawn key is the derivation path, so a stream can
    be rebuilt anywhere from its identity alone. Draws advance internal state;
    concurrent tasks must each own a derived substream.
    """

    __slots__ = ("seed", "path", "_gen")

    def __init__(self, seed: int, path: Sequence[int] = ()):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        path = tuple(int(i) for i in path)
        if any(i < 0 for i in path):
            raise ValueError("path entries must be non-negative")
        self.seed = seed
        self.path = path
        self._gen = None

    def __repr__(self):
        return f"RngStream(seed={self.seed}, path={list(self.path)})"

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            ss = np.random.SeedSequence(self.seed, spawn_key=self.path)
            self._gen = np.random.Generator(np.random.Philox(ss))
        return self._gen

    def substream(self, index: int) -> "RngStream":
        return substream(self, index)

    def uniform(self, size=None):
        """Uniform draws on the open interval (0, 1)."""
        # random() is on [0, 1); lift exact zeros to the smallest positive double
        u = np.maximum(self.generator.random(size), np.nextafter(0.0, 1.0))
        return u if size is not None else float(u)

    def normal(self, size=None):
        return self.generator.standard_normal(size)


def substream(r: RngStream, index: int) -> RngStream:
    """Stream whose path is ``r.path`` extended by ``index``."""
    if index < 0:
        raise ValueError("substream index must be non-negative")
    return RngStream(r.seed, r.path + (int(index),))


def _parse_bit(cell: str, line: int) -> int:
    cell = cell.strip()
    if cell == "0":
        return 0
    if cell == "1":
        return 1
    raise MalformedCell(f"line {line}: cell {cell!r} is not 0 or 1")


def load_dataset(path, has_labels: bool = False) -> Dataset | LabeledDataset:
    """Read a dataset CSV with header ``attr_1..attr_d[,label]``.

    Unlabeled files yield a :class:`Dataset` over ``{0,1}``. Labeled files yield
    a :class:`LabeledDataset`; every 0/1 cell (features and label) is mapped to
    -1/+1.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise MalformedCell("empty header") from None
        if not header or header == [""]:
            raise MalformedCell("empty header")
        names = header
        if has_labels:
            if header[-1] != "label":
                raise MalformedCell("labeled file must end with a 'label' column")
            names = header[:-1]
        schema = AttributeSchema(tuple(names))
        width = len(header)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != width:
                raise MalformedCell(f"line {lineno}: expected {width} cells, got {len(row)}")
            rows.append([_parse_bit(c, lineno) for c in row])
    arr = np.array(rows, dtype=np.int8).reshape(len(rows), width)
    if not has_labels:
        return Dataset(schema, arr)
    signed = 2 * arr - 1
    return LabeledDataset(schema, signed[:, :-1], signed[:, -1])


def save_dataset(data: Dataset | LabeledDataset, path) -> None:
    """Write ``data`` in the format read by :func:`load_dataset`."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if isinstance(data, LabeledDataset):
            w.writerow(list(data.schema.names) + ["label"])
            bits = (np.column_stack([data.features, data.labels]) + 1) // 2
        else:
            w.writerow(data.schema.names)
            bits = data.rows
        for row in bits:
            w.writerow([int(b) for b in row])


def pack_bits(rows: np.ndarray) -> np.ndarray:
    """Integer code of each row, first column most significant (``d <= 64``)."""
    rows = np.asarray(rows)
    d = rows.shape[1]
    if d > 64:
        raise ValueError("pack_bits supports at most 64 columns")
    codes = np.zeros(rows.shape[0], dtype=np.uint64)
    for j in range(d):
        codes = (codes << np.uint64(1)) | rows[:, j].astype(np.uint64)
    return codes


def all_records(d: int) -> np.ndarray:
    """Every record of ``{0,1}^d`` in lexicographic order, as a ``(2^d, d)`` array."""
    idx = np.arange(2**d, dtype=np.int64)
    shifts = np.arange(d - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts) & 1).astype(np.uint8)


def bits_to_str(bits: Sequence[int]) -> str:
    return "".join(str(int(b)) for b in bits)


def str_to_bits(s: str) -> Record:
    if any(c not in "01" for c in s):
        raise MalformedCell(f"{s!r} is not a bit string")
    return tuple(int(c) for c in s)


__all__ = [
    "AttributeSchema",
    "Dataset",
    "LabeledDataset",
    "Record",
    "RngStream",
    "all_records",
    "bits_to_str",
    "hamming_distance",
    "load_dataset",
    "pack_bits",
    "save_dataset",
    "str_to_bits",
    "substream",
]
