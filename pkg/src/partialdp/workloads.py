"""Statistical query workloads over binary records.

Attribute indices are 0-based throughout. A query depends only on the
attributes in ``attrs``; table queries look up the selected bits read as a
binary number with the first listed attribute most significant.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core import AttributeSchema, Dataset, all_records
from .errors import DomainTooLarge, PreconditionError, SchemaMismatch

QUERY_KINDS = ("parity", "conjunction", "table")
BRUTE_FORCE_MAX_D = 16
ENUMERATION_MAX_D = 20


@dataclass(frozen=True)
class Query:
    attrs: tuple[int, ...]
    kind: str
    table: tuple[float, ...] | None = None

    def __post_init__(self):
        attrs = tuple(sorted(int(a) for a in self.attrs))
        if not attrs:
            raise ValueError("a query needs at least one attribute")
        if len(set(attrs)) != len(attrs) or attrs[0] < 0:
            raise ValueError("attributes must be distinct non-negative indices")
        object.__setattr__(self, "attrs", attrs)
        if self.kind not in QUERY_KINDS:
            raise ValueError(f"unknown query kind {self.kind!r}")
        if self.kind == "table":
            if self.table is None or len(self.table) != 2 ** len(attrs):
                raise ValueError("table length must be 2**len(attrs)")
            t = tuple(float(v) for v in self.table)
            if any(not 0.0 <= v <= 1.0 for v in t):
                raise ValueError("table values must lie in [0, 1]")
            object.__setattr__(self, "table", t)
        elif self.table is not None:
            raise ValueError("only table queries carry a table")

    def evaluate(self, rows: np.ndarray) -> np.ndarray:
        """Query value on each row of a ``(n, d)`` 0/1 array."""
        sel = np.asarray(rows)[:, list(self.attrs)].astype(np.int64)
        if self.kind == "parity":
            return (sel.sum(axis=1) & 1).astype(float)
        if self.kind == "conjunction":
            return sel.all(axis=1).astype(float)
        idx = np.zeros(sel.shape[0], dtype=np.int64)
        for j in range(sel.shape[1]):
            idx = (idx << 1) | sel[:, j]
        return np.asarray(self.table)[idx]

    def to_dict(self) -> dict:
        out = {"attrs": list(self.attrs), "kind": self.kind}
        if self.table is not None:
            out["table"] = list(self.table)
        return out


@dataclass(frozen=True)
class Workload:
    """``m`` queries over ``d`` attributes.

    ``kway`` records ``(k, kind)`` when the workload is the full family of
    k-way parities or conjunctions, enabling closed-form diameters.
    """

    d: int
    queries: tuple[Query, ...]
    kway: tuple[int, str] | None = None

    def __post_init__(self):
        object.__setattr__(self, "queries", tuple(self.queries))
        if self.d < 1:
            raise ValueError("d must be positive")
        if not self.queries:
            raise ValueError("a workload needs at least one query")
        for q in self.queries:
            if q.attrs[-1] >= self.d:
                raise SchemaMismatch(f"query uses attribute {q.attrs[-1]} but d={self.d}")

    @property
    def m(self) -> int:
        return len(self.queries)

    @property
    def schema(self) -> AttributeSchema:
        return AttributeSchema.default(self.d)

    def answer_matrix(self, rows: np.ndarray) -> np.ndarray:
        """``(len(rows), m)`` matrix of query values."""
        return np.column_stack([q.evaluate(rows) for q in self.queries])

    def vertex_answers(self) -> np.ndarray:
        """Query values on every record of the domain, in lexicographic record order."""
        if self.d > ENUMERATION_MAX_D:
            raise DomainTooLarge(f"cannot enumerate 2^{self.d} records")
        return _vertex_answers(self)

    def to_dict(self) -> dict:
        if self.kway is not None:
            return {"d": self.d, "k": self.kway[0], "kind": self.kway[1]}
        return {"d": self.d, "queries": [q.to_dict() for q in self.queries]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, obj: dict) -> "Workload":
        if "k" in obj:
            return kway_marginal_workload(int(obj["d"]), int(obj["k"]), obj["kind"])
        qs = [Query(tuple(q["attrs"]), q["kind"], q.get("table")) for q in obj["queries"]]
        return cls(int(obj["d"]), tuple(qs))

    @classmethod
    def from_json(cls, s: str) -> "Workload":
        return cls.from_dict(json.loads(s))


@lru_cache(maxsize=16)
def _vertex_answers(W: Workload) -> np.ndarray:
    a = W.answer_matrix(all_records(W.d))
    a.flags.writeable = False
    return a


def eval_query(q: Query, x: Sequence[int]) -> float:
    return float(q.evaluate(np.asarray([x]))[0])


def eval_workload(W: Workload, D: Dataset) -> np.ndarray:
    """Mean of each query over the rows of ``D``."""
    if D.n == 0:
        raise PreconditionError("workload evaluation needs a non-empty dataset")
    if D.d != W.d:
        raise SchemaMismatch(f"dataset has d={D.d}, workload has d={W.d}")
    return W.answer_matrix(D.rows).mean(axis=0)


def kway_marginal_workload(d: int, k: int, kind: str = "conjunction") -> Workload:
    """One query per k-subset of the ``d`` attributes, subsets in lexicographic order."""
    if kind not in ("parity", "conjunction"):
        raise ValueError("kind must be 'parity' or 'conjunction'")
    if not 1 <= k <= d:
        raise PreconditionError(f"k={k} outside [1, {d}]")
    qs = tuple(Query(c, kind) for c in itertools.combinations(range(d), k))
    return Workload(d, qs, kway=(k, kind))


def _brute_diameters(W: Workload) -> tuple[float, float]:
    if W.d > BRUTE_FORCE_MAX_D:
        raise DomainTooLarge(f"brute-force diameters need d <= {BRUTE_FORCE_MAX_D}, got {W.d}")
    V = W.vertex_answers()
    # pairwise squared distances via the Gram matrix over distinct answer vectors
    U = np.unique(V, axis=0)
    sq = (U * U).sum(axis=1)
    best, bi, bj = -1.0, 0, 0
    for s in range(0, U.shape[0], 2048):
        G = sq[s:s + 2048, None] + sq[None, :] - 2.0 * (U[s:s + 2048] @ U.T)
        i, j = np.unravel_index(int(np.argmax(G)), G.shape)
        if G[i, j] > best:
            best, bi, bj = float(G[i, j]), s + i, j
    delta = float(np.linalg.norm(U[bi] - U[bj]))
    idx = np.arange(2**W.d)
    delta0 = 0.0
    for b in range(W.d):
        nb = idx ^ (1 << (W.d - 1 - b))
        diff = V - V[nb]
        delta0 = max(delta0, float(np.sqrt((diff * diff).sum(axis=1).max())))
    return delta, delta0


def diameters(W: Workload, method: str = "auto") -> tuple[float, float]:
    """``(Delta, Delta0)``: largest l2 change of the answer vector under any record change / one attribute change.

    For full k-way marginal workloads the closed form ``Delta = sqrt(m)``,
    ``Delta0 = sqrt(C(d-1, k-1))`` is used. That value is exact for
    conjunctions and for parities of odd ``k``; for parities of even ``k`` it
    is an upper bound on ``Delta``. ``method='brute'`` forces exhaustive
    enumeration (``d <= 16``).
    """
    if method not in ("auto", "closed", "brute"):
        raise ValueError("method must be 'auto', 'closed' or 'brute'")
    if method != "brute" and W.kway is not None:
        k, _ = W.kway
        return math.sqrt(W.m), math.sqrt(math.comb(W.d - 1, k - 1))
    if method == "closed":
        raise PreconditionError("closed form only exists for k-way marginal workloads")
    return _brute_diameters(W)


__all__ = [
    "Query",
    "Workload",
    "diameters",
    "eval_query",
    "eval_workload",
    "kway_marginal_workload",
]
