"""Brute-force references for tests.

Nothing here calls into the code it checks: queries, distances, balls and
tuples are all re-derived with plain loops over the (tiny) domain.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import Dataset, LabeledDataset, RngStream
from .errors import PreconditionError
from .histogram import SparseHistogram

MIN_EVENT_COUNT = 100
SLACK_STDERR = 3.0


def exact_frequencies(D: Dataset) -> SparseHistogram:
    counts = Counter(tuple(int(b) for b in row) for row in D.rows)
    return SparseHistogram(D.d, {k: float(v) for k, v in counts.items()})


# --- likelihood ratios ------------------------------------------------------


@dataclass(frozen=True)
class RatioEstimate:
    event: str
    p_hat: float
    q_hat: float
    stderr: float
    trials: int

    @property
    def log_ratio(self) -> float:
        if self.p_hat == 0 or self.q_hat == 0:
            return math.inf if self.p_hat != self.q_hat else 0.0
        return math.log(self.p_hat / self.q_hat)

    def frequent(self, min_count: int = MIN_EVENT_COUNT) -> bool:
        return min(self.p_hat, self.q_hat) * self.trials >= min_count


def _rows_of(data):
    if isinstance(data, LabeledDataset):
        return np.column_stack([data.features, data.labels])
    if isinstance(data, Dataset):
        return np.asarray(data.rows)
    return np.asarray(data)


def neighbor_distance(D, D2) -> int:
    """Attribute distance between datasets that differ in at most one row."""
    a, b = _rows_of(D), _rows_of(D2)
    if a.shape != b.shape:
        raise PreconditionError("datasets must have the same shape")
    diff = (a != b).sum(axis=1)
    if np.count_nonzero(diff) > 1:
        raise PreconditionError("datasets differ in more than one row")
    return int(diff.max()) if diff.size else 0


def _event_key(out) -> str:
    if isinstance(out, np.ndarray):
        out = out.tolist()
    return repr(out)


def mc_privacy_ratio(
    mechanism: Callable, D, D2, trials: int, r: RngStream
) -> list[RatioEstimate]:
    """Output frequencies of ``mechanism(data, stream)`` on two neighbouring datasets.

    Each dataset gets its own substream, consumed sequentially across trials.
    ``stderr`` is the delta-method standard error of ``log(p_hat / q_hat)``.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    neighbor_distance(D, D2)
    tallies = []
    for i, data in enumerate((D, D2)):
        s = r.substream(i)
        tallies.append(Counter(_event_key(mechanism(data, s)) for _ in range(trials)))
    out = []
    for ev in sorted(set(tallies[0]) | set(tallies[1])):
        p = tallies[0][ev] / trials
        q = tallies[1][ev] / trials
        if p > 0 and q > 0:
            se = math.sqrt((1 - p) / (p * trials) + (1 - q) / (q * trials))
        else:
            se = math.inf
        out.append(RatioEstimate(ev, p, q, se, trials))
    return out


def ratio_violations(
    estimates: Sequence[RatioEstimate], bound: float, slack: float = SLACK_STDERR,
    min_count: int = MIN_EVENT_COUNT,
) -> list[RatioEstimate]:
    """Frequent events whose absolute log-ratio exceeds ``bound + slack * stderr``."""
    return [
        e for e in estimates
        if e.frequent(min_count) and abs(e.log_ratio) > bound + slack * e.stderr
    ]


# --- halfspaces -------------------------------------------------------------


def _sign(v: float) -> int:
    return 1 if v >= 0 else -1


def brute_dec(x: Sequence[int], y: int, w: Sequence[float]) -> int:
    """Smallest number of flipped coordinates giving a point labelled ``!= y``; ``d + 1`` if none."""
    d = len(x)
    best = d + 1
    for mask in range(1 << d):
        k = bin(mask).count("1")
        if k >= best:
            continue
        z = [-x[j] if mask >> j & 1 else x[j] for j in range(d)]
        if _sign(sum(wj * zj for wj, zj in zip(w, z))) != y:
            best = k
    return best


def hamming_ball(x: Sequence[int], radius: int) -> list[tuple[int, ...]]:
    d = len(x)
    out = []
    for k in range(min(radius, d) + 1):
        for idx in itertools.combinations(range(d), k):
            z = list(x)
            for j in idx:
                z[j] = -z[j]
            out.append(tuple(z))
    return out


def brute_robust_error(w, X, y, gamma: float, weights=None) -> float:
    """Share of examples with a misclassified point in their radius-``floor(gamma d)`` ball."""
    X = np.asarray(X)
    n, d = X.shape
    radius = math.floor(gamma * d + 1e-12)
    bad = []
    for x, lab in zip(X.tolist(), np.asarray(y).tolist()):
        bad.append(any(_sign(sum(a * b for a, b in zip(w, z))) != lab for z in hamming_ball(x, radius)))
    bad = np.asarray(bad, dtype=float)
    if weights is None:
        return float(bad.mean()) if n else 0.0
    return float(bad @ np.asarray(weights, dtype=float))


def _ball_matrix(X, gamma: float) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X)
    d = X.shape[1]
    pts = np.array(list(itertools.product((-1, 1), repeat=d)), dtype=np.int32)
    radius = math.floor(gamma * d + 1e-12)
    return pts, ((X[:, None, :] != pts[None, :, :]).sum(axis=2) <= radius).astype(np.int32)


def brute_cell_robust_indicators(W_int: np.ndarray, X, y, gamma: float) -> np.ndarray:
    """``out[k, i]`` is 1 when weight row ``k`` misclassifies some point in example ``i``'s ball."""
    pts, ball = _ball_matrix(X, gamma)
    ip = np.asarray(W_int).astype(np.int32) @ pts.T
    hit_pos = ((ip < 0).astype(np.int32) @ ball.T) > 0
    hit_neg = ((ip >= 0).astype(np.int32) @ ball.T) > 0
    return np.where(np.asarray(y)[None, :] > 0, hit_pos, hit_neg)


def brute_net_robust_errors(W_int: np.ndarray, X, y, probs, gamma: float, chunk: int = 1 << 16) -> np.ndarray:
    """Robust error of every weight row under an explicit distribution over ``(X, y)``.

    Uses explicit ball membership over all ``2^d`` points instead of
    decision-boundary distances.
    """
    probs = np.asarray(probs, dtype=float)
    out = np.empty(W_int.shape[0])
    for s in range(0, W_int.shape[0], chunk):
        out[s:s + chunk] = brute_cell_robust_indicators(W_int[s:s + chunk], X, y, gamma) @ probs
    return out


# --- workloads --------------------------------------------------------------


def _query_value(q, rec: Sequence[int]) -> float:
    bits = [rec[a] for a in q.attrs]
    if q.kind == "parity":
        return float(sum(bits) % 2)
    if q.kind == "conjunction":
        return float(all(bits))
    idx = 0
    for b in bits:
        idx = idx * 2 + b
    return float(q.table[idx])


def brute_diameters(W) -> tuple[float, float]:
    """Exhaustive ``(Delta, Delta0)`` by pairwise enumeration of records (``d <= 10``)."""
    if W.d > 10:
        raise PreconditionError("brute_diameters is for d <= 10")
    recs = list(itertools.product((0, 1), repeat=W.d))
    vals = [[_query_value(q, x) for q in W.queries] for x in recs]
    best = best0 = 0.0
    for i in range(len(recs)):
        for j in range(i + 1, len(recs)):
            dist = math.sqrt(sum((a - b) ** 2 for a, b in zip(vals[i], vals[j])))
            best = max(best, dist)
            if sum(a != b for a, b in zip(recs[i], recs[j])) == 1:
                best0 = max(best0, dist)
    return best, best0


def brute_disjoint_tuple_max_error(W, ell: int, probs: Sequence[float], D: Dataset) -> float:
    """Largest mean absolute error over attribute-disjoint ``ell``-subsets, by ``itertools.combinations``."""
    recs = list(itertools.product((0, 1), repeat=W.d))
    rows = [tuple(int(b) for b in r) for r in D.rows]
    best = None
    for combo in itertools.combinations(range(W.m), ell):
        attrs = [set(W.queries[i].attrs) for i in combo]
        if any(attrs[a] & attrs[b] for a in range(ell) for b in range(a + 1, ell)):
            continue
        errs = []
        for i in combo:
            q = W.queries[i]
            synth = sum(p * _query_value(q, x) for p, x in zip(probs, recs))
            true = sum(_query_value(q, x) for x in rows) / len(rows)
            errs.append(abs(synth - true))
        e = sum(errs) / ell
        best = e if best is None else max(best, e)
    if best is None:
        raise PreconditionError("no attribute-disjoint tuple")
    return best


def nonprivate_mwem(D: Dataset, W, T: int, ell: int) -> list[list[float]]:
    """Noiseless multiplicative weights over disjoint tuples; returns the iterates ``A_1 .. A_T``.

    Each round takes the tuple with the largest summed error (first in
    lexicographic order on ties) and multiplies weights by
    ``exp(0.5 * sum q(x) (q(D) - q(A)))``.
    """
    recs = list(itertools.product((0, 1), repeat=W.d))
    rows = [tuple(int(b) for b in r) for r in D.rows]
    vals = [[_query_value(q, x) for q in W.queries] for x in recs]
    truth = [sum(_query_value(q, x) for x in rows) / len(rows) for q in W.queries]
    combos = [
        c for c in itertools.combinations(range(W.m), ell)
        if all(not set(W.queries[a].attrs) & set(W.queries[b].attrs)
               for a, b in itertools.combinations(c, 2))
    ]
    A = [1.0 / len(recs)] * len(recs)
    out = []
    for _ in range(T):
        out.append(list(A))
        qa = [sum(A[x] * vals[x][i] for x in range(len(recs))) for i in range(W.m)]
        scores = [sum(abs(qa[i] - truth[i]) for i in c) for c in combos]
        best = combos[max(range(len(combos)), key=lambda k: (scores[k], -k))]
        logs = [math.log(A[x]) + 0.5 * sum(vals[x][i] * (truth[i] - qa[i]) for i in best)
                for x in range(len(recs))]
        top = max(logs)
        z = sum(math.exp(v - top) for v in logs)
        A = [math.exp(v - top) / z for v in logs]
    return out


__all__ = [
    "MIN_EVENT_COUNT",
    "RatioEstimate",
    "SLACK_STDERR",
    "brute_cell_robust_indicators",
    "brute_dec",
    "brute_diameters",
    "brute_disjoint_tuple_max_error",
    "brute_net_robust_errors",
    "brute_robust_error",
    "exact_frequencies",
    "hamming_ball",
    "mc_privacy_ratio",
    "neighbor_distance",
    "nonprivate_mwem",
    "ratio_violations",
]
