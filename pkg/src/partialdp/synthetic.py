"""Seeded data generators with known ground truth, used by the harness and tests."""

from __future__ import annotations

import numpy as np

from .core import AttributeSchema, Dataset, LabeledDataset, RngStream
from .halfspace import Halfspace, cell_examples


def _rng(r) -> np.random.Generator:
    return r.generator if isinstance(r, RngStream) else np.random.default_rng(r)


def bernoulli_product(d: int, n: int, p: float, r) -> Dataset:
    """Rows with independent Bernoulli(``p``) attributes."""
    return Dataset.from_rows((_rng(r).random((n, d)) < p).astype(np.uint8), d=d)


def distinct_records(d: int, k: int, r) -> np.ndarray:
    """``k`` distinct uniformly random records of ``{0,1}^d``."""
    g = _rng(r)
    seen, out = set(), []
    while len(out) < k:
        rec = tuple(g.integers(0, 2, d).tolist())
        if rec not in seen:
            seen.add(rec)
            out.append(rec)
    return np.asarray(out, dtype=np.uint8)


def planted_dataset(d: int, n: int, counts, r) -> tuple[Dataset, np.ndarray]:
    """``counts[i]`` copies of planted record ``i``; the remaining rows are uniform random.

    Returns the shuffled dataset and the planted records.
    """
    g = _rng(r)
    counts = [int(c) for c in counts]
    if sum(counts) > n:
        raise ValueError("planted counts exceed n")
    planted = distinct_records(d, len(counts), g)
    parts = [np.repeat(planted[i:i + 1], c, axis=0) for i, c in enumerate(counts)]
    parts.append(g.integers(0, 2, (n - sum(counts), d)).astype(np.uint8))
    rows = np.concatenate(parts)
    g.shuffle(rows)
    return Dataset.from_rows(rows, d=d), planted


def support_dataset(d: int, n: int, k: int, r) -> tuple[Dataset, np.ndarray]:
    """``n`` draws from the uniform distribution over ``k`` random records."""
    g = _rng(r)
    support = distinct_records(d, k, g)
    return Dataset.from_rows(support[g.integers(0, k, n)], d=d), support


# --- learning problems -----------------------------------------------------


def point_problem(d: int, n: int, u, p: float, r):
    """``x = u`` with probability ``p``, otherwise uniform; label ``[x == u]``."""
    g = _rng(r)
    u = np.asarray(u, dtype=np.uint8)
    X = g.integers(0, 2, (n, d)).astype(np.uint8)
    X[g.random(n) < p] = u
    y = (X == u).all(axis=1).astype(np.uint8)
    return X, y


def point_population_error(u, p: float, v) -> float:
    """Error of ``point_v`` when the target is ``point_u`` under :func:`point_problem`."""
    u, v = tuple(int(b) for b in u), tuple(int(b) for b in v)
    if u == v:
        return 0.0
    d = len(u)
    pu = p + (1 - p) * 2.0**-d
    return pu + (1 - p) * 2.0**-d


def threshold_problem(d: int, n: int, z, r):
    """Uniform ``x`` labelled ``[x >= z]`` lexicographically."""
    g = _rng(r)
    X = g.integers(0, 2, (n, d)).astype(np.uint8)
    zc = int("".join(str(int(b)) for b in z), 2)
    codes = X @ (1 << np.arange(d - 1, -1, -1, dtype=np.int64))
    return X, (codes >= zc).astype(np.uint8)


def threshold_population_error(z_true, z, d: int) -> float:
    """Uniform-measure disagreement of two thresholds: ``|code(z) - code(z_true)| / 2^d``."""
    a = int("".join(str(int(b)) for b in z_true), 2)
    b = int("".join(str(int(c)) for c in z), 2)
    return abs(a - b) / 2.0**d


def halfspace_distribution(w, flip: float = 0.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Uniform ``x`` over ``{-1,+1}^d`` labelled by ``h_w`` and flipped with probability ``flip``.

    Returns the cell features, labels and probabilities in cell order.
    """
    d = len(w)
    X, y = cell_examples(d)
    clean = Halfspace(tuple(w)).predict(X)
    probs = np.where(clean == y, 1 - flip, flip) / 2.0**d
    return X, y, probs


def sample_cells(X, y, probs, n: int, r) -> LabeledDataset:
    g = _rng(r)
    idx = g.choice(len(probs), size=n, p=np.asarray(probs) / np.sum(probs))
    return LabeledDataset(AttributeSchema.default(X.shape[1]), X[idx], y[idx])


__all__ = [
    "bernoulli_product",
    "distinct_records",
    "halfspace_distribution",
    "planted_dataset",
    "point_population_error",
    "point_problem",
    "sample_cells",
    "support_dataset",
    "threshold_population_error",
    "threshold_problem",
]
