"""Per-attribute private heavy hitters, histograms and the learners built on them.

The heavy-hitter search builds a binary tree over attribute intervals. Each
node keeps the substrings (restricted to its interval) whose clipped, biased
and noised count clears a level-dependent threshold; a node only considers
concatenations of strings its two children kept. Strings of up to 64 bits
are handled as packed integer codes.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .accountant import Budget, UniformPerAttribute
from .core import Dataset, Record, RngStream, bits_to_str, pack_bits, str_to_bits
from .errors import PreconditionError
from .mechanisms import exponential_select, laplace_sample

MAX_PACKED_BITS = 64
DEFAULT_MAX_CANDIDATES = 10**7


class SampleSizeWarning(UserWarning):
    """The sample is smaller than a utility guarantee requires."""


# --- parameters -------------------------------------------------------------


def check_hh_privacy(lam: float, mu: float) -> float:
    """Budget achieved by the heavy-hitter tree: ``(2/lam)(1 + 1/(1 - exp(-mu/lam)))``."""
    if not lam > 0:
        raise PreconditionError("lambda must be positive")
    if not mu > 1:
        raise PreconditionError("the privacy analysis requires mu > 1")
    return (2.0 / lam) * (1.0 + 1.0 / -math.expm1(-mu / lam))


@dataclass(frozen=True)
class HeavyHitterParams:
    """Laplace scale ``lam``, base threshold ``tau`` and per-level bias ``mu`` (counts)."""

    lam: float
    tau: float
    mu: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if not self.mu >= 0:
            raise ValueError("mu must be non-negative")

    @classmethod
    def for_budget(cls, eps_hh: float, nu: float, n: int) -> "HeavyHitterParams":
        """Smallest ``lam`` meeting ``eps_hh`` with ``mu = lam ln(16/nu)`` and ``tau = nu n / 2``.

        With that ``mu`` the budget expression reduces to
        ``(2/lam)(1 + 1/(1 - nu/16))``, which is decreasing in ``lam``, so the
        smallest admissible ``lam`` solves it with equality.
        """
        if not eps_hh > 0:
            raise ValueError("eps_hh must be positive")
        if not 0 < nu < 16:
            raise ValueError("nu must lie in (0, 16)")
        lam = (2.0 / eps_hh) * (1.0 + 1.0 / (1.0 - nu / 16.0))
        return cls(lam=lam, tau=0.5 * nu * n, mu=lam * math.log(16.0 / nu))

    def threshold(self, level: int) -> float:
        """``tau + (level - 1) mu`` for tree levels ``1..log d``."""
        return self.tau + (level - 1) * self.mu

    def to_dict(self):
        return {"lam": self.lam, "tau": self.tau, "mu": self.mu}


def hh_params(eps_hh: float, nu: float, n: int, zero_noise: bool = False) -> HeavyHitterParams:
    """Budget-derived parameters; the noiseless limit ``lam -> 0`` also sends ``mu = lam ln(16/nu)`` to 0."""
    p = HeavyHitterParams.for_budget(eps_hh, nu, n)
    return HeavyHitterParams(p.lam, p.tau, 0.0) if zero_noise else p


def padded_width(d: int) -> int:
    """Smallest power of two that is at least ``max(d, 2)``."""
    if d < 1:
        raise ValueError("d must be positive")
    return 1 << max(1, (d - 1).bit_length())


def interval_decomposition(d: int) -> list[list[tuple[int, int]]]:
    """Tree intervals over the padded attributes as half-open ``(start, stop)`` pairs.

    Entry ``l`` lists the intervals of length ``2**l``, left to right.
    """
    P = padded_width(d)
    levels = []
    width = 1
    while width <= P:
        levels.append([(s, s + width) for s in range(0, P, width)])
        width *= 2
    return levels


def hh_utility_shortfall(params: HeavyHitterParams, d: int, nu: float, eta: float) -> list[str]:
    """Messages for each utility precondition of the tree that fails."""
    msgs = []
    log_d = math.log2(padded_width(d))
    need_tau = 8 * params.mu * log_d + 8 * params.lam * math.log(d / (eta * nu))
    if params.tau < need_tau:
        msgs.append(
            f"threshold tau={params.tau:.4g} is below 8*mu*log d + 8*lam*ln(d/(eta*nu))"
            f" = {need_tau:.4g} (needs n >= {2 * need_tau / nu:.0f})"
        )
    need_mu = params.lam * math.log(16 / nu)
    if params.mu < need_mu * (1 - 1e-12):
        msgs.append(f"bias mu={params.mu:.4g} is below lam*ln(16/nu) = {need_mu:.4g}")
    return msgs


def histogram_sample_bound(d: int, eps: float, nu: float, eta: float) -> float:
    """Explicit sample size under which the histogram is guaranteed error ``nu`` w.p. ``1 - eta``."""
    p = HeavyHitterParams.for_budget(eps / 2, nu, 1)
    log_d = math.log2(padded_width(d))
    return (16 * p.mu * log_d + 16 * p.lam * math.log(d / (eta * nu))) / nu + 100 * math.log(
        1 / (eta * nu)
    ) / (nu * eps)


# --- heavy hitters ----------------------------------------------------------


def _codes_to_records(codes: np.ndarray, width: int, keep: int) -> list[Record]:
    out = []
    for c in codes:
        c = int(c) >> (width - keep)
        out.append(tuple((c >> (keep - 1 - j)) & 1 for j in range(keep)))
    return out


def _count_candidates(codes: np.ndarray, cand: np.ndarray) -> np.ndarray:
    uniq, cnt = np.unique(codes, return_counts=True)
    f = np.zeros(cand.shape[0], dtype=float)
    if uniq.size and cand.size:
        pos = np.searchsorted(uniq, cand)
        ok = pos < uniq.size
        ok[ok] = uniq[pos[ok]] == cand[ok]
        f[ok] = cnt[pos[ok]]
    return f


@dataclass
class HeavyHitterTrace:
    """Kept strings per tree node: ``lists[l][t]`` is the sorted code array for interval ``t`` of level ``l``."""

    width: int
    lists: list[list[np.ndarray]] = field(default_factory=list)
    candidates: list[list[np.ndarray]] = field(default_factory=list)


def priv_heavy_hitter(
    D: Dataset,
    params: HeavyHitterParams,
    r: RngStream,
    eps: float | None = None,
    zero_noise: bool = False,
    return_trace: bool = False,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
):
    """List of records that survive the noisy heavy-hitter tree, lexicographically sorted.

    Attributes are padded with constant zeros up to a power of two; padded
    leaves only hold ``0`` and padding is stripped from the output. When
    ``eps`` is given the parameters must meet it. Noise is drawn from ``r`` in
    tree order (level, interval, candidate).
    """
    if not zero_noise:
        achieved = check_hh_privacy(params.lam, params.mu)
        if eps is not None and achieved > eps * (1 + 1e-12):
            raise PreconditionError(
                f"heavy-hitter parameters give budget {achieved:.6g} > target {eps:.6g}"
            )
    d = D.d
    P = padded_width(d)
    if P > MAX_PACKED_BITS:
        raise PreconditionError(f"heavy hitters support at most {MAX_PACKED_BITS} attributes")
    rows = np.zeros((D.n, P), dtype=np.uint64)
    rows[:, :d] = D.rows
    codes = [rows[:, j].copy() for j in range(P)]
    lists = [np.array([0, 1] if j < d else [0], dtype=np.uint64) for j in range(P)]
    trace = HeavyHitterTrace(P, [lists], [[]]) if return_trace else None
    level = 0
    half = 1
    while half < P:
        level += 1
        tau_l = params.threshold(level)
        shift = np.uint64(half)
        new_codes, new_lists, cands = [], [], []
        for t in range(len(codes) // 2):
            c = (codes[2 * t] << shift) | codes[2 * t + 1]
            cand = ((lists[2 * t][:, None] << shift) | lists[2 * t + 1][None, :]).ravel()
            if cand.size > max_candidates:
                raise PreconditionError(
                    f"{cand.size} candidates at level {level} exceed the cap; thresholds are too low"
                )
            f = _count_candidates(c, cand)
            noisy = np.maximum(f, tau_l - params.mu) + laplace_sample(
                params.lam, r, size=cand.size, zero_noise=zero_noise
            )
            new_codes.append(c)
            new_lists.append(cand[noisy > tau_l])
            cands.append(cand)
        codes, lists = new_codes, new_lists
        if trace is not None:
            trace.lists.append(lists)
            trace.candidates.append(cands)
        half *= 2
    out = _codes_to_records(lists[0], P, d)
    return (out, trace) if return_trace else out


# --- histograms -------------------------------------------------------------


@dataclass
class SparseHistogram:
    """Estimated counts (or probabilities) for listed records; every other record is implicitly 0."""

    d: int
    entries: dict[Record, float]

    def __getitem__(self, record: Sequence[int]) -> float:
        return self.entries.get(tuple(int(b) for b in record), 0.0)

    def __contains__(self, record) -> bool:
        return tuple(int(b) for b in record) in self.entries

    def __len__(self):
        return len(self.entries)

    @property
    def listed(self) -> list[Record]:
        return sorted(self.entries)

    def to_dict(self) -> dict:
        return {bits_to_str(k): v for k, v in sorted(self.entries.items())}

    def to_json(self) -> str:
        return json.dumps({"d": self.d, "entries": self.to_dict()}, sort_keys=True)

    @classmethod
    def from_json(cls, s: str) -> "SparseHistogram":
        obj = json.loads(s)
        return cls(obj["d"], {str_to_bits(k): float(v) for k, v in obj["entries"].items()})


def _check_rate(name, v):
    if not 0 < v <= 0.1:
        raise PreconditionError(f"{name} must lie in (0, 0.1], got {v}")


def priv_histogram(
    D: Dataset,
    eps: float,
    nu: float,
    eta: float,
    r: RngStream,
    zero_noise: bool = False,
    params: HeavyHitterParams | None = None,
) -> SparseHistogram:
    """Heavy hitters at ``eps/2``, then Laplace(``4/eps``) added to each listed record's exact count.

    Changing one row moves two counts by one each, so the count step needs
    scale ``4/eps`` to stay within its ``eps/2`` share.
    """
    _check_rate("nu", nu)
    _check_rate("eta", eta)
    if not eps > 0:
        raise ValueError("eps must be positive")
    if D.n == 0:
        raise PreconditionError("histogram of an empty dataset")
    if params is None:
        params = hh_params(eps / 2, nu, D.n, zero_noise)
    bound = histogram_sample_bound(D.d, eps, nu, eta)
    if D.n < bound and not zero_noise:
        warnings.warn(
            f"n={D.n} is below the histogram sample bound {bound:.0f} for "
            f"d={D.d}, eps={eps}, nu={nu}, eta={eta}",
            SampleSizeWarning,
            stacklevel=2,
        )
    listed = priv_heavy_hitter(D, params, r.substream(0), eps=eps / 2, zero_noise=zero_noise)
    if not listed:
        return SparseHistogram(D.d, {})
    codes = pack_bits(np.asarray(listed, dtype=np.uint8)) if D.d <= 64 else None
    f = _count_candidates(pack_bits(D.rows), codes)
    noise = laplace_sample(4.0 / eps, r.substream(1), size=len(listed), zero_noise=zero_noise)
    return SparseHistogram(D.d, {rec: float(v) for rec, v in zip(listed, f + noise)})


def standard_laplace_max_error(d: int, eps: float, r: RngStream, zero_noise: bool = False) -> float:
    """Max count error of the per-person Laplace histogram: the largest of ``2^d`` iid ``|Lap(2/eps)|``.

    Sampled exactly through the maximum's CDF ``(1 - exp(-x/b))^(2^d)`` with
    one uniform, so no ``2^d`` table is built.
    """
    if zero_noise:
        return 0.0
    b = 2.0 / eps
    u = float(r.uniform())
    return -b * math.log(-math.expm1(math.log(u) / 2.0**d))


def histogram_budget(eps: float, d: int) -> Budget:
    return Budget.partial_pure(UniformPerAttribute(eps, d))


# --- point functions --------------------------------------------------------


def _bits(X, name="X") -> np.ndarray:
    X = np.asarray(X)
    if X.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array")
    if X.size and not np.isin(X, (0, 1)).all():
        raise ValueError(f"{name} must contain only 0 and 1")
    return X.astype(np.uint8)


def _labels01(y, n) -> np.ndarray:
    y = np.asarray(y).ravel()
    if y.shape != (n,):
        raise ValueError("one label per row required")
    if y.size and not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    return y.astype(np.uint8)


@dataclass(frozen=True)
class PointHypothesis:
    """Labels ``x`` with 1 exactly when ``x == u``."""

    u: Record

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X)
        return (X == np.asarray(self.u)).all(axis=1).astype(np.uint8)

    def to_dict(self):
        return {"type": "point", "u": bits_to_str(self.u)}


def _smallest_unlisted(listed: set[int], d: int) -> int:
    c = 0
    while c in listed:
        c += 1
    if c >= 2**d:
        raise PreconditionError("every record is listed")
    return c


def _code_to_record(c: int, d: int) -> Record:
    return tuple((c >> (d - 1 - j)) & 1 for j in range(d))


def learn_point(
    X, y, eps: float, alpha: float, r: RngStream, eta: float = 0.01, zero_noise: bool = False
) -> PointHypothesis:
    """Point-function learner: histogram of ``x∘y`` with ``nu = alpha/5``.

    Outputs ``point_x`` for the best-estimated ``x`` with ``f̂(x∘1) > nu n``;
    failing that, the lexicographically smallest ``x`` whose ``f̂(x∘0) <= nu n``
    (preferring records absent from the list); failing that, ``point_{0_d}``.
    """
    X = _bits(X)
    n, d = X.shape
    y = _labels01(y, n)
    _check_rate("alpha", alpha)
    if d + 1 > MAX_PACKED_BITS:
        raise PreconditionError(f"point learner supports d <= {MAX_PACKED_BITS - 1}")
    nu = 0.2 * alpha
    Z = Dataset.from_rows(np.column_stack([X, y]), d=d + 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SampleSizeWarning)
        hist = priv_histogram(Z, eps, nu, eta, r, zero_noise=zero_noise)
    ones = [(v, rec) for rec, v in hist.entries.items() if rec[-1] == 1 and v > nu * n]
    if ones:
        best = max(v for v, _ in ones)
        return PointHypothesis(min(rec for v, rec in ones if v == best)[:-1])
    zero_listed = {}
    for rec, v in hist.entries.items():
        if rec[-1] == 0:
            zero_listed[int(pack_bits(np.asarray([rec[:-1]]))[0]) if d else 0] = v
    if len(zero_listed) < 2**d:
        return PointHypothesis(_code_to_record(_smallest_unlisted(set(zero_listed), d), d))
    ok = sorted(c for c, v in zero_listed.items() if v <= nu * n)
    if ok:
        return PointHypothesis(_code_to_record(ok[0], d))
    return PointHypothesis(tuple([0] * d))


# --- thresholds -------------------------------------------------------------


def lex_geq(X, z) -> np.ndarray:
    """Row-wise lexicographic ``X[i] >= z`` over 0/1 vectors."""
    X = np.asarray(X)
    z = np.asarray(z)
    if X.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    diff = X != z
    has = diff.any(axis=1)
    first = np.argmax(diff, axis=1)
    return np.where(has, X[np.arange(X.shape[0]), first] > z[first], True)


@dataclass(frozen=True)
class ThresholdHypothesis:
    """Labels ``x`` with 1 exactly when ``x >= z`` lexicographically."""

    z: Record

    def predict(self, X) -> np.ndarray:
        return lex_geq(X, self.z).astype(np.uint8)

    def to_dict(self):
        return {"type": "threshold", "z": bits_to_str(self.z)}


def polarization(X, y, prefix: Sequence[int]) -> float:
    """``min(#(p*, 0), #(p*, 1)) / n`` for the samples whose features start with ``prefix``."""
    X = _bits(X)
    n = X.shape[0]
    y = _labels01(y, n)
    if n == 0:
        return 0.0
    k = len(prefix)
    m = (X[:, :k] == np.asarray(prefix, dtype=np.uint8)).all(axis=1) if k else np.ones(n, bool)
    ones = int(y[m].sum())
    return min(int(m.sum()) - ones, ones) / n


def max_polarization(X, y, length: int) -> float:
    """Largest polarization over all prefixes of the given length."""
    X = _bits(X)
    n = X.shape[0]
    y = _labels01(y, n)
    if n == 0:
        return 0.0
    if length == 0:
        ones = int(y.sum())
        return min(ones, n - ones) / n
    keys = np.column_stack([X[:, :length], y])
    uniq, cnt = np.unique(keys, axis=0, return_counts=True)
    per = {}
    for row, c in zip(uniq, cnt):
        per.setdefault(row[:-1].tobytes(), [0, 0])[int(row[-1])] = int(c)
    return max(min(v) for v in per.values()) / n


@dataclass(frozen=True)
class PrefixResult:
    prefix: Record
    found: bool
    length: int


def search_steps(d: int) -> int:
    """Noisy comparisons made by binary search over prefix lengths ``0..d``."""
    return max(1, math.ceil(math.log2(d + 1)))


def find_polarizing_prefix(
    X, y, eps: float, gamma: float, r: RngStream, eta: float = 0.01, zero_noise: bool = False
) -> PrefixResult:
    """Longest prefix whose samples carry both labels at rate about ``gamma``.

    Half the budget drives a binary search for the largest length whose noisy
    maximum polarization clears ``1.5 gamma``; the other half runs the
    histogram on ``x[:length]∘y`` with ``nu = gamma/10``. Returns the
    lexicographically smallest prefix ``p`` with both ``f̂(p0)`` and
    ``f̂(p1)`` at least ``1.5 gamma n``, or the empty prefix with
    ``found=False``.
    """
    X = _bits(X)
    n, d = X.shape
    y = _labels01(y, n)
    if n == 0:
        raise PreconditionError("prefix search needs samples")
    steps = search_steps(d)
    scale = 2.0 * steps / (eps * n)
    sr = r.substream(0)
    lo, hi = 0, d
    while lo < hi:
        mid = (lo + hi + 1) // 2
        noisy = max_polarization(X, y, mid) + laplace_sample(scale, sr, zero_noise=zero_noise)
        if noisy >= 1.5 * gamma:
            lo = mid
        else:
            hi = mid - 1
    length = lo
    Z = Dataset.from_rows(np.column_stack([X[:, :length], y]), d=length + 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SampleSizeWarning)
        hist = priv_histogram(Z, eps / 2, min(0.1 * gamma, 0.1), eta, r.substream(1), zero_noise)
    cut = 1.5 * gamma * n
    by_prefix: dict[Record, list[float]] = {}
    for rec, v in hist.entries.items():
        by_prefix.setdefault(rec[:-1], [0.0, 0.0])[rec[-1]] = v
    good = sorted(p for p, (f0, f1) in by_prefix.items() if f0 >= cut and f1 >= cut)
    if good:
        return PrefixResult(good[0], True, length)
    return PrefixResult((), False, length)


@dataclass(frozen=True)
class ThresholdFit:
    hypothesis: ThresholdHypothesis
    branch: str
    prefix: PrefixResult | None = None


def threshold_candidates(prefix: Sequence[int], d: int) -> list[Record]:
    """``p0..0``, ``p10..0`` and ``p1..1``, deduplicated in that order."""
    p = tuple(prefix)
    k = len(p)
    raw = [p + (0,) * (d - k)]
    if k < d:
        raw.append(p + (1,) + (0,) * (d - k - 1))
    raw.append(p + (1,) * (d - k))
    out = []
    for z in raw:
        if z not in out:
            out.append(z)
    return out


def learn_threshold(
    X,
    y,
    eps: float,
    alpha: float,
    r: RngStream,
    branch_swapped: bool = True,
    eta: float = 0.01,
    zero_noise: bool = False,
) -> ThresholdFit:
    """Threshold learner over lexicographically ordered ``{0,1}^d``.

    A third of the budget estimates the positive rate ``a``. Extreme rates
    short-circuit to a constant-like threshold. With ``branch_swapped`` (the
    default) a low rate yields ``Thre_{1..1}`` (label 1 only at the top record)
    and a high rate yields ``Thre_{0..0}`` (label everything 1); without it the
    two outputs trade places. Otherwise a third finds a polarizing prefix at
    ``gamma = alpha/10`` and the last third picks among the three thresholds
    next to that prefix with the exponential mechanism on empirical error.
    """
    X = _bits(X)
    n, d = X.shape
    y = _labels01(y, n)
    _check_rate("alpha", alpha)
    if n == 0:
        raise PreconditionError("threshold learner needs samples")
    a = float(y.mean()) + laplace_sample(3.0 / (eps * n), r.substream(0), zero_noise=zero_noise)
    zeros, ones = (0,) * d, (1,) * d
    low, high = (ones, zeros) if branch_swapped else (zeros, ones)
    if a <= 0.5 * alpha:
        return ThresholdFit(ThresholdHypothesis(low), "low_rate")
    if a >= 1 - 0.5 * alpha:
        return ThresholdFit(ThresholdHypothesis(high), "high_rate")
    pre = find_polarizing_prefix(X, y, eps / 3, 0.1 * alpha, r.substream(1), eta, zero_noise)
    cands = threshold_candidates(pre.prefix, d)
    errors = np.array([np.count_nonzero(lex_geq(X, z).astype(np.uint8) != y) for z in cands])
    # error counts move by at most 1 when one attribute of one sample changes
    k = exponential_select(-errors.astype(float), (eps / 3) / 2, r.substream(2), zero_noise)
    return ThresholdFit(ThresholdHypothesis(cands[k]), "prefix", pre)


# --- distribution estimation ------------------------------------------------


def distribution_nu(d: int, eps: float, n: int, C: float = 4.0) -> float:
    """``C ln d / (eps n) / ln(eps n)``."""
    return C * math.log(d) / (eps * n) / math.log(eps * n)


def estimate_distribution(
    D: Dataset,
    eps: float,
    r: RngStream,
    C: float = 4.0,
    eta: float = 0.01,
    zero_noise: bool = False,
) -> SparseHistogram:
    """Sparse estimate of the sampling distribution.

    Runs the histogram at ``eps/2`` with ``nu = C ln d / (eps n ln(eps n))``,
    keeps records whose estimate is at least ``2 nu n``, and reports each kept
    record's exact count plus fresh Laplace(``4/eps``), divided by ``n``. The
    two stages split ``eps`` evenly.
    Entries may be negative and need not sum to 1.
    """
    n, d = D.n, D.d
    if d < 2:
        raise PreconditionError("distribution estimation needs d >= 2")
    if not eps * n > math.e:
        raise PreconditionError("distribution estimation needs eps * n > e")
    nu = distribution_nu(d, eps, n, C)
    if nu > 0.1:
        raise PreconditionError(f"nu={nu:.3g} exceeds 0.1; the sample is too small")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SampleSizeWarning)
        hist = priv_histogram(D, eps / 2, nu, eta, r.substream(0), zero_noise=zero_noise)
    kept = [rec for rec, v in sorted(hist.entries.items()) if v >= 2 * nu * n]
    if not kept:
        return SparseHistogram(d, {})
    f = _count_candidates(pack_bits(D.rows), pack_bits(np.asarray(kept, dtype=np.uint8)))
    noise = laplace_sample(4.0 / eps, r.substream(1), size=len(kept), zero_noise=zero_noise)
    return SparseHistogram(d, {rec: float(v) / n for rec, v in zip(kept, f + noise)})


__all__ = [
    "HeavyHitterParams",
    "HeavyHitterTrace",
    "PointHypothesis",
    "PrefixResult",
    "SampleSizeWarning",
    "SparseHistogram",
    "ThresholdFit",
    "ThresholdHypothesis",
    "check_hh_privacy",
    "distribution_nu",
    "estimate_distribution",
    "find_polarizing_prefix",
    "histogram_budget",
    "histogram_sample_bound",
    "hh_params",
    "hh_utility_shortfall",
    "interval_decomposition",
    "learn_point",
    "learn_threshold",
    "lex_geq",
    "max_polarization",
    "padded_width",
    "polarization",
    "priv_heavy_hitter",
    "priv_histogram",
    "search_steps",
    "standard_laplace_max_error",
    "threshold_candidates",
]
