"""Privacy metrics, budgets, composition and conversion to standard guarantees.

A privacy metric ``eps(x, x')`` assigns an indistinguishability parameter to
each pair of records. Budgets come in two families: pure (``pure`` and
``partial_pure``) and concentrated (``zcdp`` and ``partial_cdp``). Unbounded
distances are ``math.inf``.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .core import Record, bits_to_str, hamming_distance, str_to_bits
from .errors import IncompatibleBudgets, PreconditionError, SchemaMismatch

INF = math.inf


class PrivacyMetric:
    """Symmetric, non-negative function on pairs of records."""

    def __call__(self, a: Sequence[int], b: Sequence[int]) -> float:
        return metric_eval(self, a, b)

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class UniformPerAttribute(PrivacyMetric):
    """``eps0`` times the Hamming distance. ``d`` is optional until a supremum is needed."""

    eps0: float
    d: int | None = None

    def __post_init__(self):
        if not self.eps0 >= 0:
            raise ValueError("eps0 must be non-negative")
        if self.d is not None and self.d < 1:
            raise ValueError("d must be positive")

    def _eval(self, a, b):
        if self.d is not None and len(a) != self.d:
            raise SchemaMismatch(f"metric defined on d={self.d}, record has {len(a)}")
        h = hamming_distance(a, b)
        return self.eps0 * h if h else 0.0

    def to_dict(self):
        return {"type": "uniform_per_attribute", "eps0": self.eps0, "d": self.d}


@dataclass(frozen=True)
class WeightedPerAttribute(PrivacyMetric):
    """Sum of ``weights[j]`` over the attributes where two records differ."""

    weights: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(v) for v in self.weights)
        if not w:
            raise ValueError("weights must be non-empty")
        if any(not v >= 0 for v in w):
            raise ValueError("weights must be non-negative")
        object.__setattr__(self, "weights", w)

    @property
    def d(self) -> int:
        return len(self.weights)

    def _eval(self, a, b):
        if len(a) != self.d or len(b) != self.d:
            raise SchemaMismatch(f"metric defined on d={self.d}")
        return float(sum(w for w, u, v in zip(self.weights, a, b) if u != v))

    def to_dict(self):
        return {"type": "weighted_per_attribute", "weights": list(self.weights)}


@dataclass(frozen=True)
class ConstantMetric(PrivacyMetric):
    """``eps`` for every pair of distinct records: a standard guarantee viewed as a metric."""

    eps: float

    def __post_init__(self):
        if not self.eps >= 0:
            raise ValueError("eps must be non-negative")

    def _eval(self, a, b):
        if len(a) != len(b):
            raise SchemaMismatch("records differ in length")
        return 0.0 if tuple(a) == tuple(b) else self.eps

    def to_dict(self):
        return {"type": "constant", "eps": self.eps}


class RecordGraph(PrivacyMetric):
    """Undirected graph on records; the metric is the weighted shortest-path distance."""

    def __init__(self, vertices: Iterable[Sequence[int]], edges: Iterable[tuple]):
        verts = frozenset(tuple(int(b) for b in v) for v in vertices)
        es = []
        adj: dict[Record, list[tuple[Record, float]]] = {v: [] for v in verts}
        for a, b, w in edges:
            a = tuple(int(x) for x in a)
            b = tuple(int(x) for x in b)
            w = float(w)
            if not w >= 0:
                raise ValueError("edge weights must be non-negative")
            for v in (a, b):
                if v not in adj:
                    raise KeyError(f"edge endpoint {bits_to_str(v)} is not a vertex")
            es.append((a, b, w))
            adj[a].append((b, w))
            adj[b].append((a, w))
        self.vertices = verts
        self.edges = tuple(es)
        self._adj = adj
        self._cache: dict = {}

    def __repr__(self):
        return f"RecordGraph({len(self.vertices)} vertices, {len(self.edges)} edges)"

    def distances_from(self, source: Record) -> dict:
        """Dijkstra with a binary heap; unreachable vertices are absent."""
        source = tuple(source)
        if source not in self._adj:
            raise KeyError(f"record {bits_to_str(source)} is not a vertex of the graph")
        hit = self._cache.get(source)
        if hit is not None:
            return hit
        dist = {source: 0.0}
        heap = [(0.0, source)]
        done = set()
        while heap:
            du, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            for v, w in self._adj[u]:
                nd = du + w
                if nd < dist.get(v, INF):
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
        self._cache[source] = dist
        return dist

    def _eval(self, a, b):
        b = tuple(b)
        if b not in self._adj:
            raise KeyError(f"record {bits_to_str(b)} is not a vertex of the graph")
        return self.distances_from(tuple(a)).get(b, INF)

    def to_dict(self):
        return {
            "type": "record_graph",
            "vertices": sorted(bits_to_str(v) for v in self.vertices),
            "edges": [[bits_to_str(a), bits_to_str(b), w] for a, b, w in self.edges],
        }

    def __eq__(self, other):
        if not isinstance(other, RecordGraph):
            return NotImplemented
        return self.vertices == other.vertices and sorted(self.edges) == sorted(other.edges)

    def __hash__(self):
        return hash((self.vertices, tuple(sorted(self.edges))))


@dataclass(frozen=True)
class ComposedMetric(PrivacyMetric):
    """Pointwise sum (``mode='sum'``) or root-sum-square (``mode='rss'``) of metrics, evaluated lazily."""

    parts: tuple[PrivacyMetric, ...]
    mode: str

    def __post_init__(self):
        if self.mode not in ("sum", "rss"):
            raise ValueError("mode must be 'sum' or 'rss'")
        if not self.parts:
            raise ValueError("nothing to compose")

    def _eval(self, a, b):
        vals = [metric_eval(p, a, b) for p in self.parts]
        return _combine(vals, self.mode)

    def to_dict(self):
        return {"type": "composed", "mode": self.mode, "parts": [p.to_dict() for p in self.parts]}


def _combine(vals, mode):
    if any(math.isinf(v) for v in vals):
        return INF
    if mode == "sum":
        return float(sum(vals))
    return math.sqrt(sum(v * v for v in vals))


def metric_eval(m: PrivacyMetric, a: Sequence[int], b: Sequence[int]) -> float:
    """Value of ``m`` on the record pair ``(a, b)``; ``math.inf`` if unbounded."""
    return m._eval(tuple(int(x) for x in a), tuple(int(x) for x in b))


def _graph_parts(m: PrivacyMetric) -> list[RecordGraph]:
    if isinstance(m, RecordGraph):
        return [m]
    if isinstance(m, ComposedMetric):
        return [g for p in m.parts for g in _graph_parts(p)]
    return []


def metric_sup(m: PrivacyMetric) -> float:
    """Supremum of the metric over all record pairs of its domain."""
    if isinstance(m, UniformPerAttribute):
        if m.d is None:
            raise PreconditionError("uniform metric needs d to take a supremum")
        return m.eps0 * m.d
    if isinstance(m, WeightedPerAttribute):
        return float(sum(m.weights))
    if isinstance(m, ConstantMetric):
        return m.eps
    if isinstance(m, RecordGraph):
        verts = sorted(m.vertices)
        best = 0.0
        for v in verts:
            dist = m.distances_from(v)
            if len(dist) < len(verts):
                return INF
            best = max(best, max(dist.values()))
        return best
    if isinstance(m, ComposedMetric):
        graphs = _graph_parts(m)
        if graphs:
            # the domain is the common vertex set; enumerate its pairs
            dom = sorted(frozenset.intersection(*(g.vertices for g in graphs)))
            best = 0.0
            for i, a in enumerate(dom):
                for b in dom[i + 1:]:
                    best = max(best, metric_eval(m, a, b))
            return best
        # per-attribute parts are monotone in the set of differing attributes,
        # so the supremum is attained when every attribute differs
        return _combine([metric_sup(p) for p in m.parts], m.mode)
    raise TypeError(f"unknown metric {type(m).__name__}")


BUDGET_KINDS = ("pure", "zcdp", "partial_pure", "partial_cdp")
_PURE_FAMILY = ("pure", "partial_pure")


@dataclass(frozen=True)
class Budget:
    """A privacy guarantee.

    ``pure`` and ``zcdp`` carry a number (``epsilon`` or ``rho``); the partial
    kinds carry a :class:`PrivacyMetric`.
    """

    kind: str
    value: float | None = None
    metric: PrivacyMetric | None = None

    def __post_init__(self):
        if self.kind not in BUDGET_KINDS:
            raise ValueError(f"unknown budget kind {self.kind!r}")
        if self.kind in ("pure", "zcdp"):
            if self.value is None or not self.value >= 0:
                raise ValueError(f"{self.kind} budget needs a non-negative value")
        elif self.metric is None:
            raise ValueError(f"{self.kind} budget needs a metric")

    @classmethod
    def pure(cls, eps: float) -> "Budget":
        return cls("pure", value=float(eps))

    @classmethod
    def zcdp(cls, rho: float) -> "Budget":
        return cls("zcdp", value=float(rho))

    @classmethod
    def partial_pure(cls, metric) -> "Budget":
        if not isinstance(metric, PrivacyMetric):
            metric = UniformPerAttribute(float(metric))
        return cls("partial_pure", metric=metric)

    @classmethod
    def partial_cdp(cls, metric) -> "Budget":
        if not isinstance(metric, PrivacyMetric):
            metric = UniformPerAttribute(float(metric))
        return cls("partial_cdp", metric=metric)

    @property
    def family(self) -> str:
        return "pure" if self.kind in _PURE_FAMILY else "cdp"

    def as_metric(self) -> PrivacyMetric:
        """The pointwise ``eps`` function of this budget (zCDP ``rho`` maps to ``sqrt(2 rho)``)."""
        if self.kind == "pure":
            return ConstantMetric(self.value)
        if self.kind == "zcdp":
            return ConstantMetric(math.sqrt(2 * self.value))
        return self.metric

    def to_dict(self) -> dict:
        if self.kind == "pure":
            return {"kind": "pure", "epsilon": _num_out(self.value)}
        if self.kind == "zcdp":
            return {"kind": "zcdp", "rho": _num_out(self.value)}
        return {"kind": self.kind, "metric": _metric_out(self.metric.to_dict())}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, obj: dict) -> "Budget":
        kind = obj["kind"]
        if kind == "pure":
            return cls.pure(_num_in(obj["epsilon"]))
        if kind == "zcdp":
            return cls.zcdp(_num_in(obj["rho"]))
        return cls(kind, metric=metric_from_dict(obj["metric"]))

    @classmethod
    def from_json(cls, s: str) -> "Budget":
        return cls.from_dict(json.loads(s))


def _num_out(v):
    return "inf" if math.isinf(v) else v


def _num_in(v):
    return INF if v == "inf" else float(v)


def _metric_out(d: dict) -> dict:
    if "eps0" in d:
        d = dict(d, eps0=_num_out(d["eps0"]))
    if "eps" in d:
        d = dict(d, eps=_num_out(d["eps"]))
    return d


def metric_from_dict(obj: dict) -> PrivacyMetric:
    t = obj["type"]
    if t == "uniform_per_attribute":
        return UniformPerAttribute(_num_in(obj["eps0"]), obj.get("d"))
    if t == "weighted_per_attribute":
        return WeightedPerAttribute(tuple(obj["weights"]))
    if t == "constant":
        return ConstantMetric(_num_in(obj["eps"]))
    if t == "record_graph":
        return RecordGraph(
            [str_to_bits(v) for v in obj["vertices"]],
            [(str_to_bits(a), str_to_bits(b), w) for a, b, w in obj["edges"]],
        )
    if t == "composed":
        return ComposedMetric(tuple(metric_from_dict(p) for p in obj["parts"]), obj["mode"])
    raise ValueError(f"unknown metric type {t!r}")


def _merge_d(ds):
    known = {d for d in ds if d is not None}
    if len(known) > 1:
        raise SchemaMismatch(f"metrics defined on different d: {sorted(known)}")
    return known.pop() if known else None


def _compose_metrics(metrics: list[PrivacyMetric], mode: str) -> PrivacyMetric:
    if len(metrics) == 1:
        return metrics[0]
    if all(isinstance(m, UniformPerAttribute) for m in metrics):
        d = _merge_d([m.d for m in metrics])
        return UniformPerAttribute(_combine([m.eps0 for m in metrics], mode), d)
    if mode == "sum" and all(
        isinstance(m, (UniformPerAttribute, WeightedPerAttribute)) for m in metrics
    ):
        d = _merge_d([getattr(m, "d", None) for m in metrics])
        if d is not None:
            total = np.zeros(d)
            for m in metrics:
                total += m.weights if isinstance(m, WeightedPerAttribute) else m.eps0
            return WeightedPerAttribute(tuple(total.tolist()))
    flat = []
    for m in metrics:
        if isinstance(m, ComposedMetric) and m.mode == mode:
            flat.extend(m.parts)
        else:
            flat.append(m)
    return ComposedMetric(tuple(flat), mode)


def compose_sequential(budgets: Sequence[Budget]) -> Budget:
    """Budget of running the given mechanisms one after another.

    Pure-family parameters add pointwise; concentrated-family parameters add
    in root-sum-square (equivalently, zCDP ``rho`` values add).
    """
    budgets = list(budgets)
    if not budgets:
        raise ValueError("nothing to compose")
    families = {b.family for b in budgets}
    if len(families) > 1:
        raise IncompatibleBudgets("cannot compose pure-family with concentrated-family budgets")
    if len(budgets) == 1:
        return budgets[0]
    fam = families.pop()
    if fam == "pure":
        if all(b.kind == "pure" for b in budgets):
            return Budget.pure(sum(b.value for b in budgets))
        return Budget.partial_pure(_compose_metrics([b.as_metric() for b in budgets], "sum"))
    if all(b.kind == "zcdp" for b in budgets):
        return Budget.zcdp(sum(b.value for b in budgets))
    return Budget.partial_cdp(_compose_metrics([b.as_metric() for b in budgets], "rss"))


def compose_parallel_attributes(budgets: Sequence[Budget]) -> Budget:
    """Budget of independent mechanisms each reading only attribute ``j``.

    ``budgets[j]`` is the standard guarantee (``pure`` or ``zcdp``) of the
    mechanism on attribute ``j``. The result is a per-attribute guarantee
    whose weight on attribute ``j`` is that mechanism's epsilon.
    """
    budgets = list(budgets)
    if not budgets:
        raise ValueError("nothing to compose")
    kinds = {b.kind for b in budgets}
    if kinds == {"pure"}:
        eps = [b.value for b in budgets]
        make = Budget.partial_pure
    elif kinds == {"zcdp"}:
        eps = [math.sqrt(2 * b.value) for b in budgets]
        make = Budget.partial_cdp
    else:
        raise IncompatibleBudgets("parallel composition needs all-pure or all-zCDP budgets")
    if len(set(eps)) == 1:
        return make(UniformPerAttribute(eps[0], len(eps)))
    return make(WeightedPerAttribute(tuple(eps)))


def partial_to_standard(b: Budget, d: int | None = None) -> Budget:
    """Convert a uniform per-attribute budget on ``d`` attributes to a per-person one.

    ``partial_pure(eps0)`` becomes ``pure(d * eps0)``; ``partial_cdp(eps0)``
    becomes ``zcdp(d**2 * eps0**2 / 2)``. Standard budgets pass through.
    """
    if b.kind in ("pure", "zcdp"):
        return b
    m = b.metric
    if not isinstance(m, UniformPerAttribute):
        raise PreconditionError(
            "only uniform per-attribute budgets convert directly; take metric_sup first"
        )
    if d is None:
        d = m.d
    if d is None or d < 1:
        raise PreconditionError("d must be a positive integer")
    if m.d is not None and m.d != d:
        raise SchemaMismatch(f"metric has d={m.d}, conversion asked for d={d}")
    if b.kind == "partial_pure":
        return Budget.pure(d * m.eps0)
    return Budget.zcdp(0.5 * d * d * m.eps0 * m.eps0)


def zcdp_to_approx_dp_simple(rho: float, eps_tilde: float) -> float:
    """``delta = exp(-(eps_tilde - rho)^2 / (4 rho))`` for ``eps_tilde >= rho > 0``."""
    if not rho > 0:
        raise PreconditionError("rho must be positive")
    if eps_tilde < rho:
        raise PreconditionError("eps_tilde must be at least rho")
    return math.exp(-((eps_tilde - rho) ** 2) / (4 * rho))


def zcdp_simple_epsilon(rho: float, delta: float) -> float:
    """Inverse of :func:`zcdp_to_approx_dp_simple` in ``eps_tilde``."""
    if not rho > 0 or not 0 < delta < 1:
        raise PreconditionError("need rho > 0 and delta in (0, 1)")
    return rho + 2 * math.sqrt(rho * math.log(1 / delta))


_ALPHA_MAX = 500.0


def _eps_at_order(alpha: float, rho: float, log_delta: float) -> float:
    # solves exp((a-1)(a*rho - eps)) * (1-1/a)^a / (a-1) = delta for eps
    am1 = alpha - 1.0
    return alpha * rho + (-log_delta - math.log(am1) + alpha * math.log1p(-1.0 / alpha)) / am1


def zcdp_to_approx_dp_tight(rho: float, delta: float, tol: float = 1e-3) -> float:
    """Smallest ``eps`` with ``rho``-zCDP implying ``(eps, delta)``-DP under the optimal moment bound.

    Minimizes, over Renyi orders ``alpha`` in ``(1, 500]``, the ``eps`` at which
    ``exp((alpha-1)(alpha*rho - eps)) (1 - 1/alpha)^alpha / (alpha - 1)``
    equals ``delta``. For very small ``rho`` the best order exceeds 500; the
    result is then capped by :func:`zcdp_simple_epsilon`, which is also valid.
    """
    if not rho > 0:
        raise PreconditionError("rho must be positive")
    if not 0 < delta < 1:
        raise PreconditionError("delta must lie in (0, 1)")
    log_delta = math.log(delta)
    grid = 1.0 + np.geomspace(1e-6, _ALPHA_MAX - 1.0, 4000)
    vals = np.array([_eps_at_order(a, rho, log_delta) for a in grid])
    i = int(np.argmin(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    best = float(vals[i])
    if hi > lo:
        res = minimize_scalar(
            _eps_at_order, bounds=(lo, hi), args=(rho, log_delta),
            method="bounded", options={"xatol": 1e-10},
        )
        if res.success and res.fun < best:
            best = float(res.fun)
    if not math.isfinite(best):
        raise ArithmeticError(f"conversion did not converge for rho={rho}, delta={delta}")
    return max(min(best, zcdp_simple_epsilon(rho, delta)), 0.0)


def budget_ledger(b: Budget, d: int, delta: float = 1e-6) -> dict:
    """Per-attribute budget plus its per-person equivalents, as a JSON-ready dict."""
    out = {"budget": b.to_dict()}
    if b.kind in ("partial_pure", "partial_cdp"):
        if isinstance(b.metric, UniformPerAttribute):
            std = partial_to_standard(b, d)
        else:
            sup = metric_sup(b.metric)
            std = Budget.pure(sup) if b.kind == "partial_pure" else Budget.zcdp(0.5 * sup * sup)
        out["per_person"] = std.to_dict()
    else:
        std = b
    if std.kind == "zcdp" and std.value > 0 and math.isfinite(std.value):
        out["approx_dp"] = {"epsilon": zcdp_to_approx_dp_tight(std.value, delta), "delta": delta}
    return out


__all__ = [
    "Budget",
    "ComposedMetric",
    "ConstantMetric",
    "INF",
    "PrivacyMetric",
    "RecordGraph",
    "UniformPerAttribute",
    "WeightedPerAttribute",
    "budget_ledger",
    "compose_parallel_attributes",
    "compose_sequential",
    "metric_eval",
    "metric_from_dict",
    "metric_sup",
    "partial_to_standard",
    "zcdp_simple_epsilon",
    "zcdp_to_approx_dp_simple",
    "zcdp_to_approx_dp_tight",
]
