"""Workload release: the Gaussian projection mechanism and per-attribute MWEM."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .accountant import Budget, UniformPerAttribute
from .core import Dataset, RngStream, pack_bits
from .errors import PreconditionError, SchemaMismatch, TupleExplosion
from .mechanisms import exponential_select, gaussian_sample
from .workloads import Workload, diameters, eval_workload

MAX_DOMAIN_D = 20
DEFAULT_TUPLE_CAP = 10**6
MAX_DEFAULT_T = 200


@dataclass(frozen=True, eq=False)
class DistributionOverDomain:
    """Probability vector over ``{0,1}^d`` indexed by record code (first attribute most significant)."""

    d: int
    probs: np.ndarray

    def __post_init__(self):
        if not 1 <= self.d <= MAX_DOMAIN_D:
            raise PreconditionError(f"explicit distributions need 1 <= d <= {MAX_DOMAIN_D}")
        p = np.array(self.probs, dtype=float)
        if p.shape != (2**self.d,):
            raise ValueError(f"expected {2**self.d} probabilities, got shape {p.shape}")
        if (p < 0).any() or abs(p.sum() - 1.0) > 1e-9:
            raise ValueError("probabilities must be non-negative and sum to 1")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @classmethod
    def uniform(cls, d: int) -> "DistributionOverDomain":
        return cls(d, np.full(2**d, 2.0**-d))

    @classmethod
    def empirical(cls, D: Dataset) -> "DistributionOverDomain":
        if D.n == 0:
            raise PreconditionError("empirical distribution of an empty dataset")
        counts = np.bincount(pack_bits(D.rows).astype(np.int64), minlength=2**D.d)
        return cls(D.d, counts / D.n)

    def answers(self, W: Workload) -> np.ndarray:
        """Expected query values ``E_{u ~ A}[q(u)]``."""
        if W.d != self.d:
            raise SchemaMismatch(f"workload has d={W.d}, distribution has d={self.d}")
        return self.probs @ W.vertex_answers()

    def to_dict(self, threshold: float = 0.0) -> dict:
        nz = np.flatnonzero(self.probs > threshold)
        return {"d": self.d, "probs": {format(int(i), f"0{self.d}b"): float(self.probs[i]) for i in nz}}


# --- projection onto the answer polytope -----------------------------------


@dataclass
class FrankWolfeResult:
    point: np.ndarray
    gap: float
    iterations: int
    converged: bool
    weights: np.ndarray = field(repr=False)


def frank_wolfe_project(
    y,
    vertices,
    tol: float = 1e-6,
    max_iters: int = 10_000,
    init_weights=None,
) -> FrankWolfeResult:
    """Euclidean projection of ``y`` onto the convex hull of the rows of ``vertices``.

    Away-step Frank-Wolfe with exact line search; the linear minimization
    oracle scans every vertex and breaks ties toward the lowest index. Stops
    once twice the duality gap is at most ``tol``, which bounds the squared
    distance to the exact projection by ``tol``. If ``max_iters`` runs out the
    last (and best) iterate is returned with ``converged=False``.
    """
    V = np.asarray(vertices, dtype=float)
    y = np.asarray(y, dtype=float)
    if V.ndim != 2 or V.shape[0] == 0:
        raise ValueError("need a non-empty (N, m) vertex array")
    if y.shape != (V.shape[1],):
        raise ValueError("target and vertices disagree on dimension")
    if not tol > 0 or max_iters < 1:
        raise ValueError("tol and max_iters must be positive")
    N = V.shape[0]
    if init_weights is None:
        w = np.zeros(N)
        w[int(np.argmin(((V - y) ** 2).sum(axis=1)))] = 1.0
    else:
        w = np.array(init_weights, dtype=float)
        if w.shape != (N,) or (w < 0).any() or abs(w.sum() - 1) > 1e-9:
            raise ValueError("init_weights must be a probability vector over the vertices")
    x = w @ V
    gap = math.inf
    for it in range(1, max_iters + 1):
        grad = x - y
        scores = V @ grad
        s = int(np.argmin(scores))
        gap = max(float(grad @ x - scores[s]), 0.0)
        if 2.0 * gap <= tol:
            return FrankWolfeResult(x, gap, it, True, w)
        active = np.flatnonzero(w > 0)
        a = int(active[np.argmax(scores[active])])
        gap_away = float(scores[a] - grad @ x)
        if gap >= gap_away or w[a] >= 1.0:
            direction = V[s] - x
            step_max = 1.0
            away = False
        else:
            direction = x - V[a]
            step_max = w[a] / (1.0 - w[a])
            away = True
        dd = float(direction @ direction)
        if dd <= 0.0:
            break
        step = min(max(-float(grad @ direction) / dd, 0.0), step_max)
        if away:
            w *= 1.0 + step
            w[a] -= step
            if step >= step_max:
                w[a] = 0.0
        else:
            w *= 1.0 - step
            w[s] += step
        w[w < 1e-15] = 0.0
        w /= w.sum()
        x = w @ V
    grad = x - y
    gap = max(float(grad @ x - (V @ grad).min()), 0.0)
    return FrankWolfeResult(x, gap, max_iters, 2.0 * gap <= tol, w)


@dataclass
class ProjectionResult:
    answers: np.ndarray
    noisy_answers: np.ndarray
    epsilon: float
    epsilon0: float
    fw_gap: float
    converged: bool
    iterations: int
    sigma: float
    d: int

    @property
    def budgets(self) -> list[Budget]:
        return [
            Budget.zcdp(0.5 * self.epsilon**2),
            Budget.partial_cdp(UniformPerAttribute(self.epsilon0, self.d)),
        ]

    def to_dict(self) -> dict:
        return {
            "answers": self.answers.tolist(),
            "epsilon": self.epsilon,
            "epsilon0": self.epsilon0,
            "sigma": self.sigma,
            "fw_gap": self.fw_gap,
            "fw_converged": self.converged,
            "fw_iterations": self.iterations,
            "budgets": [b.to_dict() for b in self.budgets],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def projection_parameters(W: Workload, sigma: float, n: int) -> tuple[float, float]:
    """``(eps, eps0) = (Delta / (sigma n), Delta0 / (sigma n))``."""
    delta, delta0 = diameters(W)
    return delta / (sigma * n), delta0 / (sigma * n)


def projection_mse_bound(W: Workload, sigma: float) -> float:
    """``min(sigma^2, sigma * Delta * sqrt(2 ln |X|) / m)``."""
    delta, _ = diameters(W)
    return min(sigma**2, sigma * delta * math.sqrt(2 * W.d * math.log(2)) / W.m)


def projection_mechanism(
    D: Dataset,
    W: Workload,
    sigma: float,
    r: RngStream,
    tol: float = 1e-6,
    max_iters: int = 10_000,
    zero_noise: bool = False,
) -> ProjectionResult:
    """Add Normal(0, sigma^2) to each workload answer, then project onto the answer polytope."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if D.n == 0:
        raise PreconditionError("projection mechanism needs n >= 1")
    if W.d > 16:
        raise PreconditionError("projection mechanism enumerates vertices and needs d <= 16")
    eps, eps0 = projection_parameters(W, sigma, D.n)
    truth = eval_workload(W, D)
    noisy = truth + gaussian_sample(sigma, r, size=W.m, zero_noise=zero_noise)
    V = W.vertex_answers()
    init = None
    if zero_noise:
        # the target is the empirical answer vector, whose hull weights are known
        init = DistributionOverDomain.empirical(D).probs
    fw = frank_wolfe_project(noisy, V, tol=tol, max_iters=max_iters, init_weights=init)
    return ProjectionResult(
        answers=fw.point, noisy_answers=noisy, epsilon=eps, epsilon0=eps0,
        fw_gap=fw.gap, converged=fw.converged, iterations=fw.iterations,
        sigma=sigma, d=W.d,
    )


# --- attribute-disjoint tuples -----------------------------------------------


def _attr_masks(W: Workload) -> list[int]:
    return [sum(1 << a for a in q.attrs) for q in W.queries]


def count_disjoint_tuples(W: Workload, ell: int) -> int:
    """Number of unordered ``ell``-subsets of queries with pairwise-disjoint attributes."""
    if ell < 1:
        raise ValueError("ell must be positive")
    masks = _attr_masks(W)
    m = len(masks)
    memo: dict = {}

    def count(start, used, k):
        if k == 0:
            return 1
        key = (start, used, k)
        if key not in memo:
            memo[key] = sum(
                count(i + 1, used | masks[i], k - 1)
                for i in range(start, m - k + 1)
                if not masks[i] & used
            )
        return memo[key]

    return count(0, 0, ell)


def enumerate_disjoint_tuples(W: Workload, ell: int, cap: int = DEFAULT_TUPLE_CAP) -> np.ndarray:
    """All attribute-disjoint ``ell``-subsets of query indices, in lexicographic order.

    Returns an ``(count, ell)`` integer array. Raises :class:`TupleExplosion`
    when the count exceeds ``cap``.
    """
    if ell < 1:
        raise ValueError("ell must be positive")
    total = count_disjoint_tuples(W, ell)
    if total > cap:
        raise TupleExplosion(f"{total} disjoint {ell}-tuples exceed the cap of {cap}")
    masks = _attr_masks(W)
    m = len(masks)
    out = np.empty((total, ell), dtype=np.int64)
    row = 0
    stack: list[int] = []

    def rec(start, used):
        nonlocal row
        if len(stack) == ell:
            out[row] = stack
            row += 1
            return
        need = ell - len(stack)
        for i in range(start, m - need + 1):
            if not masks[i] & used:
                stack.append(i)
                rec(i + 1, used | masks[i])
                stack.pop()

    rec(0, 0)
    return out


def disjoint_tuple_max_error(
    W: Workload, ell: int, A: DistributionOverDomain, D: Dataset,
    cap: int = DEFAULT_TUPLE_CAP, tuples=None,
) -> float:
    """Largest average absolute error of ``A`` over any attribute-disjoint ``ell``-tuple of queries."""
    if tuples is None:
        tuples = enumerate_disjoint_tuples(W, ell, cap)
    if len(tuples) == 0:
        raise PreconditionError(f"the workload has no attribute-disjoint {ell}-tuple")
    err = np.abs(A.answers(W) - eval_workload(W, D))
    return float(err[tuples].mean(axis=1).max())


# --- MWEM ---------------------------------------------------------------------


def default_rounds(d: int, m: int, eps0: float, n: int, ell: int) -> int:
    """``ceil(sqrt(ln|X|) eps0 n / (sqrt(ell) ln m))`` clamped to ``[1, 200]``."""
    if m <= 1:
        return MAX_DEFAULT_T
    t = math.sqrt(d * math.log(2)) * eps0 * n / (math.sqrt(ell) * math.log(m))
    return int(min(max(math.ceil(t), 1), MAX_DEFAULT_T))


def mwem_error_bound(T: int, n: int, eps0: float, d: int, ell: int, m: int) -> float:
    """Bound on the expected worst disjoint-tuple average error after ``T`` rounds."""
    log_x = d * math.log(2)
    return math.sqrt(2 * T / (n * n * eps0 * eps0) + 4 * log_x / (T * ell)) + (
        math.sqrt(2 * T) / (eps0 * n)
    ) * math.log(m)


@dataclass
class MwemRound:
    round: int
    selected: int
    queries: tuple[int, ...]
    noisy_answers: tuple[float, ...]

    def to_dict(self):
        return {
            "round": self.round,
            "tuple_index": self.selected,
            "queries": list(self.queries),
            "noisy_answers": list(self.noisy_answers),
        }


@dataclass
class MwemResult:
    synthetic: DistributionOverDomain
    answers: np.ndarray
    trace: list[MwemRound]
    eps0: float
    T: int
    ell: int
    iterates: list[np.ndarray] | None = field(default=None, repr=False)

    @property
    def budgets(self) -> list[Budget]:
        d = self.synthetic.d
        return [
            Budget.partial_cdp(UniformPerAttribute(self.eps0, d)),
            Budget.zcdp(0.5 * (self.ell * self.eps0) ** 2),
        ]

    def to_dict(self) -> dict:
        return {
            "answers": self.answers.tolist(),
            "T": self.T,
            "ell": self.ell,
            "eps0": self.eps0,
            "budgets": [b.to_dict() for b in self.budgets],
            "trace": [t.to_dict() for t in self.trace],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def mwem(
    D: Dataset,
    W: Workload,
    eps0: float,
    T: int | None,
    ell: int,
    r: RngStream,
    zero_noise: bool = False,
    cap: int = DEFAULT_TUPLE_CAP,
    keep_iterates: bool = False,
) -> MwemResult:
    """Multiplicative weights with attribute-disjoint query tuples.

    Each round selects an ``ell``-tuple of attribute-disjoint queries with the
    exponential mechanism (exponent ``eps_T * n * sum |q(A_t) - q(x)|``),
    answers each with Gaussian noise of std ``1 / (n eps_T)`` clipped to
    ``[0, 1]``, and applies the multiplicative update with step 1/2. The
    output is the average of ``A_1 .. A_T``. ``T=None`` picks the default
    schedule.
    """
    if D.n == 0:
        raise PreconditionError("MWEM needs n >= 1")
    if D.d != W.d:
        raise SchemaMismatch(f"dataset has d={D.d}, workload has d={W.d}")
    if W.d > MAX_DOMAIN_D:
        raise PreconditionError(f"MWEM enumerates the domain and needs d <= {MAX_DOMAIN_D}")
    if not eps0 > 0:
        raise ValueError("eps0 must be positive")
    if ell < 1:
        raise ValueError("ell must be positive")
    n = D.n
    if T is None:
        T = default_rounds(W.d, W.m, eps0, n, ell)
    if T < 1:
        raise PreconditionError("T must be a positive integer")
    tuples = enumerate_disjoint_tuples(W, ell, cap)
    if len(tuples) == 0:
        raise PreconditionError(f"the workload has no attribute-disjoint {ell}-tuple")
    V = W.vertex_answers()
    truth = eval_workload(W, D)
    eps_t = eps0 / math.sqrt(2 * T)
    N = 2**W.d
    logw = np.full(N, -W.d * math.log(2))
    total = np.zeros(N)
    trace: list[MwemRound] = []
    iterates = [] if keep_iterates else None
    for t in range(T):
        A = np.exp(logw - logsumexp(logw))
        total += A
        if keep_iterates:
            iterates.append(A)
        qa = A @ V
        err = np.abs(qa - truth)
        scores = err[tuples].sum(axis=1)
        k = exponential_select(scores, eps_t * n, r, zero_noise=zero_noise)
        chosen = tuples[k]
        noise = gaussian_sample(1.0 / (n * eps_t), r, size=ell, zero_noise=zero_noise)
        a = np.clip(truth[chosen] + noise, 0.0, 1.0)
        logw = logw + 0.5 * (V[:, chosen] @ (a - qa[chosen]))
        logw -= logsumexp(logw)
        trace.append(MwemRound(t + 1, k, tuple(int(i) for i in chosen), tuple(float(v) for v in a)))
    avg = total / T
    avg /= avg.sum()
    synth = DistributionOverDomain(W.d, avg)
    return MwemResult(synth, avg @ V, trace, eps0, T, ell, iterates)


__all__ = [
    "DistributionOverDomain",
    "FrankWolfeResult",
    "MwemResult",
    "MwemRound",
    "ProjectionResult",
    "count_disjoint_tuples",
    "default_rounds",
    "disjoint_tuple_max_error",
    "enumerate_disjoint_tuples",
    "frank_wolfe_project",
    "mwem",
    "mwem_error_bound",
    "projection_mechanism",
    "projection_mse_bound",
    "projection_parameters",
]
