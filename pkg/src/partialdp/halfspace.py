"""Hamming-robust halfspace learning over ``{-1,+1}^d``.

Labels are privatized with randomized response, then the exponential
mechanism picks a halfspace from an l1 net using a smoothed robust loss.
Net weights are stored as integer vectors ``v`` with ``|v|_1 <= r``; the
halfspace they represent is ``v / r``, and classification is scale-free.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core import LabeledDataset, RngStream, all_records
from .errors import NetExplosion, PreconditionError
from .mechanisms import exponential_select, randomized_response

NET_CAP = 10**7
MAX_PROFILE_D = 8
_CHUNK = 1 << 17


@dataclass(frozen=True)
class Halfspace:
    """``h_w(x) = sign(<w, x>)`` with ``sign(0) = +1``."""

    w: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(float(v) for v in self.w))

    @property
    def d(self) -> int:
        return len(self.w)

    def predict(self, X) -> np.ndarray:
        s = np.asarray(X, dtype=float) @ np.asarray(self.w)
        return np.where(s >= 0, 1, -1).astype(np.int8)

    def to_dict(self):
        return {"w": list(self.w)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> "Halfspace":
        return cls(tuple(json.loads(s)["w"]))


@dataclass(frozen=True)
class RobustLearnConfig:
    gamma: float
    gamma_prime: float
    eps: float

    def __post_init__(self):
        if not 0 < self.gamma_prime < self.gamma <= 1:
            raise PreconditionError("need 0 < gamma' < gamma <= 1")
        if not self.eps > 0:
            raise PreconditionError("eps must be positive")

    @property
    def nu(self) -> float:
        return (self.gamma - self.gamma_prime) / 5

    def to_dict(self):
        return {"gamma": self.gamma, "gamma_prime": self.gamma_prime, "eps": self.eps, "nu": self.nu}


# --- decision-boundary distance and losses ----------------------------------


def dec_many(X, y, w) -> np.ndarray:
    """Greedy ``dec`` for each row of ``X`` against one weight vector.

    Flipping coordinate ``j`` lowers ``y <w, z>`` by ``2 y w_j x_j``, and
    flips act independently, so taking the largest contributions first is
    optimal. Returns ``d + 1`` for rows where no flip pattern reaches the
    other label.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    w = np.asarray(w, dtype=float)
    n, d = X.shape
    c = y[:, None] * X * w[None, :]
    margin = c.sum(axis=1)
    steps = np.concatenate([np.zeros((n, 1)), np.cumsum(-np.sort(-c, axis=1), axis=1)], axis=1)
    value = margin[:, None] - 2.0 * steps
    # y = +1 is misclassified once <w,z> < 0; y = -1 once <w,z> >= 0
    hit = np.where(y[:, None] > 0, value < 0, value <= 0)
    return np.where(hit.any(axis=1), np.argmax(hit, axis=1), d + 1).astype(np.int64)


def dec(x: Sequence[int], y: int, h: Halfspace) -> int:
    """Fewest coordinate flips of ``x`` reaching a point ``h`` does not label ``y``."""
    x = np.asarray(x).reshape(1, -1)
    if x.shape[1] != h.d:
        raise ValueError("dimension mismatch")
    return int(dec_many(x, [y], h.w)[0])


def loss_from_dec(dv, gamma: float, gamma_prime: float, d: int):
    """``clip((gamma d - dec) / ((gamma - gamma') d), 0, 1)``."""
    if not gamma > gamma_prime > 0:
        raise PreconditionError("need gamma > gamma' > 0")
    return np.clip((gamma * d - np.asarray(dv, dtype=float)) / ((gamma - gamma_prime) * d), 0.0, 1.0)


def smoothed_loss(x, y, h: Halfspace, gamma: float, gamma_prime: float, d: int | None = None) -> float:
    d = h.d if d is None else d
    return float(loss_from_dec(dec(x, y, h), gamma, gamma_prime, d))


def empirical_loss(h: Halfspace, X, y, gamma: float, gamma_prime: float) -> float:
    """Mean smoothed loss over a sample."""
    return float(loss_from_dec(dec_many(X, y, h.w), gamma, gamma_prime, h.d).mean())


def robust_error(h: Halfspace, X, y, gamma: float, weights=None) -> float:
    """Weighted fraction of examples whose ``gamma d`` Hamming ball contains a misclassified point.

    Without ``weights`` every example counts equally; with them ``(X, y,
    weights)`` describes an explicit distribution.
    """
    dv = dec_many(X, y, h.w)
    bad = (dv <= gamma * h.d + 1e-12).astype(float)
    if weights is None:
        return float(bad.mean()) if bad.size else 0.0
    return float(np.dot(bad, np.asarray(weights, dtype=float)))


def loss_sensitivity(gamma: float, gamma_prime: float, d: int) -> float:
    """``1/((gamma - gamma') d)``: one attribute flip moves ``dec`` by at most 1."""
    return 1.0 / ((gamma - gamma_prime) * d)


# --- nets -------------------------------------------------------------------


def net_resolution(d: int, nu: float) -> int:
    return math.ceil(d / (2 * nu))


def net_size(d: int, r: int) -> int:
    """Integer points of ``{v in Z^d : |v|_1 <= r}``."""
    return sum(2**k * math.comb(d, k) * math.comb(r, k) for k in range(min(d, r) + 1))


@lru_cache(maxsize=4)
def integer_net(d: int, r: int) -> np.ndarray:
    """All integer vectors with l1 norm at most ``r`` as a read-only ``(N, d)`` array."""
    N = net_size(d, r)
    if N > NET_CAP:
        raise NetExplosion(f"net with d={d}, r={r} has {N} points, cap is {NET_CAP}")
    dtype = np.int8 if r <= 127 else np.int32
    pts = np.zeros((1, 0), dtype=dtype)
    used = np.zeros(1, dtype=np.int64)
    for _ in range(d):
        parts, uparts = [], []
        for v in range(-r, r + 1):
            m = used + abs(v) <= r
            parts.append(np.column_stack([pts[m], np.full(int(m.sum()), v, dtype=dtype)]))
            uparts.append(used[m] + abs(v))
        pts, used = np.concatenate(parts), np.concatenate(uparts)
    pts.flags.writeable = False
    return pts


def build_l1_net(d: int, nu: float) -> np.ndarray:
    """Grid vectors with coordinates in multiples of ``1/r`` and l1 norm at most 1, ``r = ceil(d/(2 nu))``.

    Rounding any unit-l1 vector coordinatewise, rounding up only the largest
    fractional parts, stays inside the ball and moves it by at most
    ``d/(2r) <= nu``.
    """
    if not nu > 0:
        raise ValueError("nu must be positive")
    r = net_resolution(d, nu)
    return integer_net(d, r).astype(float) / r


# --- exponential-mechanism ERM ----------------------------------------------


def erm_exponential(
    X,
    y,
    hypotheses: Sequence[Halfspace],
    eps: float,
    gamma: float,
    gamma_prime: float,
    r: RngStream,
    zero_noise: bool = False,
) -> Halfspace:
    """Pick ``h`` with probability proportional to ``exp(-eps |S| L(h;S) / (2 Delta))``."""
    if not hypotheses:
        raise PreconditionError("no hypotheses to choose from")
    X = np.asarray(X)
    d = X.shape[1]
    totals = np.array(
        [loss_from_dec(dec_many(X, y, h.w), gamma, gamma_prime, d).sum() for h in hypotheses]
    )
    t = eps / (2 * loss_sensitivity(gamma, gamma_prime, d))
    return hypotheses[exponential_select(-totals, t, r, zero_noise)]


def cell_index(X, y) -> np.ndarray:
    """Index of each example among the ``2^(d+1)`` cells ``(x, y)``: ``2 * code(x) + [y = +1]``."""
    B = (np.asarray(X) > 0).astype(np.int64)
    code = np.zeros(B.shape[0], dtype=np.int64)
    for j in range(B.shape[1]):
        code = (code << 1) | B[:, j]
    return 2 * code + (np.asarray(y).reshape(-1) > 0)


def cell_examples(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Features and labels of every cell, in ``cell_index`` order."""
    X = 2 * all_records(d).astype(np.int8) - 1
    return np.repeat(X, 2, axis=0), np.tile(np.array([-1, 1], dtype=np.int8), 2**d)


def _sorted_desc(cols: list[np.ndarray]) -> list[np.ndarray]:
    # odd-even transposition network; d is small so elementwise passes beat np.sort
    cols = list(cols)
    d = len(cols)
    for rnd in range(d):
        for j in range(rnd % 2, d - 1, 2):
            hi = np.maximum(cols[j], cols[j + 1])
            cols[j + 1] = np.minimum(cols[j], cols[j + 1])
            cols[j] = hi
    return cols


def _first_hit(value_cols: list[np.ndarray], strict: bool, d: int) -> np.ndarray:
    out = np.full(value_cols[0].shape, d + 1, dtype=np.int8)
    for k in range(len(value_cols) - 1, -1, -1):
        hit = value_cols[k] < 0 if strict else value_cols[k] <= 0
        out[hit] = k
    return out


def _profile_chunk(W: np.ndarray, Xc: np.ndarray, d: int) -> np.ndarray:
    W = W.astype(np.int16)
    X = Xc.astype(np.int16)
    # contributions w_j x_j for y = +1; y = -1 at x equals y = +1 at -x with a non-strict test
    c = [W[:, j:j + 1] * X[None, :, j] for j in range(d)]
    margin = sum(c)
    s = _sorted_desc(c)
    values = [margin]
    run = margin
    for col in s:
        run = run - 2 * col
        values.append(run)
    nx = X.shape[0]
    out = np.empty((W.shape[0], 2 * nx), dtype=np.int8)
    out[:, 1::2] = _first_hit(values, True, d)
    # the cell of -x has index nx - 1 - i
    out[:, 0::2] = _first_hit(values, False, d)[:, ::-1]
    return out


def _row_hashes(prof: np.ndarray, salt: np.ndarray) -> np.ndarray:
    return (prof.astype(np.uint64) * salt[None, :]).sum(axis=1, dtype=np.uint64)


@dataclass(frozen=True)
class NetProfiles:
    """Net hypotheses grouped by their ``dec`` value on every cell.

    ``decs[u]`` is the profile shared by ``counts[u]`` net points and
    ``members`` maps each net point to its profile.
    """

    d: int
    r: int
    decs: np.ndarray
    counts: np.ndarray
    members: np.ndarray

    def first_member(self, u: int) -> int:
        return int(np.argmax(self.members == u))

    def member(self, u: int, k: int) -> int:
        return int(np.flatnonzero(self.members == u)[k])


@lru_cache(maxsize=4)
def net_profiles(d: int, r: int) -> NetProfiles:
    if d > MAX_PROFILE_D:
        raise PreconditionError(f"profile enumeration supports d <= {MAX_PROFILE_D}")
    net = integer_net(d, r)
    Xc = 2 * all_records(d).astype(np.int8) - 1
    salt = np.random.default_rng(0x5EED).integers(1, 2**63, size=2 ** (d + 1), dtype=np.uint64)
    hashes = np.empty(net.shape[0], dtype=np.uint64)
    rep_rows = {}
    for s in range(0, net.shape[0], _CHUNK):
        prof = _profile_chunk(net[s:s + _CHUNK], Xc, d)
        h = _row_hashes(prof, salt)
        hashes[s:s + _CHUNK] = h
        u, first, inv = np.unique(h, return_index=True, return_inverse=True)
        ok = (prof[first][inv.reshape(-1)] == prof).all()
        for key, i in zip(u.tolist(), first.tolist()):
            prev = rep_rows.setdefault(key, prof[i])
            ok = ok and bool((prev == prof[i]).all())
        if not ok:
            raise RuntimeError("profile hash collision")
    keys, members = np.unique(hashes, return_inverse=True)
    decs = np.stack([rep_rows[k] for k in keys.tolist()])
    counts = np.bincount(members, minlength=keys.size)
    return NetProfiles(d, r, decs, counts, members.astype(np.int32).reshape(-1))


def net_hypothesis(d: int, r: int, idx: int) -> Halfspace:
    """Net point ``idx`` as a halfspace.

    The integer weights are kept unscaled: ``h_w`` is invariant to positive
    scaling, and dividing by ``r`` would let float rounding break the
    ``sign(0) = +1`` ties the profiles were computed with.
    """
    return Halfspace(tuple(integer_net(d, r)[idx].astype(float)))


def _net_select(
    S: LabeledDataset, gamma: float, gamma_prime: float, eps: float, nu: float,
    r: RngStream, zero_noise: bool,
) -> Halfspace:
    d = S.d
    res = net_resolution(d, nu)
    prof = net_profiles(d, res)
    cells = np.bincount(cell_index(S.features, S.labels), minlength=2 ** (d + 1))
    totals = loss_from_dec(prof.decs, gamma, gamma_prime, d) @ cells
    t = eps / (2 * loss_sensitivity(gamma, gamma_prime, d))
    if zero_noise:
        u = exponential_select(-totals, t, r, zero_noise=True)
        idx = prof.first_member(u)
    else:
        u = exponential_select(-totals, t, r.substream(0), log_base=np.log(prof.counts))
        k = min(int(r.substream(1).uniform() * prof.counts[u]), int(prof.counts[u]) - 1)
        idx = prof.member(u, k)
    return net_hypothesis(d, res, idx)


def learn_halfspace_robust(
    S: LabeledDataset, cfg: RobustLearnConfig, r: RngStream, zero_noise: bool = False
) -> Halfspace:
    """Randomized response on labels at ``eps``, then exponential-mechanism ERM over the net at ``eps``.

    Sampling is grouped by ``dec`` profile: a profile is drawn with weight
    ``count * exp(-eps |S| L / (2 Delta))`` and then a uniform member, which
    is the same distribution as drawing from the full net.
    """
    if S.n == 0:
        raise PreconditionError("halfspace learner needs samples")
    noisy = randomized_response(S.labels, cfg.eps, r.substream(0), zero_noise)
    S2 = LabeledDataset(S.schema, S.features, noisy)
    return _net_select(S2, cfg.gamma, cfg.gamma_prime, cfg.eps, cfg.nu, r.substream(1), zero_noise)


def excess_error_bound(cfg: RobustLearnConfig, n: int, C: float = 10.0) -> float:
    """``C (1/(eps sqrt(n) (g-g')^2) + ln(1/(g-g')) / (eps^2 n (g-g')))``."""
    g = cfg.gamma - cfg.gamma_prime
    return C * (1 / (cfg.eps * math.sqrt(n) * g * g) + math.log(1 / g) / (cfg.eps**2 * n * g))


__all__ = [
    "Halfspace",
    "NetProfiles",
    "RobustLearnConfig",
    "build_l1_net",
    "cell_examples",
    "cell_index",
    "dec",
    "dec_many",
    "empirical_loss",
    "erm_exponential",
    "excess_error_bound",
    "integer_net",
    "learn_halfspace_robust",
    "loss_from_dec",
    "loss_sensitivity",
    "net_hypothesis",
    "net_profiles",
    "net_resolution",
    "net_size",
    "robust_error",
    "smoothed_loss",
]
