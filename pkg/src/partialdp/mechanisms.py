"""Noise and selection primitives.

Every sampler accepts ``zero_noise``: when set, noise draws return exactly 0,
selection returns the lowest-index argmax and randomized response returns the
true label. That mode exists for oracle tests only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .core import RngStream


@dataclass(frozen=True)
class NoiseConfig:
    zero_noise: bool = False


def laplace_from_uniform(u, b: float):
    """Inverse-CDF transform of uniform draws ``u`` in (0, 1) to Laplace(``b``)."""
    u = np.asarray(u, dtype=float) - 0.5
    return -b * np.sign(u) * np.log1p(-2.0 * np.abs(u))


def laplace_sample(b: float, r: RngStream, size=None, zero_noise: bool = False):
    """Laplace(``b``) draws, one uniform per draw."""
    if not b > 0:
        raise ValueError("Laplace scale must be positive")
    if zero_noise:
        return 0.0 if size is None else np.zeros(size)
    z = laplace_from_uniform(r.uniform(size), b)
    return float(z) if size is None else z


def gaussian_sample(sigma: float, r: RngStream, size=None, zero_noise: bool = False):
    """Normal(0, ``sigma``^2) draws."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if zero_noise:
        return 0.0 if size is None else np.zeros(size)
    z = sigma * r.normal(size)
    return float(z) if size is None else z


def exponential_probabilities(scores, t: float) -> np.ndarray:
    """``softmax(t * scores)``, computed with log-sum-exp."""
    s = t * np.asarray(scores, dtype=float)
    return np.exp(s - logsumexp(s))


def exponential_select(
    scores, t: float, r: RngStream, zero_noise: bool = False, log_base=None
) -> int:
    """Index ``i`` with probability proportional to ``exp(t * scores[i])``.

    ``log_base`` optionally adds per-index log-multiplicities, which selects
    among groups of equally scored candidates as if each member were listed.
    """
    s = np.asarray(scores, dtype=float)
    if s.ndim != 1 or s.size == 0:
        raise ValueError("scores must be a non-empty vector")
    if not np.isfinite(s).all():
        raise ValueError("scores must be finite")
    if not t > 0:
        raise ValueError("exponent scale must be positive")
    logits = t * s
    if log_base is not None:
        logits = logits + np.asarray(log_base, dtype=float)
    if zero_noise:
        return int(np.argmax(logits))
    logits = logits - logits.max()
    cdf = np.cumsum(np.exp(logits))
    u = r.uniform() * cdf[-1]
    return int(min(np.searchsorted(cdf, u, side="right"), s.size - 1))


def flip_probability(eps: float) -> float:
    """Probability that randomized response at ``eps`` reports the wrong label."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    return 1.0 / (math.exp(eps) + 1.0) if eps < 700 else 0.0


def randomized_response(label, eps: float, r: RngStream, zero_noise: bool = False):
    """Keep each +-1 label with probability ``e^eps / (e^eps + 1)``, otherwise flip it.

    ``label`` may be a scalar or an array; one uniform is drawn per label.
    ``eps = 0`` is accepted for tests.
    """
    y = np.asarray(label)
    if y.size and not np.isin(y, (-1, 1)).all():
        raise ValueError("labels must be -1 or +1")
    if zero_noise:
        return int(y) if y.ndim == 0 else y.copy()
    p = flip_probability(eps)
    flips = r.uniform(None if y.ndim == 0 else y.shape) < p
    out = np.where(flips, -y, y)
    return int(out) if y.ndim == 0 else out.astype(y.dtype)


__all__ = [
    "NoiseConfig",
    "exponential_probabilities",
    "exponential_select",
    "flip_probability",
    "gaussian_sample",
    "laplace_from_uniform",
    "laplace_sample",
    "randomized_response",
]
