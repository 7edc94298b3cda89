"""scikit-learn style wrappers over the functional API.

Each estimator validates its input with ``check_array`` / ``check_X_y``,
derives its random stream from ``random_state`` and stores the functional
result in a trailing-underscore attribute.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .core import AttributeSchema, Dataset, LabeledDataset, RngStream
from .halfspace import RobustLearnConfig, learn_halfspace_robust
from .histogram import estimate_distribution, learn_point, learn_threshold, priv_histogram
from .release import mwem, projection_mechanism
from .workloads import kway_marginal_workload


def _stream(random_state) -> RngStream:
    return RngStream(0 if random_state is None else int(random_state))


def _binary(X) -> np.ndarray:
    X = check_array(X, dtype=None)
    if not np.isin(X, (0, 1)).all():
        raise ValueError("features must be 0/1")
    return X.astype(np.uint8)


class PrivateHistogram(BaseEstimator):
    """Sparse private histogram of the rows of a 0/1 matrix."""

    def __init__(self, eps=1.0, nu=0.05, eta=0.05, random_state=None, zero_noise=False):
        self.eps = eps
        self.nu = nu
        self.eta = eta
        self.random_state = random_state
        self.zero_noise = zero_noise

    def fit(self, X, y=None):
        D = Dataset.from_rows(_binary(X))
        self.histogram_ = priv_histogram(
            D, self.eps, self.nu, self.eta, _stream(self.random_state), self.zero_noise
        )
        self.n_features_in_ = D.d
        return self

    def estimate(self, X) -> np.ndarray:
        check_is_fitted(self, "histogram_")
        return np.array([self.histogram_[row] for row in _binary(X)])


class PrivateDistribution(BaseEstimator):
    """Sparse private estimate of the row distribution."""

    def __init__(self, eps=1.0, C=4.0, random_state=None, zero_noise=False):
        self.eps = eps
        self.C = C
        self.random_state = random_state
        self.zero_noise = zero_noise

    def fit(self, X, y=None):
        D = Dataset.from_rows(_binary(X))
        self.distribution_ = estimate_distribution(
            D, self.eps, _stream(self.random_state), C=self.C, zero_noise=self.zero_noise
        )
        self.n_features_in_ = D.d
        return self

    def probability(self, X) -> np.ndarray:
        check_is_fitted(self, "distribution_")
        return np.array([self.distribution_[row] for row in _binary(X)])


class _BitClassifier(ClassifierMixin, BaseEstimator):
    def fit(self, X, y):
        X, y = check_X_y(X, y)
        if not np.isin(X, (0, 1)).all() or not np.isin(y, (0, 1)).all():
            raise ValueError("features and labels must be 0/1")
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = X.shape[1]
        self.hypothesis_ = self._learn(X.astype(np.uint8), y.astype(np.uint8))
        return self

    def predict(self, X):
        check_is_fitted(self, "hypothesis_")
        return self.hypothesis_.predict(_binary(X))


class PointFunctionClassifier(_BitClassifier):
    def __init__(self, eps=1.0, alpha=0.1, random_state=None, zero_noise=False):
        self.eps = eps
        self.alpha = alpha
        self.random_state = random_state
        self.zero_noise = zero_noise

    def _learn(self, X, y):
        return learn_point(X, y, self.eps, self.alpha, _stream(self.random_state),
                           zero_noise=self.zero_noise)


class ThresholdClassifier(_BitClassifier):
    def __init__(self, eps=1.0, alpha=0.1, branch_swapped=True, random_state=None, zero_noise=False):
        self.eps = eps
        self.alpha = alpha
        self.branch_swapped = branch_swapped
        self.random_state = random_state
        self.zero_noise = zero_noise

    def _learn(self, X, y):
        fit = learn_threshold(X, y, self.eps, self.alpha, _stream(self.random_state),
                              branch_swapped=self.branch_swapped, zero_noise=self.zero_noise)
        self.fit_info_ = fit
        return fit.hypothesis


class RobustHalfspaceClassifier(ClassifierMixin, BaseEstimator):
    """Hamming-robust halfspace over +-1 features and labels."""

    def __init__(self, gamma=0.6, gamma_prime=0.2, eps=1.0, random_state=None, zero_noise=False):
        self.gamma = gamma
        self.gamma_prime = gamma_prime
        self.eps = eps
        self.random_state = random_state
        self.zero_noise = zero_noise

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        S = LabeledDataset(AttributeSchema.default(X.shape[1]), X, y)
        cfg = RobustLearnConfig(self.gamma, self.gamma_prime, self.eps)
        self.halfspace_ = learn_halfspace_robust(S, cfg, _stream(self.random_state), self.zero_noise)
        self.coef_ = np.asarray(self.halfspace_.w)
        self.classes_ = np.array([-1, 1])
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "halfspace_")
        return self.halfspace_.predict(check_array(X))


class MarginalRelease(BaseEstimator):
    """Private answers to all k-way marginals by projection (``method='projection'``) or MWEM."""

    def __init__(self, k=2, kind="conjunction", method="projection", sigma=0.05,
                 eps0=1.0, ell=1, T=None, random_state=None, zero_noise=False):
        self.k = k
        self.kind = kind
        self.method = method
        self.sigma = sigma
        self.eps0 = eps0
        self.ell = ell
        self.T = T
        self.random_state = random_state
        self.zero_noise = zero_noise

    def fit(self, X, y=None):
        D = Dataset.from_rows(_binary(X))
        W = kway_marginal_workload(D.d, self.k, self.kind)
        r = _stream(self.random_state)
        if self.method == "projection":
            self.result_ = projection_mechanism(D, W, self.sigma, r, zero_noise=self.zero_noise)
        elif self.method == "mwem":
            self.result_ = mwem(D, W, self.eps0, self.T, self.ell, r, zero_noise=self.zero_noise)
        else:
            raise ValueError("method must be 'projection' or 'mwem'")
        self.workload_ = W
        self.answers_ = np.asarray(self.result_.answers)
        self.n_features_in_ = D.d
        return self


__all__ = [
    "MarginalRelease",
    "PointFunctionClassifier",
    "PrivateDistribution",
    "PrivateHistogram",
    "RobustHalfspaceClassifier",
    "ThresholdClassifier",
]
