import math

import numpy as np
import pytest

from partialdp.core import Dataset, RngStream
from partialdp.errors import PreconditionError, TupleExplosion
from partialdp.oracle import brute_disjoint_tuple_max_error, nonprivate_mwem
from partialdp.release import (
    DistributionOverDomain,
    count_disjoint_tuples,
    default_rounds,
    disjoint_tuple_max_error,
    enumerate_disjoint_tuples,
    frank_wolfe_project,
    mwem,
    mwem_error_bound,
    projection_mechanism,
    projection_mse_bound,
)
from partialdp.synthetic import bernoulli_product
from partialdp.workloads import Query, Workload, eval_workload, kway_marginal_workload


def _data(d, n, seed):
    return Dataset.from_rows(np.random.default_rng(seed).integers(0, 2, (n, d)), d=d)


# --- Frank-Wolfe ------------------------------------------------------------


def test_fw_vertex_is_fixed_point():
    V = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    res = frank_wolfe_project(V[2], V)
    assert np.allclose(res.point, V[2]) and res.gap == 0.0 and res.iterations == 1


def test_fw_nearest_vertex():
    V = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    assert np.allclose(frank_wolfe_project([2.0, 0.0], V).point, [1.0, 0.0], atol=1e-6)
    seg = np.array([[0.0, 0.0], [1.0, 0.0]])
    assert np.allclose(frank_wolfe_project([1.0, 1.0], seg).point, [1.0, 0.0], atol=1e-6)


def test_fw_interior_projection_matches_qp():
    # projection of (1, 1) onto the simplex hull of e1, e2 and 0 is (0.5, 0.5)
    V = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    res = frank_wolfe_project([1.0, 1.0], V, tol=1e-10)
    assert res.converged and np.allclose(res.point, [0.5, 0.5], atol=1e-5)


def test_fw_iteration_cap_flags():
    V = np.random.default_rng(0).random((200, 6))
    res = frank_wolfe_project(V.mean(axis=0) + 0.01, V, tol=1e-14, max_iters=2)
    assert not res.converged and res.iterations == 2


def test_fw_validation():
    with pytest.raises(ValueError):
        frank_wolfe_project([0.0], np.zeros((0, 1)))
    with pytest.raises(ValueError):
        frank_wolfe_project([0.0, 0.0], np.zeros((2, 1)))


# --- projection mechanism ---------------------------------------------------


def test_projection_zero_noise_is_exact():
    D = _data(5, 40, 1)
    W = kway_marginal_workload(5, 2, "conjunction")
    res = projection_mechanism(D, W, 0.1, RngStream(0), zero_noise=True)
    assert np.allclose(res.answers, eval_workload(W, D), atol=1e-12)


def test_projection_reported_parameters():
    W = kway_marginal_workload(4, 2, "parity")
    res = projection_mechanism(_data(4, 100, 2), W, 0.01, RngStream(0))
    assert res.epsilon == pytest.approx(math.sqrt(6) / (0.01 * 100))
    assert res.epsilon0 == pytest.approx(math.sqrt(3) / (0.01 * 100))
    assert res.epsilon / res.epsilon0 == pytest.approx(math.sqrt(2))


def test_projection_never_increases_error_and_mse_bound():
    d, sigma = 6, 0.05
    W = kway_marginal_workload(d, 2, "parity")
    # sparse rows put Q(x) near a face of the polytope, where projection pays off
    D = bernoulli_product(d, 300, 0.05, 3)
    truth = eval_workload(W, D)
    errs = []
    for i in range(200):
        res = projection_mechanism(D, W, sigma, RngStream(5, [i]))
        after = np.linalg.norm(res.answers - truth)
        before = np.linalg.norm(res.noisy_answers - truth)
        assert after <= before + math.sqrt(1e-6)
        errs.append(after**2 / W.m)
    assert np.mean(errs) <= projection_mse_bound(W, sigma)


def test_projection_is_non_expansive_on_dense_data():
    W = kway_marginal_workload(6, 2, "parity")
    D = _data(6, 300, 9)
    truth = eval_workload(W, D)
    for i in range(50):
        res = projection_mechanism(D, W, 0.05, RngStream(6, [i]))
        assert np.linalg.norm(res.answers - truth) <= np.linalg.norm(res.noisy_answers - truth) + 1e-3


def test_projection_budgets():
    res = projection_mechanism(_data(4, 50, 4), kway_marginal_workload(4, 1), 0.2, RngStream(0))
    z, partial = res.budgets
    assert z.kind == "zcdp" and z.value == pytest.approx(0.5 * res.epsilon**2)
    assert partial.metric.eps0 == pytest.approx(res.epsilon0)


# --- disjoint tuples --------------------------------------------------------


def test_enumerate_disjoint_tuple_examples():
    W = Workload(2, (Query((0,), "parity"), Query((1,), "parity"), Query((0, 1), "parity")))
    assert enumerate_disjoint_tuples(W, 2).tolist() == [[0, 1]]
    assert enumerate_disjoint_tuples(W, 1).tolist() == [[0], [1], [2]]
    assert enumerate_disjoint_tuples(kway_marginal_workload(4, 1), 4).tolist() == [[0, 1, 2, 3]]


def test_tuple_count_and_cap():
    W = kway_marginal_workload(10, 2)
    assert count_disjoint_tuples(W, 5) == 945 == len(enumerate_disjoint_tuples(W, 5))
    with pytest.raises(TupleExplosion):
        enumerate_disjoint_tuples(W, 2, cap=10)


def test_tuple_error_zero_at_empirical():
    D = _data(4, 30, 5)
    W = kway_marginal_workload(4, 2, "parity")
    assert disjoint_tuple_max_error(W, 2, DistributionOverDomain.empirical(D), D) == pytest.approx(0.0)


def test_tuple_error_single_is_sup_norm():
    D = _data(4, 30, 6)
    W = kway_marginal_workload(4, 2, "conjunction")
    A = DistributionOverDomain.uniform(4)
    assert disjoint_tuple_max_error(W, 1, A, D) == pytest.approx(
        np.abs(A.answers(W) - eval_workload(W, D)).max()
    )


@pytest.mark.parametrize("seed", range(5))
def test_tuple_error_matches_oracle(seed):
    g = np.random.default_rng(seed)
    D = _data(4, 25, seed)
    W = kway_marginal_workload(4, 2, "parity")
    p = g.random(16)
    A = DistributionOverDomain(4, p / p.sum())
    assert disjoint_tuple_max_error(W, 2, A, D) == pytest.approx(
        brute_disjoint_tuple_max_error(W, 2, A.probs, D), abs=1e-12
    )


# --- MWEM -------------------------------------------------------------------


def test_mwem_round_budget():
    D = _data(3, 20, 0)
    res = mwem(D, kway_marginal_workload(3, 1), 1.0, 8, 1, RngStream(0))
    assert res.T == 8
    assert 1.0 / math.sqrt(2 * 8) == 0.25
    cdp, z = res.budgets
    assert cdp.metric.eps0 == 1.0 and z.value == pytest.approx(0.5)


def test_mwem_single_update():
    D = Dataset.from_rows([(1,)] * 10)
    W = Workload(1, (Query((0,), "conjunction"),))
    res = mwem(D, W, 1.0, 2, 1, RngStream(0), zero_noise=True, keep_iterates=True)
    assert res.iterates[1][1] == pytest.approx(math.exp(0.25) / (1 + math.exp(0.25)))


def test_mwem_normalized_every_round():
    res = mwem(_data(5, 200, 7), kway_marginal_workload(5, 2), 0.5, 30, 2, RngStream(1), keep_iterates=True)
    for A in res.iterates:
        assert A.min() >= 0 and abs(A.sum() - 1) < 1e-9
    assert np.allclose(res.answers, res.synthetic.answers(kway_marginal_workload(5, 2)))


def _generic_data(d, n, seed):
    # skewed rows so no two queries share a true answer (avoids tie flips)
    g = np.random.default_rng(seed)
    p = g.uniform(0.1, 0.9, d)
    return Dataset.from_rows((g.random((n, d)) < p).astype(int), d=d)


@pytest.mark.parametrize("seed", range(3))
def test_mwem_ell1_matches_standard_mwem(seed):
    D = _generic_data(4, 97, seed)
    W = kway_marginal_workload(4, 2, "conjunction")
    res = mwem(D, W, 1.0, 12, 1, RngStream(seed), zero_noise=True, keep_iterates=True)
    ref = nonprivate_mwem(D, W, 12, 1)
    for A, B in zip(res.iterates, ref):
        assert np.allclose(A, B, atol=1e-12)


@pytest.mark.parametrize("ell", [1, 2])
def test_mwem_noiseless_converges(ell):
    D = _generic_data(4, 200, 11)
    W = kway_marginal_workload(4, 2, "conjunction")
    T = 150
    res = mwem(D, W, 1.0, T, ell, RngStream(0), zero_noise=True, keep_iterates=True)
    target = DistributionOverDomain.empirical(D).probs
    nz = target > 0
    kl = [float(np.sum(target[nz] * np.log(target[nz] / A[nz]))) for A in res.iterates]
    assert all(b <= a + 1e-12 for a, b in zip(kl, kl[1:]))
    limit = math.sqrt(4 * 4 * math.log(2) / (T * ell))
    assert disjoint_tuple_max_error(W, ell, res.synthetic, D) <= limit
    assert mwem_error_bound(T, 10**12, 1.0, 4, ell, W.m) == pytest.approx(limit, rel=1e-6)


def test_mwem_deterministic():
    D = _data(5, 100, 8)
    W = kway_marginal_workload(5, 2)
    a = mwem(D, W, 1.0, 10, 2, RngStream(3)).to_json()
    assert a == mwem(D, W, 1.0, 10, 2, RngStream(3)).to_json()


def test_mwem_validation():
    D = _data(3, 10, 0)
    W = kway_marginal_workload(3, 2)
    with pytest.raises(PreconditionError):
        mwem(D, W, 1.0, 0, 1, RngStream(0))
    with pytest.raises(PreconditionError):
        mwem(D, W, 1.0, 5, 2, RngStream(0))
    with pytest.raises(PreconditionError):
        mwem(Dataset.from_rows([], d=3), W, 1.0, 5, 1, RngStream(0))


def test_default_rounds_clamped():
    assert default_rounds(10, 45, 1.0, 5000, 5) == 200
    assert default_rounds(10, 45, 1e-6, 10, 5) == 1


def test_distribution_validation():
    with pytest.raises(ValueError):
        DistributionOverDomain(2, [0.5, 0.5, 0.5, 0.0])
    with pytest.raises(PreconditionError):
        DistributionOverDomain.uniform(21)
