"""Acceptance suite.

Each criterion prints one ``PASS`` or ``FAIL`` line, followed by indented
``info`` lines with the measured numbers. Tolerances are pinned below and are
never adjusted to make a line green. Run under pytest (the lines are repeated
in the terminal summary) or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import contextlib
import io
import itertools
import json
import math
import sys
import time
import warnings

import numpy as np
import pytest

from partialdp.cli import experiment_config, run, run_experiment, sweep
from partialdp.core import Dataset, RngStream, all_records
from partialdp.halfspace import (
    Halfspace,
    RobustLearnConfig,
    cell_examples,
    dec_many,
    excess_error_bound,
    integer_net,
    learn_halfspace_robust,
    loss_from_dec,
    loss_sensitivity,
    net_profiles,
    net_resolution,
)
from partialdp.histogram import (
    HeavyHitterParams,
    ThresholdHypothesis,
    histogram_sample_bound,
    learn_point,
    learn_threshold,
    priv_heavy_hitter,
)
from partialdp.oracle import (
    brute_cell_robust_indicators,
    brute_dec,
    brute_net_robust_errors,
    mc_privacy_ratio,
    neighbor_distance,
    ratio_violations,
)
from partialdp.release import projection_mechanism, projection_mse_bound
from partialdp.synthetic import bernoulli_product, halfspace_distribution, sample_cells
from partialdp.workloads import diameters, eval_workload, kway_marginal_workload

SEED = 20240601

CONVERSION_REL_TOL = 0.02
PROJECTION_TRIALS = 200
MWEM_TRIALS = 50
HH_TRIALS = 200
HH_SUCCESS_RATE = 0.95
HH_LIST_FACTOR = 1.5
PRIVACY_TRIALS = 1_000_000
SWEEP_TRIALS = 50
SWEEP_SPREAD = 2.0
LEARNER_TRIALS = 100
LEARNER_SUCCESS_RATE = 0.90
DIST_TRIALS = 100
DEC_INSTANCES = 10_000
HALFSPACE_TRIALS = 100

LIMITS = {1: 1, 2: 120, 3: 600, 4: 300, 5: 300, 6: 600, 7: 600, 8: 120, 9: 300, 10: 600}

ACCEPTANCE_LINES: list[str] = []


def _emit(line: str):
    ACCEPTANCE_LINES.append(line)
    print(line)


def _verdict(num: int, title: str, ok: bool, summary: str, info: list[str], seconds: float):
    in_time = seconds < LIMITS[num]
    tag = "PASS" if ok and in_time else "FAIL"
    _emit(f"{tag} [{num:2d}] {title}: {summary} ({seconds:.1f}s, limit {LIMITS[num]}s)")
    for line in info:
        _emit(f"     info: {line}")
    if not in_time:
        _emit("     info: runtime limit exceeded")
    return ok and in_time


def _quiet(fn, *args, **kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return fn(*args, **kwargs)


# --- 1 ------------------------------------------------------------------------


def census_conversion():
    info, ok = [], True
    for rho, target in ((2.63, 13.8), (1.02, 7.85)):
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            code = run(["account", "--rho", str(rho), "--delta", "1e-6"])
        rep = json.loads(buf.getvalue())
        eps = rep["epsilon"]
        good = code == 0 and abs(eps - target) <= CONVERSION_REL_TOL * target
        ok &= good
        info.append(f"rho={rho}: eps={eps:.4f} vs {target} (rel {abs(eps - target) / target:.4f});"
                    f" simple inverse {rep['epsilon_simple']:.3f}")
    return ok, "both conversions within 2%" if ok else "conversion off target", info


# --- 2 ------------------------------------------------------------------------


def projection_mechanism_mse():
    d, n, k = 6, 500, 2
    W = kway_marginal_workload(d, k, "parity")
    delta, delta0 = diameters(W)
    info, ok = [], True
    for sigma in (0.02, 0.05):
        mses, ratios = [], set()
        for i in range(PROJECTION_TRIALS):
            r = RngStream(SEED, [2, i])
            D = bernoulli_product(d, n, 0.05, r.substream(0))
            res = projection_mechanism(D, W, sigma, r.substream(1))
            mses.append(float(np.mean((res.answers - eval_workload(W, D)) ** 2)))
            ratios.add(res.epsilon / res.epsilon0)
        bound = projection_mse_bound(W, sigma)
        mean = float(np.mean(mses))
        exact = all(math.isclose(q, math.sqrt(d / k), rel_tol=1e-12) for q in ratios)
        ok &= mean <= bound and exact
        info.append(f"sigma={sigma}: mean MSE {mean:.3e} <= bound {bound:.3e}: {mean <= bound};"
                    f" eps/eps0 = {min(ratios):.12f} (sqrt(3) = {math.sqrt(3):.12f})")
    info.append(f"Delta={delta:.4f}, Delta0={delta0:.4f}, m={W.m}; data are Bernoulli(0.05) rows")
    # same check on dense rows, where the truth sits inside the polytope and projection rarely helps
    dense = []
    for i in range(PROJECTION_TRIALS):
        r = RngStream(SEED, [2, 1, i])
        D = bernoulli_product(d, n, 0.5, r.substream(0))
        res = projection_mechanism(D, W, 0.05, r.substream(1))
        dense.append(float(np.mean((res.answers - eval_workload(W, D)) ** 2)))
    info.append(f"not scored: Bernoulli(0.5) rows at sigma=0.05 give mean MSE {np.mean(dense):.3e}"
                f" vs bound {projection_mse_bound(W, 0.05):.3e}")
    return ok, "mean MSE under the bound for both sigmas" if ok else "bound violated", info


# --- 3 ------------------------------------------------------------------------


def mwem_tuple_error():
    cfg = experiment_config("mwem")
    rep = run_experiment("mwem", cfg, SEED, MWEM_TRIALS, validate=False)
    mean = rep["aggregate"][0]["tuple_max_error"]
    T = int(rep["aggregate"][0]["T"])
    ok = mean <= rep["bound"]
    info = [
        f"mean disjoint-tuple max error {mean:.4f} (q95 {rep['aggregate'][4]['tuple_max_error']:.4f})"
        f" vs bound {rep['bound']:.4f} at T={T}",
        f"d=10, 2-way conjunctions, ell=5, eps0=1, n=5000, Bernoulli(0.3) rows",
    ]
    return ok, f"{mean:.4f} <= {rep['bound']:.4f}" if ok else f"{mean:.4f} > {rep['bound']:.4f}", info


# --- 4 ------------------------------------------------------------------------


def heavy_hitters_utility():
    d, nu, eta, eps = 64, 0.05, 0.05, 1.0
    n = math.ceil(16 / (eps * nu) * math.log(d / eta) * math.log(1 / nu))
    cfg = experiment_config("heavy-hitters", n=n)
    rep = run_experiment("heavy-hitters", cfg, SEED, HH_TRIALS, validate=False)
    agg = rep["aggregate"][0]
    rate, list_mean = agg["success"], agg["list_size"]
    list_cap = HH_LIST_FACTOR * 8 / nu
    ok = rate >= HH_SUCCESS_RATE and list_mean <= list_cap
    p = HeavyHitterParams.for_budget(eps / 2, nu, n)
    info = [
        f"n={n}: success {rate:.3f} (recovered {agg['recovered']:.3f}), mean max error"
        f" {agg['max_error']:.1f} vs nu n = {nu * n:.1f}",
        f"mean list size {list_mean:.2f} <= {list_cap:.0f}: {list_mean <= list_cap}",
        f"top-level threshold {p.threshold(6):.1f} (tau={p.tau:.1f}, mu={p.mu:.1f}, lam={p.lam:.2f})"
        f" exceeds nu n, so items near nu n are rarely listed",
        f"explicit sample bound for this (d, eps, nu, eta): n >= {histogram_sample_bound(d, eps, nu, eta):.0f}",
    ]
    for mult in (1.5, 2.0):
        big = experiment_config("heavy-hitters", n=math.ceil(mult * n))
        r2 = run_experiment("heavy-hitters", big, SEED, 100, validate=False)["aggregate"][0]
        info.append(f"not scored: n={big['n']} ({mult}x) gives success {r2['success']:.2f}")
    return ok, f"success {rate:.3f} (need {HH_SUCCESS_RATE})", info


# --- 5 ------------------------------------------------------------------------


def heavy_hitters_privacy():
    eps = 2.0
    base = HeavyHitterParams.for_budget(eps, 0.1, 3)
    D = Dataset.from_rows([(0, 0), (0, 1), (1, 1)])
    cases = [("tau=nu n/2, row 00->10", base, D.replace_row(0, (1, 0)))]
    info, ok = [], True
    for k, (label, params, D2) in enumerate(cases):
        dist = neighbor_distance(D, D2)
        est = mc_privacy_ratio(lambda data, s: priv_heavy_hitter(data, params, s), D, D2,
                               PRIVACY_TRIALS, RngStream(SEED, [5, k]))
        bad = ratio_violations(est, eps * dist)
        ok &= not bad
        frequent = [e for e in est if e.frequent()]
        worst = max(frequent, key=lambda e: abs(e.log_ratio))
        info.append(f"{label} (distance {dist}): {len(frequent)}/{len(est)} frequent events, worst"
                    f" |log ratio| {abs(worst.log_ratio):.3f} +- {worst.stderr:.3f} vs {eps * dist}"
                    f"; violations {len(bad)}")
    info.append(f"eps={eps}, lam={base.lam:.3f}, mu={base.mu:.3f}, tau={base.tau:.2f}")
    return ok, "no frequent event exceeds eps * distance + 3 stderr" if ok else "violation", info


# --- 6 ------------------------------------------------------------------------


def separation_sweep():
    n, ds = 20_000, [8, 16, 32, 64]
    planted = [c / n for c in range(20, 820, 20)]
    cfg = {"mechanism": "heavy-hitters", "axis": "d", "values": ds,
           "base": {"n": n, "eps": 1.0, "nu": 0.01, "eta": 0.05, "planted": planted}}
    with contextlib.redirect_stderr(io.StringIO()):
        rep = sweep(cfg, SEED, SWEEP_TRIALS)
    hh = np.array([row["mean_max_error"] for row in rep["rows"]])
    base = np.array([row["baseline_mean"] for row in rep["rows"]])
    log_d = np.log2(ds)
    per_log = hh / log_d
    per_d = base / np.array(ds)
    hh_ok = per_log.max() / per_log.min() <= SWEEP_SPREAD
    base_ok = per_d.max() / per_d.min() <= SWEEP_SPREAD
    slope_hh = np.polyfit(np.log(ds), np.log(hh), 1)[0]
    slope_base = np.polyfit(np.log(ds), np.log(base), 1)[0]
    info = [
        "d:               " + "  ".join(f"{d:8d}" for d in ds),
        "heavy hitters:   " + "  ".join(f"{v:8.2f}" for v in hh),
        "  / log2 d:      " + "  ".join(f"{v:8.2f}" for v in per_log),
        "Laplace baseline:" + "  ".join(f"{v:8.2f}" for v in base),
        "  / d:           " + "  ".join(f"{v:8.3f}" for v in per_d),
        f"error/log2 d spread {per_log.max() / per_log.min():.2f}, baseline/d spread"
        f" {per_d.max() / per_d.min():.2f} (limit {SWEEP_SPREAD})",
        f"log-log slopes: heavy hitters {slope_hh:.2f}, baseline {slope_base:.2f}",
    ]
    a, b = per_log.mean(), per_d.mean()
    if hh[-1] > base[-1]:
        cross = next(2**k for k in range(7, 40) if b * 2**k > a * k)
        info.append(f"not scored: heavy hitters are larger in absolute terms on this grid; fits"
                    f" {a:.1f} log2 d and {b:.2f} d cross before d = {cross}")
    ok = bool(hh_ok and base_ok)
    return ok, "heavy hitters track log d, baseline tracks d" if ok else "shape check failed", info


# --- 7 ------------------------------------------------------------------------


def _realizable(d, n_max, label):
    recs = [tuple(r) for r in all_records(d).tolist()]
    for n in range(1, n_max + 1):
        for ms in itertools.combinations_with_replacement(range(len(recs)), n):
            X = np.array([recs[i] for i in ms], dtype=np.uint8)
            for t in recs:
                yield X, label(X, t)


def learners():
    info, ok = [], True
    point_p = (0.0, 0.05, 0.1, 0.15, 0.2, 0.3, 0.5)
    cfg = experiment_config("learn-point")
    rates = {}
    for p in point_p:
        rep = _quiet(run_experiment, "learn-point", {**cfg, "p": p}, SEED, LEARNER_TRIALS, validate=False)
        rates[p] = rep["aggregate"][0]["success"]
    point_ok = min(rates.values()) >= LEARNER_SUCCESS_RATE
    info.append(f"point, d={cfg['d']} n={cfg['n']} alpha={cfg['alpha']}: success by mass p on the target: "
                + ", ".join(f"{p}: {v:.2f}" for p, v in rates.items()))
    thr_cfg = experiment_config("learn-threshold")
    rep = _quiet(run_experiment, "learn-threshold", thr_cfg, SEED, LEARNER_TRIALS, validate=False)
    thr_rate = rep["aggregate"][0]["success"]
    found = np.mean([row["prefix_found"] == 1 for row in rep["trials"]])
    thr_ok = thr_rate >= LEARNER_SUCCESS_RATE
    info.append(f"threshold, d={thr_cfg['d']} n={thr_cfg['n']}: success {thr_rate:.2f},"
                f" polarizing prefix found in {found:.2f} of trials")

    point_exact = all(
        (learn_point(X, y, 1.0, 0.1, RngStream(0), zero_noise=True).predict(X) == y).all()
        for X, y in _realizable(3, 6, lambda X, u: (X == np.array(u)).all(axis=1).astype(np.uint8))
    )
    thr_exact = all(
        (learn_threshold(X, y, 1.0, 0.1, RngStream(0), zero_noise=True).hypothesis.predict(X) == y).all()
        for X, y in _realizable(3, 6, lambda X, z: ThresholdHypothesis(z).predict(X))
    )
    info.append(f"zero noise, d=3, n<=6, every realizable sample: point exact {point_exact},"
                f" threshold exact {thr_exact}")
    for n in (20_000, 100_000):
        pr = [_quiet(run_experiment, "learn-point", {**cfg, "p": p, "n": n}, SEED, 50,
                     validate=False)["aggregate"][0]["success"] for p in (0.1, 0.15)]
        tr = _quiet(run_experiment, "learn-threshold", {**thr_cfg, "n": n}, SEED, 50,
                    validate=False)["aggregate"][0]["success"]
        info.append(f"not scored: n={n}, 50 trials: point p=0.1 {pr[0]:.2f}, p=0.15 {pr[1]:.2f};"
                    f" threshold {tr:.2f}")
    ok = bool(point_ok and thr_ok and point_exact and thr_exact)
    parts = [f"point min success {min(rates.values()):.2f}", f"threshold {thr_rate:.2f}",
             f"exhaustive {'ok' if point_exact and thr_exact else 'failed'}"]
    return ok, ", ".join(parts) + f" (need {LEARNER_SUCCESS_RATE})", info


# --- 8 ------------------------------------------------------------------------


def distribution_estimation():
    cfg = experiment_config("estimate-dist")
    rep = run_experiment("estimate-dist", cfg, SEED, DIST_TRIALS, validate=False)
    mean = rep["aggregate"][0]["l2sq_error"]
    ok = mean <= rep["bound"]
    info = [f"mean l2^2 error {mean:.3e} vs bound {rep['bound']:.3e}; mean listed"
            f" {rep['aggregate'][0]['listed']:.2f} of {cfg['support']} support records"]
    return ok, f"{mean:.3e} <= {rep['bound']:.3e}" if ok else f"{mean:.3e} > {rep['bound']:.3e}", info


# --- 9 ------------------------------------------------------------------------


def halfspace_oracles():
    info = []
    g = np.random.default_rng(SEED)
    mismatches = 0
    for _ in range(DEC_INSTANCES):
        d = int(g.integers(1, 9))
        w = g.integers(-4, 5, d).astype(float)
        if g.random() < 0.5:
            w = w + g.normal(0, 0.3, d)
        x = g.choice([-1, 1], d)
        y = int(g.choice([-1, 1]))
        mismatches += int(dec_many(x[None, :], [y], w)[0] != brute_dec(x.tolist(), y, w.tolist()))
    dec_ok = mismatches == 0
    info.append(f"greedy vs exhaustive dec on {DEC_INSTANCES} instances (d<=8, integer and real weights):"
                f" {mismatches} mismatches")

    sandwich_ok = sens_ok = literal_ok = True
    worst_gap = 0.0
    for gamma, gp in ((0.6, 0.2), (0.75, 0.25)):
        for d in range(1, 6):
            res = net_resolution(d, (gamma - gp) / 5)
            prof = net_profiles(d, res)
            X, y = cell_examples(d)
            loss = loss_from_dec(prof.decs, gamma, gp, d)
            net = integer_net(d, res)
            # sandwich for every net point against explicit Hamming balls
            for s in range(0, net.shape[0], 1 << 16):
                rows = net[s:s + (1 << 16)]
                lo = brute_cell_robust_indicators(rows, X, y, gp)
                hi = brute_cell_robust_indicators(rows, X, y, gamma)
                L = loss[prof.members[s:s + rows.shape[0]]]
                sandwich_ok &= bool((lo <= L + 1e-12).all() and (L <= hi + 1e-12).all())
            # one attribute of one record: the per-record terms differ on one cell pair
            bound = 2 * loss_sensitivity(gamma, gp, d)
            cell_of = {(tuple(x), int(lab)): i for i, (x, lab) in enumerate(zip(X.tolist(), y.tolist()))}
            for j in range(d):
                Xf = X.copy()
                Xf[:, j] *= -1
                partner = np.array([cell_of[(tuple(x), int(lab))] for x, lab in zip(Xf.tolist(), y.tolist())])
                gap = np.abs(loss - loss[:, partner]).max()
                worst_gap = max(worst_gap, gap / bound)
                sens_ok &= bool(gap <= bound + 1e-12)
            if d <= 3:
                literal_ok &= _literal_sensitivity(X, y, loss, cell_of, bound)
    info.append(f"loss sandwich R_g' <= L <= R_g on every cell for every net point, d=1..5,"
                f" (g, g') in {{(0.6, 0.2), (0.75, 0.25)}}: {sandwich_ok}")
    info.append(f"per-attribute sensitivity of |S| L, d=1..5, any n: worst change / (2/((g-g')d))"
                f" = {worst_gap:.3f}; literal multiset enumeration d<=3, n<=4: {literal_ok}")
    ok = bool(dec_ok and sandwich_ok and sens_ok and literal_ok)
    return ok, "greedy dec, sandwich and sensitivity all exact" if ok else "oracle mismatch", info


def _literal_sensitivity(X, y, loss, cell_of, bound) -> bool:
    cells, d = len(y), X.shape[1]
    for n in range(1, 5):
        for ms in itertools.combinations_with_replacement(range(cells), n):
            base = loss[:, list(ms)].sum(axis=1)
            for i, c in enumerate(ms):
                for j in range(d):
                    x = X[c].copy()
                    x[j] *= -1
                    moved = base - loss[:, c] + loss[:, cell_of[(tuple(x.tolist()), int(y[c]))]]
                    if np.abs(moved - base).max() > bound + 1e-12:
                        return False
    return True


# --- 10 -----------------------------------------------------------------------


def halfspace_excess_error():
    cfg = experiment_config("learn-halfspace")
    lc = RobustLearnConfig(cfg["gamma"], cfg["gamma_prime"], cfg["eps"])
    d = len(cfg["w"])
    X, y, pr = halfspace_distribution(cfg["w"], cfg["flip"])
    res = net_resolution(d, lc.nu)
    prof = net_profiles(d, res)
    net = integer_net(d, res)
    inf_gamma = float(brute_net_robust_errors(net, X, y, pr, lc.gamma).min())
    inf_gamma_prime = float(brute_net_robust_errors(net, X, y, pr, lc.gamma_prime).min())
    excess = []
    for i in range(HALFSPACE_TRIALS):
        r = RngStream(SEED, [10, i])
        S = sample_cells(X, y, pr, cfg["n"], r.substream(0))
        h = learn_halfspace_robust(S, lc, r.substream(1))
        err = float(brute_net_robust_errors(np.array([h.w]), X, y, pr, lc.gamma_prime)[0])
        excess.append(err - inf_gamma)
    mean = float(np.mean(excess))
    bound = excess_error_bound(lc, cfg["n"])
    truth = Halfspace(tuple(cfg["w"]))
    info = [
        f"mean excess {mean:.4f} (max {max(excess):.4f}) vs bound {bound:.4f}",
        f"not scored: learner mean R_gamma' {mean + inf_gamma:.4f}; best R_gamma' over the net"
        f" {inf_gamma_prime:.4f}",
        f"inf over {prof.members.size} net points ({prof.decs.shape[0]} dec profiles) of R_gamma ="
        f" {inf_gamma:.4f}; target w has R_gamma"
        f" {brute_net_robust_errors(np.array([truth.w]), X, y, pr, lc.gamma)[0]:.4f}",
        "at gamma d = 3 flips of 5 every non-constant halfspace is fragile on most cells,"
        " so the infimum sits at the constant classifier",
    ]
    return mean <= bound, f"{mean:.4f} <= {bound:.4f}" if mean <= bound else f"{mean:.4f} > {bound:.4f}", info


CRITERIA = {
    1: ("census conversion", census_conversion),
    2: ("projection mechanism", projection_mechanism_mse),
    3: ("MWEM", mwem_tuple_error),
    4: ("heavy hitters utility", heavy_hitters_utility),
    5: ("heavy hitters privacy smoke", heavy_hitters_privacy),
    6: ("separation sweep", separation_sweep),
    7: ("learners", learners),
    8: ("distribution estimation", distribution_estimation),
    9: ("halfspace oracle equivalence", halfspace_oracles),
    10: ("halfspace excess error", halfspace_excess_error),
}


def check(num: int) -> bool:
    title, fn = CRITERIA[num]
    t0 = time.perf_counter()
    ok, summary, info = fn()
    return _verdict(num, title, bool(ok), summary, info, time.perf_counter() - t0)


@pytest.mark.acceptance
@pytest.mark.parametrize("num", sorted(CRITERIA), ids=lambda k: f"{k:02d}-{CRITERIA[k][0].replace(' ', '-')}")
def test_criterion(num):
    assert check(num)


if __name__ == "__main__":
    picked = [int(a) for a in sys.argv[1:]] or sorted(CRITERIA)
    results = [check(k) for k in picked]
    sys.exit(0 if all(results) else 1)
