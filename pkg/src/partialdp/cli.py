"""Command-line experiment harness.

Every subcommand runs ``--trials`` seeded trials (trial ``i`` draws from
``RngStream(seed, [i])``) and writes one row per trial plus aggregate rows,
as JSON or CSV. Exit codes: 0 success, 1 runtime failure, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .accountant import (
    Budget,
    UniformPerAttribute,
    budget_ledger,
    partial_to_standard,
    zcdp_simple_epsilon,
    zcdp_to_approx_dp_tight,
)
from .core import Dataset, RngStream, load_dataset
from .errors import PartialDPError, PreconditionError
from .halfspace import (
    RobustLearnConfig,
    excess_error_bound,
    integer_net,
    learn_halfspace_robust,
    net_resolution,
    robust_error,
)
from .histogram import (
    HeavyHitterParams,
    estimate_distribution,
    hh_utility_shortfall,
    learn_point,
    learn_threshold,
    priv_histogram,
    standard_laplace_max_error,
)
from .release import (
    default_rounds,
    disjoint_tuple_max_error,
    enumerate_disjoint_tuples,
    mwem,
    mwem_error_bound,
    projection_mechanism,
    projection_mse_bound,
)
from .synthetic import (
    bernoulli_product,
    halfspace_distribution,
    planted_dataset,
    point_population_error,
    point_problem,
    sample_cells,
    support_dataset,
    threshold_population_error,
    threshold_problem,
)
from .workloads import diameters, eval_workload, kway_marginal_workload

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2
SUBCOMMANDS = (
    "account", "marginals-projection", "mwem", "heavy-hitters", "learn-point",
    "learn-threshold", "estimate-dist", "learn-halfspace", "sweep",
)
SWEEP_AXES = ("n", "eps0", "d", "k", "nu", "gap")
BUDGET_COLUMNS = ("epsilon", "epsilon0", "rho")


class ConfigError(Exception):
    pass


def _require(cond: bool, msg: str):
    if not cond:
        raise ConfigError(msg)


def _validated(mech, cfg):
    try:
        mech.validate(cfg)
    except ConfigError:
        raise
    except (PartialDPError, KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"{type(e).__name__}: {e}") from e


# --- mechanisms ---------------------------------------------------------------


def _dataset(cfg, r: RngStream, make: Callable[[RngStream], Dataset]) -> Dataset:
    if cfg.get("data"):
        return load_dataset(cfg["data"])
    return make(r)


def _pure_budget(eps0: float, d: int) -> dict:
    return {"epsilon": d * eps0, "epsilon0": eps0, "rho": None}


def _projection_validate(c):
    _require(1 <= c["k"] <= c["d"] <= 16, "projection needs 1 <= k <= d <= 16")
    _require(c["sigma"] > 0, "sigma must be positive")
    _require(c["n"] >= 1, "n must be positive")


def _projection_trial(c, r, zero_noise):
    D = _dataset(c, r.substream(0), lambda s: bernoulli_product(c["d"], c["n"], c["p"], s))
    W = kway_marginal_workload(D.d, c["k"], c["kind"])
    res = projection_mechanism(D, W, c["sigma"], r.substream(1), zero_noise=zero_noise)
    mse = float(np.mean((res.answers - eval_workload(W, D)) ** 2))
    metrics = {"mse": mse, "fw_gap": res.fw_gap, "fw_converged": int(res.converged)}
    return metrics, {"epsilon": res.epsilon, "epsilon0": res.epsilon0, "rho": 0.5 * res.epsilon**2}


def _projection_bound(c):
    return projection_mse_bound(kway_marginal_workload(c["d"], c["k"], c["kind"]), c["sigma"])


def _projection_budget(c):
    _, d0 = diameters(kway_marginal_workload(c["d"], c["k"], c["kind"]))
    return Budget.partial_cdp(UniformPerAttribute(d0 / (c["sigma"] * c["n"]), c["d"]))


def _mwem_validate(c):
    _require(1 <= c["k"] <= c["d"] <= 20, "MWEM needs 1 <= k <= d <= 20")
    _require(c["eps0"] > 0 and c["ell"] >= 1, "need eps0 > 0 and ell >= 1")
    T = c.get("T")
    _require(T is None or (isinstance(T, int) and T >= 1), "T must be a positive integer")
    W = kway_marginal_workload(c["d"], c["k"], c["kind"])
    if len(enumerate_disjoint_tuples(W, c["ell"])) == 0:
        raise ConfigError(f"no attribute-disjoint {c['ell']}-tuple of {c['k']}-way queries on d={c['d']}")


def _mwem_run(c, D, ell, r, zero_noise):
    W = kway_marginal_workload(D.d, c["k"], c["kind"])
    res = mwem(D, W, c["eps0"], c.get("T"), ell, r, zero_noise=zero_noise)
    return res, disjoint_tuple_max_error(W, c["ell"], res.synthetic, D)


def _mwem_trial(c, r, zero_noise):
    D = _dataset(c, r.substream(0), lambda s: bernoulli_product(c["d"], c["n"], c["p"], s))
    res, err = _mwem_run(c, D, c["ell"], r.substream(1), zero_noise)
    metrics = {"tuple_max_error": err, "T": res.T}
    return metrics, {"epsilon": None, "epsilon0": c["eps0"], "rho": 0.5 * (c["ell"] * c["eps0"]) ** 2}


def _mwem_baseline(c, r, zero_noise):
    D = _dataset(c, r.substream(0), lambda s: bernoulli_product(c["d"], c["n"], c["p"], s))
    return _mwem_run(c, D, 1, r.substream(2), zero_noise)[1]


def _mwem_bound(c):
    W = kway_marginal_workload(c["d"], c["k"], c["kind"])
    T = c.get("T") or default_rounds(c["d"], W.m, c["eps0"], c["n"], c["ell"])
    return mwem_error_bound(T, c["n"], c["eps0"], c["d"], c["ell"], W.m)


def _hh_validate(c):
    _require(0 < c["nu"] <= 0.1 and 0 < c["eta"] <= 0.1, "histogram requires nu, eta in (0, 0.1]")
    _require(c["eps"] > 0 and c["n"] >= 1 and 1 <= c["d"] <= 64, "need eps > 0, n >= 1, 1 <= d <= 64")
    _require(sum(c["planted"]) <= 1, "planted frequencies exceed 1")
    p = HeavyHitterParams.for_budget(c["eps"] / 2, c["nu"], c["n"])
    for msg in hh_utility_shortfall(p, c["d"], c["nu"], c["eta"]):
        print(f"warning: heavy-hitter utility precondition fails: {msg}", file=sys.stderr)


def _hh_trial(c, r, zero_noise):
    n = c["n"]
    counts = [math.ceil(f * n) for f in c["planted"]]
    if c.get("data"):
        D, planted = load_dataset(c["data"]), np.zeros((0, 0))
    else:
        D, planted = planted_dataset(c["d"], n, counts, r.substream(0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        h = priv_histogram(D, c["eps"], c["nu"], c["eta"], r.substream(1), zero_noise=zero_noise)
    uniq, cnt = np.unique(D.rows, axis=0, return_counts=True)
    exact = {tuple(int(b) for b in u): int(k) for u, k in zip(uniq, cnt)}
    keys = set(exact) | set(h.entries)
    err = max(abs(h[k] - exact.get(k, 0)) for k in keys)
    need = [tuple(int(b) for b in p) for p, k in zip(planted, counts) if k >= c["nu"] * n]
    recovered = all(p in h for p in need)
    metrics = {
        "max_error": err,
        "max_error_over_n": err / n,
        "recovered": int(recovered),
        "success": int(recovered and err <= c["nu"] * n),
        "list_size": len(h),
    }
    return metrics, _pure_budget(c["eps"], D.d)


def _hh_baseline(c, r, zero_noise):
    return standard_laplace_max_error(c["d"], c["eps"], r.substream(2), zero_noise)


def _hh_bound(c):
    """Count error ``nu n`` at which ``n = 16/(eps nu) ln(d/eta) ln(1/nu)`` holds."""
    d, n, eps, eta = c["d"], c["n"], c["eps"], c["eta"]
    f = lambda nu: 16 / (eps * nu) * math.log(d / eta) * math.log(1 / nu) - n
    try:
        nu = brentq(f, 1e-12, 1 - 1e-12)
    except ValueError:
        return None
    return nu * n


def _point_validate(c):
    _require(0 < c["alpha"] <= 0.1, "alpha must lie in (0, 0.1]")
    _require(1 <= c["d"] <= 63 and c["n"] >= 1 and 0 <= c["p"] <= 1, "need 1 <= d <= 63, n >= 1, p in [0, 1]")


def _point_trial(c, r, zero_noise):
    g = r.substream(0).generator
    u = g.integers(0, 2, c["d"])
    X, y = point_problem(c["d"], c["n"], u, c["p"], g)
    h = learn_point(X, y, c["eps"], c["alpha"], r.substream(1), zero_noise=zero_noise)
    err = point_population_error(u, c["p"], h.u)
    return {"population_error": err, "success": int(err <= c["alpha"])}, _pure_budget(c["eps"], c["d"] + 1)


def _learner_alpha(n, eps, factor):
    f = lambda a: 20 / (a * eps) * factor * math.log(1 / a) - n
    try:
        return brentq(f, 1e-9, 1 - 1e-9)
    except ValueError:
        return None


def _point_bound(c):
    return _learner_alpha(c["n"], c["eps"], math.log(c["d"]))


def _threshold_validate(c):
    _require(0 < c["alpha"] <= 0.1, "alpha must lie in (0, 0.1]")
    _require(2 <= c["d"] <= 62 and c["n"] >= 1, "need 2 <= d <= 62 and n >= 1")


def _threshold_trial(c, r, zero_noise):
    g = r.substream(0).generator
    z = g.integers(0, 2, c["d"])
    X, y = threshold_problem(c["d"], c["n"], z, g)
    fit = learn_threshold(X, y, c["eps"], c["alpha"], r.substream(1),
                          branch_swapped=c["branch_swapped"], zero_noise=zero_noise)
    err = threshold_population_error(z, fit.hypothesis.z, c["d"])
    found = int(fit.prefix.found) if fit.prefix is not None else -1
    metrics = {"population_error": err, "success": int(err <= c["alpha"]), "prefix_found": found}
    return metrics, _pure_budget(c["eps"], c["d"] + 1)


def _threshold_bound(c):
    d = c["d"]
    return _learner_alpha(c["n"], c["eps"], math.log(d) * math.log(math.log(d)))


def _dist_validate(c):
    _require(c["eps"] * c["n"] > math.e, "distribution estimation requires eps * n > e")
    _require(2 <= c["d"] <= 64 and c["support"] >= 1, "need 2 <= d <= 64 and support >= 1")


def _dist_trial(c, r, zero_noise):
    D, support = support_dataset(c["d"], c["n"], c["support"], r.substream(0))
    th = estimate_distribution(D, c["eps"], r.substream(1), C=c["C"], zero_noise=zero_noise)
    truth = {tuple(int(b) for b in s): 1 / len(support) for s in support}
    keys = set(truth) | set(th.entries)
    err = sum((th[k] - truth.get(k, 0.0)) ** 2 for k in keys)
    return {"l2sq_error": err, "listed": len(th)}, _pure_budget(c["eps"], c["d"])


def _dist_bound(c):
    return 50 * (math.log(c["d"]) / (c["eps"] * c["n"]) + 1 / c["n"])


def _halfspace_cfg(c):
    return RobustLearnConfig(c["gamma"], c["gamma_prime"], c["eps"])


def _halfspace_validate(c):
    try:
        cfg = _halfspace_cfg(c)
    except PreconditionError as e:
        raise ConfigError(str(e)) from e
    _require(1 <= len(c["w"]) <= 6, "desk-scale halfspace learning needs 1 <= d <= 6")
    integer_net(len(c["w"]), net_resolution(len(c["w"]), cfg.nu))


def _halfspace_trial(c, r, zero_noise):
    cfg = _halfspace_cfg(c)
    X, y, pr = halfspace_distribution(c["w"], c["flip"])
    S = sample_cells(X, y, pr, c["n"], r.substream(0))
    h = learn_halfspace_robust(S, cfg, r.substream(1), zero_noise=zero_noise)
    metrics = {
        "robust_error_gamma_prime": robust_error(h, X, y, cfg.gamma_prime, pr),
        "robust_error_gamma": robust_error(h, X, y, cfg.gamma, pr),
    }
    return metrics, _pure_budget(c["eps"], len(c["w"]) + 1)


def _halfspace_bound(c):
    return excess_error_bound(_halfspace_cfg(c), c["n"])


@dataclass(frozen=True)
class Mechanism:
    defaults: dict
    metrics: tuple[str, ...]
    validate: Callable
    trial: Callable
    bound: Callable
    budget: Callable
    baseline: Callable | None = None
    eps_key: str = "eps"


MECHANISMS = {
    "marginals-projection": Mechanism(
        {"d": 6, "n": 500, "k": 2, "kind": "parity", "sigma": 0.05, "p": 0.05, "data": None},
        ("mse", "fw_gap", "fw_converged"),
        _projection_validate, _projection_trial, _projection_bound, _projection_budget,
        eps_key="sigma",
    ),
    "mwem": Mechanism(
        {"d": 10, "n": 5000, "k": 2, "kind": "conjunction", "eps0": 1.0, "ell": 5, "T": None,
         "p": 0.3, "data": None},
        ("tuple_max_error", "T"),
        _mwem_validate, _mwem_trial, _mwem_bound,
        lambda c: Budget.partial_cdp(UniformPerAttribute(c["eps0"], c["d"])),
        baseline=_mwem_baseline, eps_key="eps0",
    ),
    "heavy-hitters": Mechanism(
        {"d": 64, "n": 6859, "eps": 1.0, "nu": 0.05, "eta": 0.05,
         "planted": [0.025, 0.05, 0.075, 0.1, 0.15, 0.2], "data": None},
        ("max_error", "max_error_over_n", "recovered", "success", "list_size"),
        _hh_validate, _hh_trial, _hh_bound,
        lambda c: Budget.partial_pure(UniformPerAttribute(c["eps"], c["d"])),
        baseline=_hh_baseline,
    ),
    "learn-point": Mechanism(
        {"d": 32, "n": 1597, "eps": 1.0, "alpha": 0.1, "p": 0.3},
        ("population_error", "success"),
        _point_validate, _point_trial, _point_bound,
        lambda c: Budget.partial_pure(UniformPerAttribute(c["eps"], c["d"] + 1)),
    ),
    "learn-threshold": Mechanism(
        {"d": 16, "n": 1303, "eps": 1.0, "alpha": 0.1, "branch_swapped": True},
        ("population_error", "success", "prefix_found"),
        _threshold_validate, _threshold_trial, _threshold_bound,
        lambda c: Budget.partial_pure(UniformPerAttribute(c["eps"], c["d"] + 1)),
    ),
    "estimate-dist": Mechanism(
        {"d": 64, "n": 10000, "eps": 1.0, "support": 8, "C": 4.0},
        ("l2sq_error", "listed"),
        _dist_validate, _dist_trial, _dist_bound,
        lambda c: Budget.partial_pure(UniformPerAttribute(c["eps"], c["d"])),
    ),
    "learn-halfspace": Mechanism(
        {"w": [3, -2, 2, 1, 1], "flip": 0.05, "n": 2000, "gamma": 0.6, "gamma_prime": 0.2, "eps": 2.0},
        ("robust_error_gamma_prime", "robust_error_gamma"),
        _halfspace_validate, _halfspace_trial, _halfspace_bound,
        lambda c: Budget.partial_pure(UniformPerAttribute(c["eps"], len(c["w"]) + 1)),
    ),
}


# --- running and reporting ----------------------------------------------------


def _merge_config(name: str, file_cfg: dict, overrides: dict) -> dict:
    mech = MECHANISMS[name]
    cfg = dict(mech.defaults)
    unknown = set(file_cfg) - set(cfg)
    _require(not unknown, f"unknown config keys for {name}: {sorted(unknown)}")
    cfg.update(file_cfg)
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    return cfg


def experiment_config(name: str, **overrides) -> dict:
    """Defaults of subcommand ``name`` updated with ``overrides``."""
    _require(name in MECHANISMS, f"unknown mechanism {name}")
    return _merge_config(name, overrides, {})


def _run_trials(name, cfg, seed, trials, zero_noise, jobs, timing):
    mech = MECHANISMS[name]

    def one(i):
        t0 = time.perf_counter()
        r = RngStream(seed, [i])
        metrics, budget = mech.trial(cfg, r, zero_noise)
        row = {"trial_index": i, "seed_path": f"{seed}/{i}"}
        row.update({k: metrics.get(k) for k in mech.metrics})
        row.update({k: budget.get(k) for k in BUDGET_COLUMNS})
        if timing:
            row["wall_time"] = time.perf_counter() - t0
        return row

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(one, range(trials)))
    return [one(i) for i in range(trials)]


def _aggregate(rows, columns):
    out = []
    for stat in ("mean", "std", "q05", "q50", "q95"):
        agg = {"trial_index": stat, "seed_path": ""}
        for col in columns:
            vals = np.array([r[col] for r in rows if r.get(col) is not None], dtype=float)
            if vals.size == 0:
                agg[col] = None
                continue
            if stat == "mean":
                agg[col] = float(vals.mean())
            elif stat == "std":
                agg[col] = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
            else:
                agg[col] = float(np.quantile(vals, int(stat[1:]) / 100))
        out.append(agg)
    return out


def _columns(name, timing):
    cols = list(MECHANISMS[name].metrics) + list(BUDGET_COLUMNS)
    return cols + (["wall_time"] if timing else [])


def run_experiment(name, cfg, seed, trials, zero_noise=False, jobs=1, timing=False,
                   validate=True) -> dict:
    mech = MECHANISMS[name]
    _require(trials >= 1, "trials must be positive")
    if validate:
        _validated(mech, cfg)
    rows = _run_trials(name, cfg, seed, trials, zero_noise, jobs, timing)
    budget = mech.budget(cfg)
    d = budget.metric.d
    return {
        "subcommand": name,
        "config": cfg,
        "seed": seed,
        "zero_noise": zero_noise,
        "columns": ["trial_index", "seed_path"] + _columns(name, timing),
        "trials": rows,
        "aggregate": _aggregate(rows, _columns(name, timing)),
        "bound": mech.bound(cfg),
        "ledger": budget_ledger(budget, d),
    }


def _axis_key(name: str, axis: str) -> str:
    if axis == "eps0":
        return MECHANISMS[name].eps_key
    if axis == "gap":
        return "gamma_prime"
    return axis


def sweep(cfg: dict, seed: int, trials: int, zero_noise=False, jobs=1) -> dict:
    """One aggregate row per grid value, with the bound and (where defined) baseline columns."""
    name = cfg.get("mechanism")
    _require(name in MECHANISMS, f"sweep mechanism must be one of {sorted(MECHANISMS)}")
    axis = cfg.get("axis")
    _require(axis in SWEEP_AXES, f"sweep axis must be one of {SWEEP_AXES}")
    values = cfg.get("values") or []
    _require(len(values) > 0, "sweep grid is empty")
    base = _merge_config(name, cfg.get("base", {}), {})
    key = _axis_key(name, axis)
    _require(key in base, f"{name} has no parameter for axis {axis}")
    grid = []
    for v in values:
        c = dict(base)
        if axis == "gap":
            c["gamma_prime"] = c["gamma"] - v
        elif axis == "eps0" and name == "marginals-projection":
            _, d0 = diameters(kway_marginal_workload(c["d"], c["k"], c["kind"]))
            c["sigma"] = d0 / (v * c["n"])
        else:
            c[key] = v
        if name == "heavy-hitters" and axis == "d":
            c["data"] = None
        _validated(MECHANISMS[name], c)
        grid.append(c)
    rows = []
    mech = MECHANISMS[name]
    for v, c in zip(values, grid):
        rep = run_experiment(name, c, seed, trials, zero_noise, jobs, validate=False)
        row = {"axis": axis, "value": v}
        row.update({f"mean_{k}": rep["aggregate"][0][k] for k in mech.metrics})
        row.update({f"std_{k}": rep["aggregate"][1][k] for k in mech.metrics})
        row["bound"] = rep["bound"]
        if mech.baseline is not None:
            base_vals = [mech.baseline(c, RngStream(seed, [i]), zero_noise) for i in range(trials)]
            row["baseline_mean"] = float(np.mean(base_vals))
        rows.append(row)
    cols = list(rows[0].keys())
    return {"subcommand": "sweep", "config": cfg, "seed": seed, "columns": cols, "rows": rows}


def account(args) -> dict:
    out = {}
    if args.rho is not None:
        _require(args.rho > 0 and 0 < args.delta < 1, "need rho > 0 and delta in (0, 1)")
        out = {
            "rho": args.rho,
            "delta": args.delta,
            "epsilon": zcdp_to_approx_dp_tight(args.rho, args.delta),
            "epsilon_simple": zcdp_simple_epsilon(args.rho, args.delta),
        }
    elif args.eps0 is not None:
        _require(args.d is not None and args.d >= 1, "--eps0 needs --d")
        b = (Budget.partial_cdp if args.kind == "cdp" else Budget.partial_pure)(
            UniformPerAttribute(args.eps0, args.d)
        )
        out = budget_ledger(b, args.d, args.delta)
        out["per_person"] = partial_to_standard(b, args.d).to_dict()
    else:
        raise ConfigError("account needs --rho or --eps0")
    return out


# --- output -------------------------------------------------------------------


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if report.get("subcommand") == "sweep":
        w.writerow(report["columns"])
        for row in report["rows"]:
            w.writerow([_fmt(row.get(c)) for c in report["columns"]])
    elif "columns" in report:
        w.writerow(report["columns"])
        for row in report["trials"] + report["aggregate"]:
            w.writerow([_fmt(row.get(c)) for c in report["columns"]])
    else:
        flat = {k: v for k, v in report.items() if not isinstance(v, dict)}
        w.writerow(list(flat))
        w.writerow([_fmt(v) for v in flat.values()])
    return buf.getvalue()


OPTIONAL_INT_KEYS = ("T",)
SUBCOMMAND_HELP = {
    "marginals-projection": "k-way marginals by Gaussian noise and projection",
    "mwem": "k-way marginals by multiplicative weights over disjoint tuples",
    "heavy-hitters": "sparse histogram of planted records",
    "learn-point": "point-function learner",
    "learn-threshold": "threshold learner over lexicographic order",
    "estimate-dist": "sparse distribution estimate",
    "learn-halfspace": "Hamming-robust halfspace learner",
}


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with parameters")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=1)
    common.add_argument("--out", default="-", help="output path, '-' for stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--zero-noise", action="store_true")
    common.add_argument("--test-harness", action="store_true")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--timing", action="store_true", help="add a wall_time column")
    p = argparse.ArgumentParser(prog="partialdp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("account", parents=[common], help="convert budgets")
    a.add_argument("--rho", type=float)
    a.add_argument("--delta", type=float, default=1e-6)
    a.add_argument("--eps0", type=float)
    a.add_argument("--d", type=int)
    a.add_argument("--kind", choices=("pure", "cdp"), default="pure")
    for name, mech in MECHANISMS.items():
        sp = sub.add_parser(name, parents=[common], help=SUBCOMMAND_HELP[name])
        for key, val in mech.defaults.items():
            if isinstance(val, bool):
                sp.add_argument(f"--{key.replace('_', '-')}", type=lambda s: s.lower() in ("1", "true", "yes"),
                                dest=key, default=None)
            elif isinstance(val, (int, float)) and not isinstance(val, bool):
                sp.add_argument(f"--{key.replace('_', '-')}", type=type(val), dest=key, default=None)
            elif isinstance(val, list):
                sp.add_argument(f"--{key.replace('_', '-')}", type=json.loads, dest=key, default=None,
                                help="JSON list")
            elif key in OPTIONAL_INT_KEYS:
                sp.add_argument(f"--{key.replace('_', '-')}", type=int, dest=key, default=None)
            elif isinstance(val, str) or val is None:
                sp.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None)
    sub.add_parser("sweep", parents=[common], help="one mechanism over a grid of one parameter")
    return p


def _load_config(path):
    if not path:
        return {}
    try:
        with open(path) as f:
            cfg = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    _require(isinstance(cfg, dict), "config must be a JSON object")
    return cfg


def run(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    try:
        if args.zero_noise and not args.test_harness:
            raise ConfigError("--zero-noise is only accepted together with --test-harness")
        _require(args.jobs >= 1, "--jobs must be positive")
        file_cfg = _load_config(args.config)
        if args.command == "account":
            report = account(args)
        elif args.command == "sweep":
            report = sweep(file_cfg, args.seed, args.trials, args.zero_noise, args.jobs)
        else:
            overrides = {k: getattr(args, k, None) for k in MECHANISMS[args.command].defaults}
            cfg = _merge_config(args.command, file_cfg, overrides)
            report = run_experiment(args.command, cfg, args.seed, args.trials,
                                    args.zero_noise, args.jobs, args.timing)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as e:  # noqa: BLE001 - any failure after validation is a runtime error
        print(f"runtime error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    text = render(report, args.format)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as f:
            f.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


__all__ = [
    "ConfigError", "MECHANISMS", "account", "experiment_config", "render", "run", "run_experiment", "sweep",
]
