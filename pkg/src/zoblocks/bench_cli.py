"""Configuration-driven benchmark runner.

Reads a JSON experiment config, executes seeded replications of one solver
(or its two-phase wrapper) in parallel, and writes three artifacts into the
output directory:

  manifest.json          resolved configuration, including derived schedules
  trajectory_<seed>.csv  per-iterate rows: iter, block, metric columns,
                         cumulative oracle calls
  summary.json           per-metric statistics at the output iterate, bound
                         values, and pass/fail dominance checks

Outputs are byte-identical for identical configs regardless of --jobs: every
replication derives its randomness from its own seed, and workers return
results that the parent writes in seed order.

Exit codes: 0 success, 1 config error, 2 runtime/solver error,
3 failed dominance check under --check.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import (BoundInputs, bound_rhs, fw_gap, gen_fw_gap,
                          grad_mapping_sq, smoothed_gap_upper, suboptimality,
                          weighted_dist_sq)
from .errors import ConfigError
from .oracle import NoiseModel, SmoothedOracle
from .problems import make_problem
from .solvers import (ALGORITHMS, Lipschitz, SolverConfig, TwoPhaseConfig,
                      bcd_optimal_dtilde, output_distribution, run_solver,
                      schedule_zs_bcd_convex, schedule_zs_bcd_corollary,
                      schedule_zs_bccg_approx, schedule_zs_bccg_budget,
                      schedule_zs_bccg_composite, schedule_zs_bmd, two_phase)

METRIC_NAMES = ("value", "composite_value", "grad_mapping_sq", "fw_gap",
                "gen_fw_gap", "suboptimality", "composite_suboptimality",
                "weighted_dist_sq")

_AUTO_BOUND = {
    "zs_bcd": ("bcd_grad_sq", "grad_mapping_sq"),
    "zs_bcd_convex": ("bcd_convex_gap", "suboptimality"),
    "zs_bmd": ("bmd_mapping_sq", "grad_mapping_sq"),
    "zs_bccg_smooth": ("bccg_gap", "fw_gap"),
    "zs_bccg_composite": ("bccg_composite_gap", "gen_fw_gap"),
    "zs_bccg_approx": ("bccg_approx_mapping_sq", "grad_mapping_sq"),
}


def _fmt(x: float) -> str:
    """Full round-trip decimal formatting, byte-stable across runs."""
    return repr(float(x))


# ---------------------------------------------------------------------------
# config loading and resolution
# ---------------------------------------------------------------------------

def _get(cfg: dict, key: str, default=None, required=False):
    if key not in cfg:
        if required:
            raise ConfigError(f"config is missing required key {key!r}")
        return default
    return cfg[key]


def load_config(path: Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}")
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return cfg


def resolve_experiment(cfg: dict) -> dict:
    """Validate the raw config and fill in every derived quantity.

    Returns a fully resolved, JSON-serializable experiment description that
    the manifest records verbatim and the workers execute.
    """
    prob_spec = _get(cfg, "problem", required=True)
    name = _get(prob_spec, "name", required=True)
    n = int(_get(prob_spec, "n", required=True))
    b = int(_get(prob_spec, "b", required=True))
    params = _get(prob_spec, "params", {})
    problem = make_problem(name, n, b, params)

    noise_spec = _get(cfg, "noise", {})
    noise_kind = _get(noise_spec, "kind", "gradient_consistent")
    sigma = float(_get(noise_spec, "sigma", problem.sigma_default))
    if noise_kind == "noiseless":
        sigma = 0.0
    NoiseModel(noise_kind, sigma)  # validate early

    solver_spec = dict(_get(cfg, "solver", required=True))
    algo = _get(solver_spec, "algo", required=True)
    if algo not in ALGORITHMS:
        raise ConfigError(f"solver.algo must be one of {ALGORITHMS}, got {algo!r}")
    T = _get(solver_spec, "T")
    lip = Lipschitz.from_problem(problem)

    x1 = problem.initial_point()
    gap_plain = problem.value(x1) - (problem.f_lower if problem.f_lower is not None
                                     else problem.value(x1))
    gap_comp = (problem.composite_value(x1) - problem.phi_lower
                if problem.phi_lower is not None else None)

    derived: dict = {}
    sched = _get(cfg, "schedule")
    if sched is not None:
        derived = _apply_schedule(sched, solver_spec, problem, lip, sigma,
                                  gap_plain, gap_comp)
    if _get(solver_spec, "T") is None:
        raise ConfigError("solver.T is required (directly or via a schedule)")
    for key in ("stepsize", "mu"):
        if _get(solver_spec, key) is None:
            raise ConfigError(
                f"solver.{key} is required (directly or via a schedule)")

    resolved = {
        "version": __version__,
        "problem": {"name": name, "n": n, "b": b, "params": params,
                    "L_s": list(map(float, problem.L_s)),
                    "L_f": float(problem.L_f), "M": float(problem.M)},
        "noise": {"kind": noise_kind, "sigma": sigma},
        "solver": {
            "algo": algo,
            "T": int(solver_spec["T"]),
            "stepsize": solver_spec["stepsize"],
            "mu": float(solver_spec["mu"]),
            "batch_size": _get(solver_spec, "batch_size", 1),
            "block_probs": _get(solver_spec, "block_probs"),
            "delta": _get(solver_spec, "delta"),
            "output_rule": _get(solver_spec, "output_rule"),
        },
        "derived": derived,
        "replications": int(_get(cfg, "replications", 1)),
        "seed": int(_get(cfg, "seed", 0)),
        "metrics": list(_get(cfg, "metrics", ["value"])),
        "two_phase": _get(cfg, "two_phase"),
        "bounds": _get(cfg, "bounds", "auto"),
        "initial_gap": float(gap_plain),
        "initial_gap_composite": (float(gap_comp) if gap_comp is not None
                                  else None),
    }
    if problem.geometry.bounded:
        resolved["problem"]["block_diameters"] = [
            float(v) for v in problem.geometry.diameters()]
    if resolved["replications"] < 1:
        raise ConfigError("replications must be >= 1")

    for m in resolved["metrics"]:
        if m not in METRIC_NAMES:
            raise ConfigError(
                f"unknown metric {m!r}; available: {', '.join(METRIC_NAMES)}")
        if m in ("fw_gap", "gen_fw_gap") and not problem.geometry.bounded:
            raise ConfigError(f"metric {m!r} needs a bounded feasible set")
        if m == "suboptimality" and problem.f_star is None:
            raise ConfigError(
                f"metric 'suboptimality' needs a declared optimum, which "
                f"problem {name!r} lacks")
        if m == "composite_suboptimality" and problem.phi_star is None:
            raise ConfigError(
                f"metric 'composite_suboptimality' needs a declared composite "
                f"optimum, which problem {name!r} lacks")
        if m == "weighted_dist_sq" and problem.x_star is None:
            raise ConfigError(
                f"metric 'weighted_dist_sq' needs a known minimizer, which "
                f"problem {name!r} lacks")

    tp = resolved["two_phase"]
    if tp is not None:
        if algo not in ("zs_bmd", "zs_bccg_approx"):
            raise ConfigError(
                "two_phase wraps zs_bmd or zs_bccg_approx runs only")
        if int(_get(tp, "runs", required=True)) < 1:
            raise ConfigError("two_phase.runs must be >= 1")
        if int(_get(tp, "post_samples", required=True)) < 1:
            raise ConfigError("two_phase.post_samples must be >= 1")

    # building the output distribution validates stepsize admissibility
    solver_config(resolved, resolved["seed"], lip)
    return resolved


def _apply_schedule(sched, solver_spec, problem, lip, sigma, gap_plain,
                    gap_comp):
    """Fill solver fields from a closed-form rule; returns what was derived."""
    rule = _get(sched, "rule", required=True)
    out = {"rule": rule}
    n = problem.n

    def d_f():
        return float(np.sqrt(2.0 * gap_plain / problem.L_f)) or 1.0

    def d_phi():
        if gap_comp is None:
            raise ConfigError(
                f"schedule {rule!r} needs a composite optimum (or lower "
                f"bound), which problem {problem.name!r} lacks")
        return float(np.sqrt(gap_comp / lip.L_hat)) or 1.0

    if rule == "zs_bcd":
        T = int(_get(solver_spec, "T", required=True))
        D_f = float(_get(sched, "D_f", d_f()))
        D_tilde = _get(sched, "D_tilde", "optimal")
        if D_tilde == "optimal":
            D_tilde = bcd_optimal_dtilde(problem.L_f, lip.L_hat, D_f)
        alpha, mu_cap = schedule_zs_bcd_corollary(
            n, T, sigma, lip.L_hat, float(D_tilde), D_f)
        out.update(alpha=alpha, mu_cap=mu_cap, D_f=D_f, D_tilde=float(D_tilde))
        solver_spec["stepsize"] = alpha
        solver_spec.setdefault("mu", mu_cap)
        solver_spec.setdefault("batch_size", 1)
    elif rule == "zs_bcd_convex":
        T = int(_get(solver_spec, "T", required=True))
        if problem.x_star is None:
            raise ConfigError(
                "the convex descent schedule needs a known minimizer")
        p = np.full(problem.b, 1.0 / problem.b)
        D_pX = float(np.sqrt(weighted_dist_sq(
            problem.initial_point(), problem.x_star, p, problem.layout))) or 1.0
        D_tilde = float(_get(sched, "D_tilde", D_pX))
        alpha, mu_cap = schedule_zs_bcd_convex(
            n, T, sigma, problem.L_f, D_tilde, D_pX)
        out.update(alpha=alpha, mu_cap=mu_cap, D_pX=D_pX, D_tilde=D_tilde)
        solver_spec["stepsize"] = alpha
        solver_spec.setdefault("mu", min(mu_cap, 1e-3))
        solver_spec.setdefault("batch_size", 1)
        solver_spec.setdefault("output_rule", "zs_bcd_convex")
    elif rule == "zs_bmd":
        T_tilde = int(_get(sched, "T_tilde", required=True))
        D_Phi = float(_get(sched, "D_Phi", 0) or d_phi())
        D_tilde = float(_get(sched, "D_tilde", D_Phi) or 1.0)
        T_prime, mu_cap, T = schedule_zs_bmd(
            n, T_tilde, problem.M, sigma, lip.L_max, D_tilde, D_Phi)
        if T < 1:
            raise ConfigError(
                f"budget T_tilde={T_tilde} is below one batch (T'={T_prime})")
        out.update(T_prime=T_prime, mu_cap=mu_cap, T=T, T_tilde=T_tilde,
                   D_Phi=D_Phi, D_tilde=D_tilde, alpha=1.0 / lip.L_hat)
        solver_spec["T"] = T
        solver_spec["batch_size"] = T_prime
        solver_spec["stepsize"] = 1.0 / lip.L_hat
        solver_spec.setdefault("mu", mu_cap)
    elif rule == "zs_bccg_composite":
        T = int(_get(solver_spec, "T", required=True))
        alpha, mu, T_k = schedule_zs_bccg_composite(
            n, T, problem.M, sigma, lip.L_check, problem.L_f)
        out.update(alpha=alpha, mu=mu, T_k=T_k)
        solver_spec["stepsize"] = alpha
        solver_spec["batch_size"] = T_k
        solver_spec.setdefault("mu", mu)
    elif rule == "zs_bccg_approx":
        T = int(_get(solver_spec, "T", required=True))
        alpha, delta = schedule_zs_bccg_approx(lip.L_hat, T)
        out.update(alpha=alpha, delta=delta)
        solver_spec["stepsize"] = alpha
        solver_spec["delta"] = delta
    elif rule == "zs_bccg_budget":
        T_tilde = int(_get(sched, "T_tilde", required=True))
        D_Phi = float(_get(sched, "D_Phi", 0) or d_phi())
        D_tilde = float(_get(sched, "D_tilde", D_Phi) or 1.0)
        T_prime, mu_cap, T = schedule_zs_bccg_budget(
            n, problem.b, T_tilde, problem.M, sigma, lip.L_hat, lip.L_check,
            D_tilde, D_Phi)
        if T < 1:
            raise ConfigError(
                f"budget T_tilde={T_tilde} is below one batch (T'={T_prime})")
        alpha, delta = schedule_zs_bccg_approx(lip.L_hat, T)
        out.update(T_prime=T_prime, mu_cap=mu_cap, T=T, T_tilde=T_tilde,
                   D_Phi=D_Phi, D_tilde=D_tilde, alpha=alpha, delta=delta)
        solver_spec["T"] = T
        solver_spec["batch_size"] = T_prime
        solver_spec["stepsize"] = alpha
        solver_spec["delta"] = delta
        solver_spec.setdefault("mu", mu_cap)
    else:
        raise ConfigError(f"unknown schedule rule {rule!r}")
    return out


def solver_config(resolved: dict, seed: int, lip: Lipschitz) -> SolverConfig:
    s = resolved["solver"]
    return SolverConfig(
        algo=s["algo"], T=s["T"], stepsize=s["stepsize"], mu=s["mu"],
        lipschitz=lip, batch_size=s["batch_size"],
        block_probs=s["block_probs"], delta=s["delta"], seed=seed,
        output_rule=s["output_rule"])


# ---------------------------------------------------------------------------
# per-replication execution
# ---------------------------------------------------------------------------

def _metric_value(metric, problem, geometry, x, alpha):
    if metric == "value":
        return problem.value(x)
    if metric == "composite_value":
        return problem.composite_value(x)
    if metric == "grad_mapping_sq":
        return grad_mapping_sq(problem, geometry, x, alpha)
    if metric == "fw_gap":
        return fw_gap(problem, geometry, x)
    if metric == "gen_fw_gap":
        return gen_fw_gap(problem, geometry, x)
    if metric == "suboptimality":
        return suboptimality(problem, x)
    if metric == "composite_suboptimality":
        return suboptimality(problem, x, composite=True)
    if metric == "weighted_dist_sq":
        p = np.full(problem.b, 1.0 / problem.b)
        return weighted_dist_sq(x, problem.x_star, p, problem.layout)
    raise ConfigError(f"unknown metric {metric!r}")


def run_replication(resolved: dict, seed: int) -> dict:
    """One seeded replication; returns everything the writers need."""
    prob = resolved["problem"]
    problem = make_problem(prob["name"], prob["n"], prob["b"], prob["params"],
                           audit=False)
    noise = NoiseModel(resolved["noise"]["kind"], resolved["noise"]["sigma"])
    oracle = SmoothedOracle(problem.value_batch, problem.layout,
                            resolved["solver"]["mu"], noise)
    lip = Lipschitz.from_problem(problem)
    cfg = solver_config(resolved, seed, lip)
    x1 = problem.initial_point()
    geometry = problem.geometry
    metrics = resolved["metrics"]

    tp_spec = resolved["two_phase"]
    if tp_spec is not None:
        tp = TwoPhaseConfig(runs=int(tp_spec["runs"]),
                            post_samples=int(tp_spec["post_samples"]),
                            base=cfg)
        tpr = two_phase(oracle, geometry, tp, x1)
        report = tpr.reports[tpr.winner]
        extra = {"winner": tpr.winner,
                 "scores": [float(v) for v in tpr.scores],
                 "x_star_metrics": {
                     m: _metric_value(m, problem, geometry, tpr.x_star,
                                      tpr.alpha_star) for m in metrics}}
        total_calls = tpr.oracle_calls
    else:
        report = run_solver(cfg.algo, oracle,
                            None if cfg.algo == "zs_bcd" else geometry,
                            cfg, x1)
        extra = {}
        total_calls = report.oracle_calls

    batches = report.batch_sizes
    cum_calls = np.concatenate(([0], np.cumsum(2 * batches)))
    rows = []
    for pos, k in enumerate(report.stored_iters):
        x = report.trajectory[pos]
        alpha = float(report.alphas[min(max(k - 2, 0), len(report.alphas) - 1)])
        vals = [_metric_value(m, problem, geometry, x, alpha) for m in metrics]
        block = int(report.blocks[k - 2]) if k >= 2 else -1
        rows.append((int(k), block, vals, int(cum_calls[k - 1])))

    at_R = {m: _metric_value(m, problem, geometry, report.x_R, report.alpha_R)
            for m in metrics}
    expected = int(2 * np.sum(batches))
    if tp_spec is not None:
        expected = tp_spec["runs"] * (expected + 2 * tp_spec["post_samples"])
    return {"seed": seed, "rows": rows, "at_R": at_R, "R": int(report.R),
            "alpha_R": float(report.alpha_R), "oracle_calls": int(total_calls),
            "expected_calls": expected, **extra}


def _worker(args):
    resolved, seed = args
    try:
        return run_replication(resolved, seed)
    except ConfigError:
        raise
    except Exception as exc:  # recorded per seed; other seeds continue
        return {"seed": seed, "error": f"{type(exc).__name__}: {exc}"}


# ---------------------------------------------------------------------------
# writers
# ---------------------------------------------------------------------------

def _write_json(path: Path, payload: dict):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_trajectory(path: Path, metrics, result):
    header = "iter,block," + ",".join(f"metric:{m}" for m in metrics) \
        + ",oracle_calls"
    lines = [header]
    for k, block, vals, calls in result["rows"]:
        lines.append(f"{k},{block},"
                     + ",".join(_fmt(v) for v in vals) + f",{calls}")
    path.write_text("\n".join(lines) + "\n")


def _bound_inputs(resolved: dict, problem, cfg: SolverConfig) -> BoundInputs:
    solver = resolved["solver"]
    mu = float(solver["mu"])
    rule = solver["output_rule"] or cfg.algo
    gap = resolved["initial_gap"]
    gap_comp = resolved["initial_gap_composite"]
    if cfg.algo == "zs_bmd" and gap_comp is not None:
        gap = smoothed_gap_upper(gap_comp, mu, problem.L_f, problem.n)
    elif cfg.algo in ("zs_bccg_composite", "zs_bccg_approx") and gap_comp is not None:
        gap = gap_comp
    kwargs = dict(
        T=cfg.T, mu=mu, p=tuple(cfg.probs(problem.b)),
        alphas=tuple(cfg.alphas()), batch_sizes=tuple(cfg.batches()),
        sigma=resolved["noise"]["sigma"], initial_gap=gap,
        D_f=float(np.sqrt(2.0 * max(resolved["initial_gap"], 0.0) / problem.L_f)))
    if cfg.delta is not None:
        kwargs["deltas"] = tuple(cfg.deltas())
    if rule == "zs_bcd_convex" and problem.x_star is not None:
        p = np.full(problem.b, 1.0 / problem.b)
        kwargs["D_pX"] = float(np.sqrt(weighted_dist_sq(
            problem.initial_point(), problem.x_star, p, problem.layout)))
    return BoundInputs.from_problem(problem, **kwargs)


def _summary(resolved: dict, results: list[dict]) -> tuple[dict, list[str]]:
    metrics = resolved["metrics"]
    ok = [r for r in results if "error" not in r]
    errors = {str(r["seed"]): r["error"] for r in results if "error" in r}
    summary: dict = {"replications": len(results), "succeeded": len(ok),
                     "metrics": {}, "bounds": {}, "checks": [],
                     "errors": errors}
    for m in metrics:
        vals = [r["at_R"][m] for r in ok]
        if not vals:
            continue
        arr = np.asarray(vals)
        summary["metrics"][m] = {
            "mean": float(arr.mean()),
            "stddev": float(arr.std(ddof=1)) if len(arr) > 1 else 0.0,
            "n_seeds": len(arr),
            "values": [float(v) for v in arr],
        }
    summary["oracle_calls"] = {
        str(r["seed"]): {"actual": r["oracle_calls"],
                         "expected": r["expected_calls"]} for r in ok}

    bound_req = resolved["bounds"]
    check_failures: list[str] = []
    if bound_req is not None and ok:
        prob = resolved["problem"]
        problem = make_problem(prob["name"], prob["n"], prob["b"],
                               prob["params"], audit=False)
        lip = Lipschitz.from_problem(problem)
        cfg = solver_config(resolved, resolved["seed"], lip)
        rule = resolved["solver"]["output_rule"] or cfg.algo
        if bound_req == "auto":
            pairs = [_AUTO_BOUND[rule if rule in _AUTO_BOUND else cfg.algo]]
        else:
            auto_metric = _AUTO_BOUND.get(rule, _AUTO_BOUND[cfg.algo])[1]
            pairs = [(name, auto_metric) for name in bound_req]
        inputs = _bound_inputs(resolved, problem, cfg)
        for bname, metric in pairs:
            try:
                value = bound_rhs(bname, inputs)
            except ConfigError as exc:
                summary["bounds"][bname] = {"error": str(exc)}
                continue
            entry = {"value": float(value), "compared_metric": metric,
                     "n_seeds": len(ok)}
            summary["bounds"][bname] = entry
            if metric in summary["metrics"]:
                mean = summary["metrics"][metric]["mean"]
                passed = bool(mean <= value)
                summary["checks"].append({
                    "bound": bname, "metric": metric, "empirical_mean": mean,
                    "bound_value": float(value), "pass": passed})
                if not passed:
                    check_failures.append(bname)
    return summary, check_failures


_GNUPLOT_STUB = """\
# gnuplot stub: plot a metric column of one trajectory file
# usage: gnuplot -e "file='trajectory_0.csv'; col=3" plot.gp
set datafile separator ','
set logscale y
set xlabel 'iteration'
set key autotitle columnhead
plot file using 1:col with lines
"""


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _print_validation(resolved: dict):
    solver = resolved["solver"]
    prob = resolved["problem"]
    problem = make_problem(prob["name"], prob["n"], prob["b"], prob["params"],
                           audit=False)
    lip = Lipschitz.from_problem(problem)
    cfg = solver_config(resolved, resolved["seed"], lip)
    dist = output_distribution(cfg, problem.b, problem.n)
    alphas = cfg.alphas()
    batches = cfg.batches()
    print(f"problem: {prob['name']} n={prob['n']} b={prob['b']}")
    print(f"algo: {solver['algo']}  T={cfg.T}")
    print(f"stepsize: min={alphas.min():.6g} max={alphas.max():.6g}")
    print(f"mu: {solver['mu']:.6g}")
    print(f"batch size: min={batches.min()} max={batches.max()}")
    for key, val in sorted(resolved["derived"].items()):
        print(f"derived {key}: {val}")
    w = dist.weights
    print(f"output weights: min={w.min():.6g} max={w.max():.6g} "
          f"support={np.count_nonzero(w)}/{len(w)}")
    calls = int(2 * batches.sum())
    tp = resolved["two_phase"]
    if tp is not None:
        calls = tp["runs"] * (calls + 2 * tp["post_samples"])
    print(f"oracle calls per replication: {calls}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="zoblocks-bench",
        description="Seeded benchmark runner for the zeroth-order "
                    "block-coordinate solvers.")
    parser.add_argument("--config", type=Path, help="experiment config (JSON)")
    parser.add_argument("--out", type=Path, default=Path("./out"),
                        help="output directory (default ./out)")
    parser.add_argument("--seeds", type=int, default=None,
                        help="override the replication count")
    parser.add_argument("--jobs", type=int, default=1,
                        help="parallel replication workers")
    parser.add_argument("--validate-only", action="store_true",
                        help="parse the config, derive schedules, and exit")
    parser.add_argument("--list-problems", action="store_true")
    parser.add_argument("--list-algos", action="store_true")
    parser.add_argument("--check", action="store_true",
                        help="exit 3 when a bound dominance check fails")
    parser.add_argument("--gnuplot-stub", action="store_true",
                        help="also write a plot.gp plotting script")
    args = parser.parse_args(argv)

    if args.list_problems:
        from .problems import problem_names
        for name in problem_names():
            print(name)
        return 0
    if args.list_algos:
        for name in ALGORITHMS:
            print(name)
        return 0
    if args.config is None:
        parser.print_usage(sys.stderr)
        print("error: --config is required", file=sys.stderr)
        return 1

    try:
        cfg = load_config(args.config)
        if args.seeds is not None:
            cfg["replications"] = args.seeds
        resolved = resolve_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    if args.validate_only:
        _print_validation(resolved)
        return 0

    if args.jobs < 1:
        print("config error: --jobs must be >= 1", file=sys.stderr)
        return 1

    master = resolved["seed"]
    seeds = [master + i for i in range(resolved["replications"])]
    resolved["replication_seeds"] = seeds

    tasks = [(resolved, s) for s in seeds]
    try:
        if args.jobs == 1 or len(seeds) == 1:
            results = [_worker(t) for t in tasks]
        else:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_worker, tasks))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "manifest.json", resolved)
    for res in results:
        if "error" not in res:
            _write_trajectory(out / f"trajectory_{res['seed']}.csv",
                              resolved["metrics"], res)
    summary, check_failures = _summary(resolved, results)
    _write_json(out / "summary.json", summary)
    if args.gnuplot_stub:
        (out / "plot.gp").write_text(_GNUPLOT_STUB)

    if summary["errors"]:
        for seed, msg in summary["errors"].items():
            print(f"seed {seed} failed: {msg}", file=sys.stderr)
        return 2
    if args.check and check_failures:
        print("failed checks: " + ", ".join(check_failures), file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
