"""Batch runner: ``pathmaster run CONFIG.json`` and ``pathmaster sweep CONFIG.json``.

A config is a JSON object::

    {"command": "ito-check", "seed": 0, "output_dir": "out",
     "params": {"N": 20000, "M": 200}}

Sweeps add ``"grid": {"M": [25, 50, 100, 200]}`` and optionally
``"slope": {"x": "dt", "y": "residual"}``.  Every parameter is validated
before any computation and every default is echoed into the manifest.

Exit codes: 0 success, 1 computation fault, 2 usage error.
"""

import argparse
import hashlib
import itertools
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .errors import ConfigurationError, PathMasterError, SimulationFault, UsageError

CSV_HEADER = "# pathmaster-csv v1"
SWEEP_CAP = 64
TOP_KEYS = {"command", "seed", "output_dir", "params"}
SWEEP_KEYS = TOP_KEYS | {"grid", "slope"}


# ------------------------------------------------------------------ schemas

def _int(lo=None):
    def check(v):
        if isinstance(v, bool) or not isinstance(v, int):
            raise UsageError("expected an integer")
        if lo is not None and v < lo:
            raise UsageError(f"must be >= {lo}")
        return v
    return check


def _num(lo=None, strict=False):
    def check(v):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise UsageError("expected a finite number")
        if lo is not None and (v <= lo if strict else v < lo):
            raise UsageError(f"must be {'>' if strict else '>='} {lo}")
        return float(v)
    return check


def _choice(*opts):
    def check(v):
        if v not in opts:
            raise UsageError(f"expected one of {list(opts)}")
        return v
    return check


def _str(v):
    if not isinstance(v, str):
        raise UsageError("expected a string")
    return v


def _nums(v):
    if not isinstance(v, list) or not v:
        raise UsageError("expected a non-empty list of numbers")
    return [_num()(x) for x in v]


def _bool(v):
    if not isinstance(v, bool):
        raise UsageError("expected true or false")
    return v


SCHEMAS = {
    "ito-check": {"entry": (_choice("quadratic"), "quadratic"), "drift": (_choice("sin", "zero"), "sin"),
                  "vol": (_num(0, True), 1.0), "N": (_int(32), 20000), "M": (_int(1), 200),
                  "T": (_num(0, True), 1.0), "x0_mean": (_num(), 0.0), "x0_sd": (_num(0), 0.0),
                  "qv": (_choice("sigma", "increments"), "sigma")},
    "derivative-check": {"entry": (_choice("quadratic"), "quadratic"), "order": (_choice(1, 2), 1),
                         "eps": (_nums, [1e-2, 1e-3, 1e-4, 1e-5, 1e-6]), "N": (_int(2), 50),
                         "M": (_int(2), 50), "measures": (_int(1), 10), "particles": (_int(1), 10),
                         "t": (_num(0), 0.5)},
    "wasserstein": {"N": (_int(1), 8), "M": (_int(1), 10), "d": (_int(1), 1),
                    "identical": (_bool, False), "mu_file": (_str, ""), "nu_file": (_str, "")},
    "coupling": {"N": (_int(1), 12), "M": (_int(1), 8), "atoms": (_int(1), 3), "pi": (_int(1), 2),
                 "eps": (_num(0, True), 1e-3), "delta": (_num(0, True), 0.1)},
    "residual": {"entry": (_str, "heat/terminal_square/zero"), "t": (_nums, [0.1, 0.3, 0.5, 0.7, 0.9]),
                 "N": (_int(1), 400), "M": (_int(1), 100), "numeric": (_bool, False)},
    "viscosity-check": {"entry": (_str, "semilinear/half_square/neg_abs"),
                        "t": (_nums, [0.2, 0.35, 0.5, 0.65, 0.8]), "N": (_int(20), 1600),
                        "M": (_int(1), 1000), "delta": (_num(0, True), 0.002), "L": (_num(0, True), 1.0),
                        "K": (_int(1), 1000), "corrupt": (_num(), 0.0), "slack": (_num(0), 0.01)},
    "dpp-check": {"variant": (_choice("closed-loop", "noise-adapted"), "closed-loop"),
                  "N": (_int(2), 4000), "M": (_int(2), 40), "reps": (_int(8), 8)},
    "value-search": {"instance": (_choice("quartic", "variance"), "quartic"), "eps": (_num(0), 0.1),
                     "N": (_int(2), 100000), "reps": (_int(8), 8), "budget": (_int(1), 200)},
    "counterexample": {"variant": (_choice("neq", "discontinuity"), "discontinuity"),
                       "eps": (_num(0), 0.1), "T": (_num(0, True), 3.0), "t": (_num(0), 1.0),
                       "N": (_int(2), 200000), "reps": (_int(8), 8)},
    "state-dependence": {"control": (_choice("positive", "negative"), "positive"),
                         "N": (_int(2), 2000), "reps": (_int(8), 8), "budget": (_int(1), 200)},
    "moment-bound": {"family": (_str, "default"), "L": (_num(0, True), 1.0), "K": (_int(1), 20),
                     "N": (_int(1), 200), "M": (_int(8), 200), "t": (_num(0), 0.25), "p": (_int(2), 2)},
}


def validate(config, sweep=False):
    """Resolve a raw config into ``{command, seed, output_dir, params[, grid, slope]}``."""
    if not isinstance(config, dict):
        raise UsageError("config must be a JSON object")
    extra = set(config) - (SWEEP_KEYS if sweep else TOP_KEYS)
    if extra:
        raise UsageError(f"unknown config keys: {sorted(extra)}")
    cmd = config.get("command")
    if cmd not in SCHEMAS:
        raise UsageError(f"unknown command {cmd!r}; expected one of {sorted(SCHEMAS)}")
    schema = SCHEMAS[cmd]
    seed = config.get("seed", 0)
    try:
        seed = _int(0)(seed)
    except UsageError as exc:
        raise UsageError(f"seed: {exc}") from None
    params = _resolve(schema, config.get("params", {}), cmd)
    out = os.environ.get("PATHMASTER_OUTPUT_DIR") or config.get("output_dir", "pathmaster-out")
    resolved = {"command": cmd, "seed": seed, "output_dir": _str(out), "params": params}
    if sweep:
        grid = config.get("grid", {})
        if not isinstance(grid, dict) or not grid:
            raise UsageError("a sweep needs a non-empty 'grid' object")
        for k, vals in grid.items():
            if k not in schema:
                raise UsageError(f"grid key {k!r} is not a parameter of {cmd}")
            if not isinstance(vals, list) or not vals:
                raise UsageError(f"grid values for {k!r} must be a non-empty list")
            for v in vals:
                _check_param(schema, k, v, cmd)
        size = math.prod(len(v) for v in grid.values())
        if size > SWEEP_CAP:
            raise UsageError(f"sweep has {size} runs, above the cap of {SWEEP_CAP}")
        resolved["grid"] = grid
        slope = config.get("slope")
        if slope is not None and (not isinstance(slope, dict) or set(slope) != {"x", "y"}):
            raise UsageError("slope must be an object with keys 'x' and 'y'")
        resolved["slope"] = slope
    return resolved


def _check_param(schema, key, value, cmd):
    try:
        return schema[key][0](value)
    except UsageError as exc:
        raise UsageError(f"{cmd}.{key}: {exc}") from None


def _resolve(schema, params, cmd):
    if not isinstance(params, dict):
        raise UsageError("params must be an object")
    unknown = set(params) - set(schema)
    if unknown:
        raise UsageError(f"unknown parameters for {cmd}: {sorted(unknown)}")
    out = {k: default for k, (_, default) in schema.items()}
    for k, v in params.items():
        out[k] = _check_param(schema, k, v, cmd)
    return out


# ----------------------------------------------------------------- commands

def _initial(N, M, T, mean, sd, seed):
    from .path_measure import PathMeasure, TimeGrid
    from .rng import TAG_AUXILIARY, generator
    x0 = mean + sd * generator(seed, TAG_AUXILIARY, 900).standard_normal(N) if sd > 0 else np.full(N, mean)
    return PathMeasure.constant(TimeGrid(T, M), x0)


def cmd_ito(p, seed):
    from .closed_forms import lookup
    from .lions_calculus import ito_residual
    from .mckv_sim import DynamicsSpec, simulate_trajectory
    f = lookup(p["entry"]).functional
    drift = (lambda s, a: np.sin(s.state)) if p["drift"] == "sin" else (lambda s, a: np.zeros_like(s.state))
    dyn = DynamicsSpec(drift=drift, vol=lambda s, a: p["vol"], d=1, L=max(1.0, 0.5 * p["vol"] ** 2))
    mu = _initial(p["N"], p["M"], p["T"], p["x0_mean"], p["x0_sd"], seed)
    traj = simulate_trajectory(0.0, mu, dyn, seed=seed)
    rep = ito_residual(f, traj, qv=p["qv"])
    ok = abs(rep.residual) <= max(0.02 * abs(rep.change), 3 * rep.stderr)
    return [{"dt": mu.grid.dt, "residual": rep.residual, "stderr": rep.stderr,
             "relative": rep.relative, "change": rep.change, "pass": ok}]


def derivative_measures(count, N, M, seed):
    """Random Brownian path measures with random drift and initial spread."""
    from .mckv_sim import constant_dynamics, simulate_mkv
    from .rng import TAG_AUXILIARY, generator
    rng = generator(seed, TAG_AUXILIARY, 901)
    out = []
    for j in range(count):
        mu0 = _initial(N, M, 1.0, float(rng.normal()), float(rng.uniform(0.1, 1.0)), seed + 1000 + j)
        out.append(simulate_mkv(0.0, mu0, constant_dynamics(float(rng.normal()), 1.0), seed=seed,
                                stream=(j,)))
    return out


def cmd_derivative(p, seed):
    from .closed_forms import lookup
    from .lions_calculus import eps_sweep
    from .rng import TAG_AUXILIARY, generator
    f = lookup(p["entry"]).functional
    rng = generator(seed, TAG_AUXILIARY, 902)
    errs = np.zeros(len(p["eps"]))
    for mu in derivative_measures(p["measures"], p["N"], p["M"], seed):
        for i in rng.choice(mu.N, size=min(p["particles"], mu.N), replace=False):
            exact = (f.dmu if p["order"] == 1 else f.dwdmu)(p["t"], mu)[i]
            e, _ = eps_sweep(f, p["t"], mu, int(i), exact, p["eps"], p["order"])
            errs = np.maximum(errs, e / max(float(np.max(np.abs(exact))), 1e-12))
    best = int(np.argmin(errs))
    rows = [{"eps": e, "max_rel_error": float(r), "best": j == best} for j, (e, r) in enumerate(zip(p["eps"], errs))]
    return rows


def _fixture_pair(p, seed):
    from .path_measure import PathMeasure, TimeGrid, load_measure
    from .rng import TAG_AUXILIARY, generator
    if p["mu_file"]:
        mu = load_measure(p["mu_file"])
        nu = load_measure(p["nu_file"]) if p["nu_file"] else mu
        return mu, nu
    rng = generator(seed, TAG_AUXILIARY, 903)
    grid = TimeGrid(1.0, p["M"])
    mu = PathMeasure(grid, np.cumsum(rng.normal(size=(p["N"], p["M"] + 1, p["d"])), axis=1))
    if p["identical"]:
        return mu, mu
    return mu, PathMeasure(grid, np.cumsum(rng.normal(size=(p["N"], p["M"] + 1, p["d"])), axis=1))


def cmd_wasserstein(p, seed):
    from .path_measure import wasserstein2
    mu, nu = _fixture_pair(p, seed)
    cost, coupling = wasserstein2(mu, nu)
    return [{"N": mu.N, "cost": cost, "method": coupling.method}]


def cmd_coupling(p, seed):
    from .path_measure import PathMeasure, TimeGrid, build_coupling
    from .rng import TAG_AUXILIARY, generator
    rng = generator(seed, TAG_AUXILIARY, 904)
    grid = TimeGrid(1.0, p["M"])
    atoms = rng.integers(-2, 3, size=(p["atoms"], p["M"] + 1, 1)).astype(float)
    mu = PathMeasure(grid, atoms[rng.integers(0, p["atoms"], p["N"])])
    nu = PathMeasure(grid, atoms[rng.integers(0, p["atoms"], p["N"])] + rng.normal(0, 0.01, (p["N"], p["M"] + 1, 1)))
    pis = list(grid.times[np.linspace(1, p["M"], p["pi"]).astype(int)])
    sys_ = build_coupling(mu, nu, pis, p["eps"], p["delta"], seed)
    recon = sys_.reconstruct(nu.values[:, sys_.pi_index], sys_.btilde)
    exact = bool(np.array_equal(recon, sys_.xi.values[:, sys_.pi_index]))
    return [{"reconstruction_exact": exact, "distance": sys_.distance,
             "optimal": sys_.optimal_distance, "eps": p["eps"],
             "pass": exact and sys_.distance <= sys_.optimal_distance + p["eps"]}]


def cmd_residual(p, seed):
    from .closed_forms import lookup
    from .master_core import CandidateSolution, classical_residual
    from .mckv_sim import constant_dynamics, simulate_mkv
    entry = lookup(p["entry"])
    if entry.generator is None:
        raise UsageError(f"entry {p['entry']!r} has no generator")
    mu = simulate_mkv(0.0, _initial(p["N"], p["M"], 1.0, 0.0, 0.5, seed), constant_dynamics(0.2, 0.7), seed=seed)
    V = CandidateSolution.wrap(entry.candidate or entry.functional)
    return [{"t": t, "residual": float(classical_residual(V, entry.generator, t, mu, numeric=p["numeric"]))}
            for t in p["t"]]


def cmd_viscosity(p, seed):
    from .closed_forms import lookup
    from .lions_calculus import MeasureFunctional
    from .master_core import jet_membership_test, true_jet, viscosity_check
    from .mckv_sim import constant_dynamics, simulate_mkv
    entry = lookup(p["entry"])
    f = entry.functional
    T = 1.0
    if p["corrupt"]:
        c = p["corrupt"]
        f = MeasureFunctional(lambda t, mu: entry.functional(t, mu) + c * (T - t),
                              dt=lambda t, mu: entry.functional.dt(t, mu) - c,
                              dmu=entry.functional.dmu, dwdmu=entry.functional.dwdmu, name="corrupted")
    mu = simulate_mkv(0.0, _initial(p["N"], p["M"], T, 0.0, 0.5, seed), constant_dynamics(0.2, 0.7), seed=seed)
    rows = []
    for t in p["t"]:
        for side in ("sub", "super"):
            jet = true_jet(f, t, mu, p["delta"], p["L"], side, p["slack"])
            mem = jet_membership_test(f, jet, t, mu, K=p["K"], seed=seed)
            rep = viscosity_check(f, entry.generator, t, mu, jet, side,
                                  membership=mem if mem.plausible else None)
            rows.append({"t": t, "side": side, "membership": mem.status, "min_gap": mem.min_gap,
                         "scalar": rep.scalar, "stderr": rep.stderr, "pass": rep.passed and mem.plausible})
    return rows


def dpp_instance(variant, N, M):
    from .closed_forms import neg_variance_cost, variance_dynamics
    from .control_value import TableSpace
    from .path_measure import PathMeasure, TimeGrid
    acts = [-1.0, 0.0, 1.0]
    mu = PathMeasure.constant(TimeGrid(2.0, M), np.zeros(N))
    first = TableSpace([(0.0, (0.0,), None)], [0.0], acts)
    if variant == "closed-loop":
        joint = nested = TableSpace([(1.0, (1.0,), None)], [0.0], acts)
    else:
        joint = TableSpace([(1.0, (1.0,), 0.0)], [0.0], acts)
        nested = TableSpace([(1.0, (1.0,), 1.0)], [0.0], acts)
    return dict(t1=0.0, t2=1.0, mu=mu, dyn=variance_dynamics(), f=None, g=neg_variance_cost,
                first=first, second_joint=joint, second_nested=nested)


def cmd_dpp(p, seed):
    from .control_value import dpp_residual
    r = dpp_residual(**dpp_instance(p["variant"], p["N"], p["M"]), seed=seed, reps=p["reps"])
    return [{"variant": p["variant"], "residual": r.residual, "stderr": r.stderr,
             "joint": float(r.joint.mean()), "nested": float(r.nested.mean()), "within_3se": r.within}]


def cmd_value_search(p, seed):
    from .closed_forms import neg_variance_cost, quartic_cost, quartic_dynamics, variance_dynamics
    from .control_value import TableSpace, optimize_value, signed_start, two_point_start
    if p["instance"] == "quartic":
        acts = (-1.0, -0.5, 0.0, 0.5, 1.0)
        res = optimize_value(0.0, two_point_start(p["eps"], p["N"]), quartic_dynamics(acts), None, quartic_cost,
                             TableSpace([(0.0, (0.0,), None)], [0.0], acts), p["budget"], seed, reps=p["reps"])
    else:
        res = optimize_value(1.0, signed_start(3.0, 1.0, 60, p["N"], seed), variance_dynamics(), None,
                             neg_variance_cost, TableSpace([(1.0, (1.0,), None)], [0.0], [-1.0, 0.0, 1.0]),
                             p["budget"], seed, reps=p["reps"])
    return [{"instance": p["instance"], "value": res.estimate.mean, "stderr": res.estimate.stderr,
             "evaluated": res.evaluated, "exhaustive": res.exhaustive, "policy": repr(res.policy)}]


def _report_rows(report):
    rows = []
    for r in report.rows:
        rows.append({"quantity": r["quantity"], "estimate": r["estimate"], "stderr": r["stderr"],
                     "target": r.get("target", "")})
    for k, v in report.checks.items():
        rows.append({"quantity": f"check: {k}", "estimate": "", "stderr": "", "target": "", "pass": v})
    return rows


def cmd_counterexample(p, seed):
    from .control_value import discontinuity_experiment, openloop_gap_experiment
    if p["variant"] == "discontinuity":
        rep = discontinuity_experiment(p["eps"], p["N"], seed, p["reps"])
    else:
        rep = openloop_gap_experiment(p["T"], p["t"], seed, N=min(p["N"], 20000), reps=p["reps"])
    return _report_rows(rep)


def state_dependence_instance(control, N):
    from .closed_forms import running_max_cost, variance_dynamics
    from .control_value import TableSpace, route_measures
    mu_a, mu_b = route_measures(1.0, 40, 0.5, N)
    if control == "positive":
        def g(paths):
            return -(paths[:, -1, 0] - 0.3) ** 2
    else:
        g = running_max_cost
    space = TableSpace([(0.5, (0.25, 0.5), None)], [0.0], [-1.0, 0.0, 1.0])
    return dict(t=0.5, mu_a=mu_a, mu_b=mu_b, dyn=variance_dynamics(), f=None, g=g, space=space)


def cmd_state_dependence(p, seed):
    from .control_value import state_dependence_check
    rep = state_dependence_check(**state_dependence_instance(p["control"], p["N"]), budget=p["budget"],
                                 seed=seed, reps=p["reps"])
    return _report_rows(rep)


def cmd_moment(p, seed):
    from .mckv_sim import moment_bound_check, sample_PL
    mu = _initial(p["N"], p["M"], 1.0, 0.0, 0.5, seed)
    sample = sample_PL(p["t"], mu, p["L"], p["K"], family=p["family"], seed=seed)
    rep = moment_bound_check(list(sample), p["t"], p["L"], p["p"])
    return [{"exponent": rep.exponent, "target_exponent": rep.target_exponent, "constant": rep.constant,
             "bound_holds": rep.bound_holds, "clamped": sample.audit.get("clamped", 0)}]


COMMANDS = {
    "ito-check": cmd_ito, "derivative-check": cmd_derivative, "wasserstein": cmd_wasserstein,
    "coupling": cmd_coupling, "residual": cmd_residual, "viscosity-check": cmd_viscosity,
    "dpp-check": cmd_dpp, "value-search": cmd_value_search, "counterexample": cmd_counterexample,
    "state-dependence": cmd_state_dependence, "moment-bound": cmd_moment,
}


# ------------------------------------------------------------------ outputs

def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    s = "" if v is None else str(v)
    return '"' + s.replace('"', '""') + '"' if any(c in s for c in ',"\n') else s


def render_csv(rows):
    cols = []
    for r in rows:
        cols += [k for k in r if k not in cols]
    lines = [CSV_HEADER, ",".join(cols)]
    lines += [",".join(_fmt(r.get(c, "")) for c in cols) for r in rows]
    return "\n".join(lines) + "\n"


def _atomic_write(path, text):
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_outputs(resolved, rows, started, name):
    out = resolved["output_dir"]
    os.makedirs(out, exist_ok=True)
    csv_path = os.path.join(out, f"{name}.csv")
    text = render_csv(rows)
    _atomic_write(csv_path, text)
    manifest = {"config": resolved, "version": __version__, "wall_clock_s": round(time.time() - started, 3),
                "audit": {"rows": len(rows), "failed_checks": sum(1 for r in rows if r.get("pass") is False)},
                "outputs": {os.path.basename(csv_path): hashlib.sha256(text.encode()).hexdigest()}}
    _atomic_write(os.path.join(out, "manifest.json"), json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return csv_path


def execute(resolved):
    """Rows of one resolved run."""
    return COMMANDS[resolved["command"]](resolved["params"], resolved["seed"])


def run(config):
    started = time.time()
    resolved = validate(config)
    rows = execute(resolved)
    return _write_outputs(resolved, rows, started, resolved["command"]), rows


def fit_slope(xs, ys):
    xs, ys = np.asarray(xs, float), np.abs(np.asarray(ys, float))
    ok = (xs > 0) & (ys > 0)
    if ok.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(xs[ok]), np.log(ys[ok]), 1)[0])


def sweep(config, parallel=False):
    started = time.time()
    resolved = validate(config, sweep=True)
    keys = list(resolved["grid"])
    points = list(itertools.product(*(resolved["grid"][k] for k in keys)))

    def one(point):
        sub = dict(resolved, params={**resolved["params"], **dict(zip(keys, point))})
        sub = validate({k: sub[k] for k in TOP_KEYS})
        return [{**dict(zip(keys, point)), **r} for r in execute(sub)]
    if parallel:
        with ThreadPoolExecutor(min(len(points), os.cpu_count() or 1)) as pool:
            chunks = list(pool.map(one, points))
    else:
        chunks = [one(pt) for pt in points]
    rows = [r for chunk in chunks for r in chunk]
    slope = resolved.get("slope")
    if slope:
        xs = [r.get(slope["x"]) for r in rows]
        ys = [r.get(slope["y"]) for r in rows]
        if any(v is None or isinstance(v, (str, bool)) for v in xs + ys):
            raise UsageError(f"slope columns {slope['x']!r}/{slope['y']!r} are not numeric in every row")
        rows.append({"slope_x": slope["x"], "slope_y": slope["y"], "slope": fit_slope(xs, ys)})
    return _write_outputs(resolved, rows, started, f"sweep-{resolved['command']}"), rows


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config is not valid JSON: {exc}") from None


def main(argv=None):
    parser = argparse.ArgumentParser(prog="pathmaster", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="action", required=True)
    p_run = sub.add_parser("run", help="execute one configured command")
    p_run.add_argument("config")
    p_sweep = sub.add_parser("sweep", help="execute a parameter grid")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--parallel", action="store_true")
    sub.add_parser("commands", help="list commands and their parameter defaults")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.action == "commands":
            for name, schema in SCHEMAS.items():
                print(name, json.dumps({k: d for k, (_, d) in schema.items()}))
            return 0
        cfg = _load(args.config)
        if args.action == "run":
            path, rows = run(cfg)
        else:
            path, rows = sweep(cfg, args.parallel)
    except (UsageError, ConfigurationError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except SimulationFault as exc:
        print(f"computation fault at step {exc.step}: {exc}", file=sys.stderr)
        return 1
    except PathMasterError as exc:
        print(f"computation fault: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(rows)} rows to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
