"""Command-line front end.

Subcommands: ``run`` (one trajectory), ``convergence`` (order study),
``drift`` (long-run Hamiltonian record), ``tableau-check`` (coefficient
residuals). Configuration is a flat JSON file; command-line flags override
file values. Every CSV is written next to a JSON manifest recording the
exact inputs. Numbers are serialized with shortest round-trip formatting,
so identical configs give bit-identical files.
"""

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .diagnostics import run_convergence, run_drift
from .errors import ConfigError, DomainError, NewtonDivergence, \
    SingularStageJacobian, VprkError
from .models import MODEL_BUILDERS, make_model, vortex_exact
from .reference import reference_solution
from .solver import SolverConfig, prk_step
from .system import consistent_init
from .tableaus import METHOD_IDS, check_order_conditions, check_symplecticity, \
    make_tableau

_MODEL_PARAM_KEYS = {
    "kepler": ("e", "a_axis", "h0"),
    "vortex2": ("gammas", "h0", "separation"),
    "lotka_volterra": ("h0",),
    "toy": (),
}


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))  # shortest round-trip decimal
    return str(value)


def _load_config(args):
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}")
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object of key/value pairs")
    for key in ("model", "method", "h", "t_final", "out_dir"):
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            cfg[key] = val
    env_out = os.environ.get("VPRK_OUT_DIR")
    if env_out and "out_dir" not in cfg:
        cfg["out_dir"] = env_out
    cfg.setdefault("out_dir", ".")
    return cfg


def _require(cfg, key):
    if key not in cfg:
        raise ConfigError(f"missing required config key '{key}'")
    return cfg[key]


def _build_model(cfg):
    name = _require(cfg, "model")
    if name not in MODEL_BUILDERS:
        raise ConfigError(f"unknown model '{name}'; available: {sorted(MODEL_BUILDERS)}")
    overrides = {k: cfg[k] for k in _MODEL_PARAM_KEYS[name] if k in cfg}
    setup = make_model(name, **overrides)
    q0 = np.asarray(cfg.get("q0", setup.q0), dtype=float)
    if q0.shape != (setup.system.n,):
        raise ConfigError(f"q0 must have length {setup.system.n}")
    return setup, q0


def _method_id(cfg, key="method"):
    mid = _require(cfg, key)
    if mid not in METHOD_IDS:
        raise ConfigError(f"unknown method '{mid}'; available: {list(METHOD_IDS)}")
    return mid


def _solver_config(cfg):
    return SolverConfig(
        newton_tol=float(cfg.get("newton_tol", 1e-12)),
        max_newton_iters=int(cfg.get("max_newton_iters", 50)),
        jacobian_mode=cfg.get("jacobian_mode", "exact"),
        initial_guess_mode=cfg.get("initial_guess_mode", "el_field"),
    )


def _write_manifest(path, cfg, extra):
    manifest = {
        "code_version": __version__,
        "config": {k: v for k, v in sorted(cfg.items())},
    }
    manifest.update(extra)
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def cmd_run(cfg):
    setup, q0 = _build_model(cfg)
    sys_, n = setup.system, setup.system.n
    method = _method_id(cfg)
    h = float(_require(cfg, "h"))
    t_final = float(_require(cfg, "t_final"))
    scfg = _solver_config(cfg)
    tableau = make_tableau(method)

    out_dir = cfg["out_dir"]
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "trajectory.csv")
    header = (["t"] + [f"q{i+1}" for i in range(n)] + [f"p{i+1}" for i in range(n)]
              + ["constraint_residual", "newton_iters"])

    x = consistent_init(sys_, q0)
    n_steps = max(1, round(t_final / h))
    truncated = False
    failure = None
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerow([_fmt(x.t)] + [_fmt(v) for v in x.q] + [_fmt(v) for v in x.p]
                        + [_fmt(x.constraint_residual(sys_)), "0"])
        for _ in range(n_steps):
            try:
                x, rep = prk_step(sys_, tableau, h, x, scfg)
            except VprkError as exc:
                truncated = True
                failure = f"{type(exc).__name__}: {exc}"
                break
            writer.writerow(
                [_fmt(x.t)] + [_fmt(v) for v in x.q] + [_fmt(v) for v in x.p]
                + [_fmt(x.constraint_residual(sys_)), str(rep.iterations)])

    _write_manifest(os.path.join(out_dir, "trajectory_manifest.json"), cfg, {
        "command": "run", "model": setup.system.name, "method": method,
        "h": h, "t_final": t_final, "solver": asdict(scfg),
        "truncated": truncated, "failure": failure,
    })
    if truncated:
        print(f"run truncated: {failure}", file=sys.stderr)
        return 3
    return 0


def _reference_for(cfg, setup, q0, t_final):
    if setup.system.name == "vortex2" and "q0" not in cfg:
        d = float(cfg.get("separation", 1.0))
        return lambda t: vortex_exact(setup.params, d, t)
    h_ref = float(cfg.get("h_ref", 1e-6))
    return reference_solution(setup.system, q0, t_final, h_ref=h_ref,
                              field=setup.ode_field)


def cmd_convergence(cfg):
    setup, q0 = _build_model(cfg)
    methods = cfg.get("methods") or [_method_id(cfg)]
    for mid in methods:
        if mid not in METHOD_IDS:
            raise ConfigError(f"unknown method '{mid}'")
    t_final = float(_require(cfg, "t_final"))
    step_sizes = cfg.get("step_sizes")
    if step_sizes is None:
        step_sizes = list(np.geomspace(3.5e-1, 3.5e-3, int(cfg.get("n_steps", 9))))
    scfg = _solver_config(cfg)
    reference = _reference_for(cfg, setup, q0, t_final)

    out_dir = cfg["out_dir"]
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "convergence.csv")
    orders = {}
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "h", "err_q", "err_p", "fitted_order"])
        for mid in methods:
            rep = run_convergence(setup.system, mid, q0, t_final, step_sizes,
                                  reference, cfg=scfg)
            for h, eq, ep in zip(rep.step_sizes, rep.errors_q, rep.errors_p):
                writer.writerow([mid, _fmt(h),
                                 _fmt(eq) if eq is not None else "",
                                 _fmt(ep) if ep is not None else "", ""])
            orders[mid] = rep.fitted_order
            writer.writerow([mid, "", "", "",
                             _fmt(rep.fitted_order) if rep.fitted_order is not None
                             else ""])
    _write_manifest(os.path.join(out_dir, "convergence_manifest.json"), cfg, {
        "command": "convergence", "model": setup.system.name,
        "methods": list(methods), "t_final": t_final,
        "fitted_orders": orders, "solver": asdict(scfg),
    })
    return 0


def cmd_drift(cfg):
    setup, q0 = _build_model(cfg)
    method = _method_id(cfg)
    h = float(_require(cfg, "h"))
    t_final = float(_require(cfg, "t_final"))
    scfg = _solver_config(cfg)
    max_samples = int(cfg.get("max_samples", 2000))

    rep = run_drift(setup.system, method, q0, h, t_final,
                    max_samples=max_samples, cfg=scfg)
    out_dir = cfg["out_dir"]
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "drift.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "H", "constraint_residual"])
        for t, hv, res in zip(rep.sample_times, rep.hamiltonian_values,
                              rep.constraint_residuals):
            writer.writerow([_fmt(float(t)), _fmt(float(hv)), _fmt(float(res))])
    _write_manifest(os.path.join(out_dir, "drift_manifest.json"), cfg, {
        "command": "drift", "model": setup.system.name, "method": method,
        "h": h, "t_final": t_final, "solver": asdict(scfg),
        "linear_drift_rate": rep.linear_drift_rate,
        "truncated": rep.failure is not None, "failure": rep.failure,
    })
    if rep.failure is not None:
        print(f"drift run truncated: {rep.failure}", file=sys.stderr)
        return 3
    return 0


def cmd_tableau_check(cfg):
    for mid in METHOD_IDS:
        t = make_tableau(mid)
        sym = check_symplecticity(t)
        conds = check_order_conditions(t, t.classical_order)
        worst_b = max(res for name, res in conds if name.startswith("B"))
        print(f"{mid:11s} s={t.s} order={t.classical_order} "
              f"stiffly_accurate={t.stiffly_accurate} "
              f"symplecticity={sym:.3e} max_B_residual={worst_b:.3e}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="vprk",
        description="Variational partitioned Runge-Kutta integration "
                    "experiments for velocity-linear Lagrangian systems.")
    parser.add_argument("command",
                        choices=["run", "convergence", "drift", "tableau-check"])
    parser.add_argument("--model", help=f"one of {sorted(MODEL_BUILDERS)}")
    parser.add_argument("--method", help=f"one of {list(METHOD_IDS)}")
    parser.add_argument("--h", type=float, help="step size")
    parser.add_argument("--t-final", type=float, dest="t_final",
                        help="integration horizon")
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--out-dir", dest="out_dir", help="output directory")
    args = parser.parse_args(argv)

    dispatch = {
        "run": cmd_run,
        "convergence": cmd_convergence,
        "drift": cmd_drift,
        "tableau-check": cmd_tableau_check,
    }
    try:
        cfg = _load_config(args)
        return dispatch[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        # initial state outside the model domain is a configuration problem
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NewtonDivergence, SingularStageJacobian) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
