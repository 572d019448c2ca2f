"""Command-line interface: scenario execution and bit-stable data emission.

Subcommands: equilibrium, simulate, spectrum, beta, manifold, fit, verify,
sweep.  All file output is atomic (temp file + rename) and deterministic
for a fixed (config, seed); floats are emitted with 17 significant digits
so they round-trip exactly.

Exit codes: 0 success, 1 failed verify criterion, 2 bad config,
3 numerical failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from .config import RunConfig, load_config
from .errors import BubbleLabError, ConfigError, IoError, NumericalFailure

__all__ = ["main", "run_simulate", "write_csv_atomic", "write_json_atomic"]

_FLOAT_FMT = "{:.17g}"


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return _FLOAT_FMT.format(float(x))
    return str(x)


def _atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path)) or "."
    try:
        fd, tmp = tempfile.mkstemp(dir=d, prefix=".bubblelab-", suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def write_csv_atomic(path: str, columns: dict):
    names = list(columns.keys())
    n = len(next(iter(columns.values())))
    lines = [",".join(names)]
    for i in range(n):
        lines.append(",".join(_fmt(columns[name][i]) for name in names))
    _atomic_write(path, "\n".join(lines) + "\n")


def _jsonify(obj):
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, complex):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    return obj


def write_json_atomic(path: str, payload: dict):
    _atomic_write(path, json.dumps(_jsonify(payload), indent=2,
                                   sort_keys=True) + "\n")


# --------------------------------------------------------------------------
# subcommand implementations
# --------------------------------------------------------------------------

def _setup(cfg: RunConfig):
    from .equilibria import solve_equilibrium

    eq = solve_equilibrium(cfg.params, cfg.mass)
    if not cfg.params.sigma_coercive_for(eq.R_star):
        raise ConfigError(
            f"sigma={cfg.params.sigma} violates sigma > -(3/4) p_inf R* "
            f"= {-0.75 * cfg.params.p_inf_star * eq.R_star}")
    return eq


def cmd_equilibrium(cfg: RunConfig, args) -> int:
    eq = _setup(cfg)
    payload = {"mass": eq.mass, "R_star": eq.R_star, "rho_star": eq.rho_star,
               "p_star": eq.p_star}
    if args.output:
        write_json_atomic(args.output, payload)
    print(json.dumps(_jsonify(payload), sort_keys=True))
    return 0


def run_simulate(cfg: RunConfig, out_prefix: str):
    """Run the configured solver(s); returns dict of written files."""
    from .diagnostics import CSV_COLUMNS, trajectory_diagnostics
    from .dynamics import initial_fd, initial_w, simulate_fd, simulate_w

    eq = _setup(cfg)
    rho0, R0, R0_dot = cfg.initial_data(eq)
    written = {}
    trajs = {}
    if cfg.solver in ("galerkin", "both"):
        w0 = initial_w(cfg.params, eq, rho0, R0, R0_dot, cfg.J)
        trajs["galerkin"] = simulate_w(cfg.params, eq, w0, cfg.T, tol=cfg.tol,
                                       dt_out=cfg.dt_out, forcing=cfg.forcing)
    if cfg.solver in ("fd", "both"):
        g0 = initial_fd(rho0, R0, R0_dot, cfg.N)
        trajs["fd"] = simulate_fd(cfg.params, eq, g0, cfg.T, tol=cfg.tol,
                                  dt_out=cfg.dt_out, forcing=cfg.forcing)
    summary = {"solver": cfg.solver, "J": cfg.J, "N": cfg.N, "T": cfg.T,
               "tol": cfg.tol, "mass": cfg.mass, "seed": cfg.seed,
               "R_star": eq.R_star, "rho_star": eq.rho_star}
    for name, traj in trajs.items():
        d = trajectory_diagnostics(traj)
        path = f"{out_prefix}_{name}.csv"
        write_csv_atomic(path, {k: d[k] for k in CSV_COLUMNS})
        written[name] = path
        summary[f"{name}_stats"] = traj.stats
        summary[f"{name}_final_R"] = float(d["R"][-1])
        summary[f"{name}_mass_drift"] = float(
            np.max(np.abs(d["mass"] - d["mass"][0])) / d["mass"][0])
    if cfg.solver == "both":
        dw = trajs["galerkin"]
        df = trajs["fd"]
        Rw = eq.R_star + dw.states[:, 1]
        Rf = df.states[:, -2]
        summary["max_R_gap"] = float(np.max(np.abs(Rw - Rf)))
    path = f"{out_prefix}_summary.json"
    write_json_atomic(path, summary)
    written["summary"] = path
    return written


def cmd_simulate(cfg: RunConfig, args) -> int:
    written = run_simulate(cfg, args.output_prefix)
    print(json.dumps(_jsonify(written), sort_keys=True))
    return 0


def cmd_spectrum(cfg: RunConfig, args) -> int:
    from .dispersion import beta_bound, find_roots
    from .linearized import (assemble_L, eigenvalues, eigenvalues_tail_closed,
                             kernel_eigenvalue_count, spectral_abscissa)
    from .model import kappa_bar

    eq = _setup(cfg)
    J = cfg.J
    eigs = eigenvalues(assemble_L(cfg.params, eq, J))
    eigs_closed = eigenvalues_tail_closed(cfg.params, eq, J)
    kb = kappa_bar(cfg.params, eq)
    box = (-1.05 * kb * (max(J // 4, 1) * np.pi) ** 2 - 5.0, 1.0, -20.0, 20.0)
    roots = find_roots(cfg.params, eq, box)
    bb = beta_bound(cfg.params, eq)
    mismatch = max(float(np.min(np.abs(eigs_closed - r))) for r in roots)
    order = np.argsort(-eigs.real)
    payload = {
        "J": J,
        "eigenvalues": eigs[order],
        "eigenvalues_tail_closed": eigs_closed[np.argsort(-eigs_closed.real)],
        "q_roots": roots[np.argsort(-roots.real)],
        "beta": bb.as_dict(),
        "spectral_abscissa": spectral_abscissa(eigs),
        "kernel_count": kernel_eigenvalue_count(eigs),
        "root_eig_mismatch": mismatch,
        "search_box": list(box),
    }
    if args.output:
        write_json_atomic(args.output, payload)
    print(json.dumps(_jsonify(payload), sort_keys=True))
    return 0


def cmd_beta(cfg: RunConfig, args) -> int:
    from .dispersion import beta_bound

    eq = _setup(cfg)
    payload = beta_bound(cfg.params, eq).as_dict()
    if args.output:
        write_json_atomic(args.output, payload)
    print(json.dumps(_jsonify(payload), sort_keys=True))
    return 0


def cmd_manifold(cfg: RunConfig, args) -> int:
    from .dynamics import WSystem
    from .manifold import h_of_alpha

    eq = _setup(cfg)
    system = WSystem(cfg.params, eq, cfg.J)
    alphas = np.linspace(-args.alpha_max, args.alpha_max, args.n_points)
    rows = {"alpha": [], "R_ss": [], "rho_ss": [], "rhs_residual": []}
    for a in alphas:
        mp = h_of_alpha(cfg.params, eq, float(a), J=cfg.J)
        rows["alpha"].append(float(a))
        rows["R_ss"].append(mp.R_ss)
        rows["rho_ss"].append(mp.rho_ss)
        rows["rhs_residual"].append(float(np.max(np.abs(system.rhs(0.0, mp.w)))))
    write_csv_atomic(args.output, rows)
    print(args.output)
    return 0


def cmd_fit(cfg: RunConfig, args) -> int:
    from .observe import fit_decay

    if not os.path.exists(args.input):
        raise IoError(f"input CSV not found: {args.input}")
    with open(args.input, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",")
    if args.quantity not in header:
        raise ConfigError(f"column {args.quantity!r} not in {args.input}")
    t = data[:, header.index("t")]
    v = data[:, header.index(args.quantity)]
    fit = fit_decay(t, v, lo=args.window_lo, hi=args.window_hi)
    payload = {"rate": fit.rate, "intercept": fit.intercept,
               "window": list(fit.window), "r_squared": fit.r_squared,
               "n_points": fit.n_points, "quantity": args.quantity}
    if args.output:
        write_json_atomic(args.output, payload)
    print(json.dumps(_jsonify(payload), sort_keys=True))
    return 0


def cmd_verify(cfg: RunConfig, args) -> int:
    from .verify import run_battery

    results = run_battery(tol=cfg.tol)
    return 0 if all(r.passed for r in results) else 1


def cmd_sweep(cfg: RunConfig, args) -> int:
    from concurrent.futures import ProcessPoolExecutor

    values = [float(v) for v in args.values.split(",")]
    workers = int(os.environ.get("BUBBLELAB_THREADS", "0")) or None
    os.makedirs(args.output_dir, exist_ok=True)
    jobs = []
    for v in values:
        kv = dict(cfg.raw)
        kv[args.key] = v
        jobs.append((kv, os.path.join(args.output_dir,
                                      f"sweep_{args.key.replace('.', '_')}_{v:g}")))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_sweep_one, kv, prefix) for kv, prefix in jobs]
        outputs = [f.result() for f in futures]
    print(json.dumps(_jsonify({"runs": outputs}), sort_keys=True))
    return 0


def _sweep_one(kv: dict, prefix: str):
    from .config import config_from_dict

    cfg = config_from_dict(kv)
    return run_simulate(cfg, prefix)


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bubblelab",
        description="Thermally damped spherical bubble laboratory")
    ap.add_argument("--config", help="key = value config file")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="override one config entry (repeatable)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("equilibrium", help="solve the equilibrium for a mass")
    p.add_argument("--mass", type=float, help="bubble mass (overrides config)")
    p.add_argument("--output", help="write JSON here as well")
    p.set_defaults(fn=cmd_equilibrium)

    p = sub.add_parser("simulate", help="integrate the bubble in time")
    p.add_argument("--solver", choices=["galerkin", "fd", "both"])
    p.add_argument("--T", type=float)
    p.add_argument("--J", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--output-prefix", default="bubblelab_run")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("spectrum", help="eigenvalues, Q-roots, beta")
    p.add_argument("--J", type=int)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("beta", help="explicit decay bound")
    p.add_argument("--output")
    p.set_defaults(fn=cmd_beta)

    p = sub.add_parser("manifold", help="tabulate the equilibrium manifold chart")
    p.add_argument("--alpha-max", type=float, default=0.1)
    p.add_argument("--n-points", type=int, default=21)
    p.add_argument("--output", default="manifold.csv")
    p.set_defaults(fn=cmd_manifold)

    p = sub.add_parser("fit", help="fit an exponential rate from a run CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--quantity", default="dist_manifold")
    p.add_argument("--window-lo", type=float, default=1e-8)
    p.add_argument("--window-hi", type=float, default=1e-3)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_fit)

    p = sub.add_parser("verify", help="run the acceptance battery")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("sweep", help="fan out simulate over a parameter axis")
    p.add_argument("--key", required=True, help="config key, e.g. params.sigma")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--output-dir", default="sweep_out")
    p.set_defaults(fn=cmd_sweep)
    return ap


def _overrides_from_args(args) -> dict:
    kv = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, val = item.split("=", 1)
        from .config import _parse_value

        kv[key.strip()] = _parse_value(val)
    mapping = {"mass": "run.mass", "solver": "run.solver", "T": "run.T",
               "J": "run.J", "N": "run.N", "tol": "run.tol"}
    for attr, key in mapping.items():
        val = getattr(args, attr, None)
        if val is not None:
            kv[key] = val
    return kv


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, _overrides_from_args(args))
        return args.fn(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except IoError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 4
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except BubbleLabError as exc:  # pragma: no cover - catch-all guard
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
