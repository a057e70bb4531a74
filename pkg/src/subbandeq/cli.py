"""Command line: solve, verify, validate, sweep.

Configuration is a single JSON file; every key has a default, so the
minimal config is {"M_target": 1.0}.  All outputs are deterministic
functions of (config, seed): CSV columns are written in scientific
notation with 17 significant digits (lossless doubles) and JSON reports
re-serialize byte-identically.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .equilibrium import SolverConfig, solve_equilibrium
from .grid import Grid
from .occupancy import OccupancyModel
from .validation import run_validation
from .verify import run_verification

FLOAT_FMT = "%.16e"

CONFIG_DEFAULTS = {
    "M_target": 1.0,
    "T": 0.0,
    "beta_p": 2.0,
    "grid": {"ny1": 16, "ny2": 16, "nz": 32, "L1": 1.0, "L2": 1.0},
    "vext": {"kind": "zero", "amplitude": 8.0},
    "theta": 0.5,
    "fp_tol": 1e-8,
    "max_outer": 300,
    "j_margin": 2,
    "init": {"kind": "zero", "seed": 0},
    "poisson_tol": 1e-10,
    "verify": {"n_pairs": 10, "n_perturbations": 12, "unsorted_probe": False},
}


class ConfigError(ValueError):
    pass


def _merge_section(name: str, user: dict) -> dict:
    merged = dict(CONFIG_DEFAULTS[name])
    for key, val in user.items():
        if key not in merged:
            raise ConfigError(f"unknown key {name}.{key!r}")
        merged[key] = val
    return merged


def load_config(path) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    merged = {}
    for key, default in CONFIG_DEFAULTS.items():
        if isinstance(default, dict):
            user = raw.get(key, {})
            if not isinstance(user, dict):
                raise ConfigError(f"section {key!r} must be an object")
            merged[key] = _merge_section(key, user)
        else:
            merged[key] = raw.get(key, default)
    unknown = set(raw) - set(CONFIG_DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return merged


def solver_config(cfg: dict) -> SolverConfig:
    g = cfg["grid"]
    try:
        return SolverConfig(
            M_target=float(cfg["M_target"]),
            model=OccupancyModel(T=float(cfg["T"]), p=float(cfg["beta_p"])),
            grid=Grid(
                ny1=int(g["ny1"]),
                ny2=int(g["ny2"]),
                nz=int(g["nz"]),
                L1=float(g["L1"]),
                L2=float(g["L2"]),
            ),
            vext_kind=str(cfg["vext"]["kind"]),
            vext_amplitude=float(cfg["vext"]["amplitude"]),
            theta=float(cfg["theta"]),
            fp_tol=float(cfg["fp_tol"]),
            max_outer=int(cfg["max_outer"]),
            j_margin=int(cfg["j_margin"]),
            init_kind=str(cfg["init"]["kind"]),
            init_seed=int(cfg["init"]["seed"]),
            poisson_tol=float(cfg["poisson_tol"]),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(
                ",".join(
                    FLOAT_FMT % v if isinstance(v, float) else str(v) for v in row
                )
                + "\n"
            )


def _write_solution(state, trace, cfg: SolverConfig, out: Path) -> None:
    grid = cfg.grid
    gaps = state.mu - state.spectrum.lam
    j_active = int(np.sum(np.max(gaps, axis=(0, 1)) > 0.0))
    _dump_json(
        {
            "mu": state.mu,
            "J_active": j_active,
            "free_energy": state.energy.as_dict(),
            "residual": trace.residuals[-1] if trace.residuals else None,
            "iterations": trace.iterations,
            "converged": trace.converged,
            "mass": state.mass(grid),
        },
        out / "state.json",
    )
    y1 = grid.y1_nodes()
    y2 = grid.y2_nodes()
    z = grid.z_nodes()
    rows = []
    for i in range(grid.ny1):
        for k in range(grid.ny2):
            for m in range(grid.nz + 1):
                rows.append(
                    (
                        float(y1[i]),
                        float(y2[k]),
                        float(z[m]),
                        float(state.U.values[i, k, m]),
                        float(state.rho.values[i, k, m]),
                    )
                )
    _write_csv(out / "fields.csv", ["y1", "y2", "z", "U", "rho"], rows)
    rows = []
    for i in range(grid.ny1):
        for k in range(grid.ny2):
            for j in range(state.spectrum.J):
                rows.append(
                    (
                        float(y1[i]),
                        float(y2[k]),
                        j + 1,
                        float(state.spectrum.lam[i, k, j]),
                    )
                )
    _write_csv(out / "spectrum.csv", ["y1", "y2", "j", "lambda"], rows)
    _write_trace(trace, out)


def _write_trace(trace, out: Path) -> None:
    rows = [
        (i + 1, trace.residuals[i], trace.mus[i], trace.free_energies[i], trace.thetas[i])
        for i in range(trace.iterations)
    ]
    _write_csv(out / "trace.csv", ["iter", "residual", "mu", "F", "theta"], rows)


def cmd_solve(args) -> int:
    cfg_dict = load_config(args.config)
    cfg = solver_config(cfg_dict)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    state, trace = solve_equilibrium(cfg)
    _write_solution(state, trace, cfg, out)
    return 0 if trace.converged else 2


def cmd_verify(args) -> int:
    cfg_dict = load_config(args.config)
    cfg = solver_config(cfg_dict)
    v = cfg_dict["verify"]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    reports = run_verification(
        cfg,
        seed=args.seed,
        n_pairs=int(v["n_pairs"]),
        n_perturbations=int(v["n_perturbations"]),
        include_unsorted_probe=bool(v["unsorted_probe"]),
    )
    _dump_json(
        {"seed": args.seed, "checks": [r.as_dict() for r in reports]},
        out / "verify_report.json",
    )
    return 0 if all(r.passed for r in reports) else 1


def cmd_validate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report = run_validation()
    _dump_json(report, out / "validate_report.json")
    return 0 if report["pass"] else 1


def cmd_sweep(args) -> int:
    if not args.values:
        print("sweep needs a non-empty --values list", file=sys.stderr)
        return 1
    if args.param not in ("M", "T"):
        print(f"unknown sweep parameter {args.param!r}", file=sys.stderr)
        return 1
    cfg_dict = load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    mus = []
    for value in args.values:
        local = json.loads(json.dumps(cfg_dict))
        if args.param == "M":
            local["M_target"] = value
        else:
            local["T"] = value
        cfg = solver_config(local)
        state, trace = solve_equilibrium(cfg)
        if not trace.converged:
            print(f"sweep value {value} did not converge", file=sys.stderr)
            return 2
        gaps = state.mu - state.spectrum.lam
        j_active = int(np.sum(np.max(gaps, axis=(0, 1)) > 0.0))
        mus.append(state.mu)
        rows.append(
            (
                float(value),
                state.mu,
                j_active,
                state.energy.total_direct,
                trace.iterations,
            )
        )
    _write_csv(
        out / "sweep.csv", ["value", "mu", "J_active", "F_total", "iterations"], rows
    )
    if args.param == "M":
        monotone = bool(np.all(np.diff(mus) >= 0.0))
        print(f"mu monotone nondecreasing in M: {monotone}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subbandeq",
        description="Self-consistent subband equilibria: solve, verify, validate, sweep.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="JSON configuration file")
        p.add_argument("--out", required=True, help="output directory")

    p_solve = sub.add_parser("solve", help="run one equilibrium solve")
    add_common(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_verify = sub.add_parser("verify", help="solve and run every structural check")
    add_common(p_verify)
    p_verify.add_argument("--seed", type=int, default=42, help="randomized-check seed")
    p_verify.set_defaults(func=cmd_verify)

    p_validate = sub.add_parser("validate", help="run the discretization studies")
    add_common(p_validate, config=False)
    p_validate.set_defaults(func=cmd_validate)

    p_sweep = sub.add_parser("sweep", help="solve across a parameter range")
    add_common(p_sweep)
    p_sweep.add_argument("--param", required=True, help="M or T")
    p_sweep.add_argument(
        "--values",
        required=True,
        type=lambda s: [float(v) for v in s.split(",") if v != ""],
        help="comma-separated list of parameter values",
    )
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # solver/check failures surface with exit 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
