"""Command-line front end.

Every subcommand validates its arguments, runs the corresponding library
operation, and writes deterministic artifacts (CSV data plus a JSON metadata
echo of the resolved configuration) into the output directory.  Exit codes:
0 success, 1 validation error, 2 I/O error, 3 failed numerical check.

Values resolve as: command-line flag > config-file entry (--config, JSON) >
built-in default.  The worker count can also come from AGPFLOW_WORKERS.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import (
    CdConfig,
    RampProtocol,
    basis_state,
    dark_state_library,
    evolve,
)
from .landscape import (
    compute_field,
    coefficient_scan,
    gamma_sweep,
    integrate_streamline,
    line_cut,
    norm_scan,
    write_coefficient_scan_csv,
    write_flow_csv,
    write_gamma_csv,
    write_norm_scan_csv,
    write_streamline_csv,
)
from .pert import leading_g
from .util import fmt, resolve_workers
from .vagp import optimal_angle, radial_angle, solve

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_NUMERIC = 3


class ValidationError(Exception):
    pass


def _parse_phi(text: str, h: float, g: float) -> float:
    if text == "radial":
        return radial_angle(h, g)
    try:
        return float(text)
    except ValueError:
        raise ValidationError(f"--phi must be a number or 'radial', got {text!r}")


def _write_metadata(outdir: Path, command: str, config: dict):
    meta = {
        "command": command,
        "config": config,
        "artifact_version": __version__,
    }
    with open(outdir / f"{command}_meta.json", "w") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
        f.write("\n")


def _outdir(config) -> Path:
    out = Path(config["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_solve(config) -> int:
    k = config["k"]
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    h, g = config["h"], config["g"]
    phi = _parse_phi(str(config["phi"]), h, g)
    sol = solve((h, g), phi, k)
    payload = sol.to_json_dict()
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if config["out"] is None:
        sys.stdout.write(text)
    else:
        out = _outdir(config)
        (out / "solution.json").write_text(text)
        _write_metadata(out, "solve", config)
    return EXIT_OK


def cmd_flow(config) -> int:
    if config["res"] < 2:
        raise ValidationError("--res must be >= 2")
    if config["k"] < 1:
        raise ValidationError("k must be >= 1")
    field = compute_field(
        (config["hmin"], config["hmax"], config["gmin"], config["gmax"]),
        config["res"],
        config["k"],
        workers=resolve_workers(config["workers"]),
    )
    out = _outdir(config)
    write_flow_csv(field, out / "flow.csv")
    _write_metadata(out, "flow", config)
    return EXIT_OK


def cmd_streamline(config) -> int:
    if config["k"] < 1:
        raise ValidationError("k must be >= 1")
    domain = (config["hmin"], config["hmax"], config["gmin"], config["gmax"])
    line = integrate_streamline(
        config["k"],
        domain,
        (config["h"], config["g"]),
        (config["dh"], config["dg"]),
        step=config["step"],
        max_steps=config["max_steps"],
    )
    out = _outdir(config)
    write_streamline_csv(line, out / "streamline.csv")
    config = dict(config, termination=line.termination)
    _write_metadata(out, "streamline", config)
    return EXIT_OK


def cmd_scan(config) -> int:
    if config["k"] < 1:
        raise ValidationError("k must be >= 1")
    if config["rmin"] <= 0 or config["rmax"] <= config["rmin"]:
        raise ValidationError("need 0 < rmin < rmax")
    rs = np.geomspace(config["rmin"], config["rmax"], config["points"])
    theta = math.atan(config["slope"])
    out = _outdir(config)
    ns = norm_scan(theta, rs, config["k"], workers=resolve_workers(config["workers"]))
    write_norm_scan_csv(ns, out / "norm_scan.csv")
    cs = coefficient_scan(theta, rs, config["k"])
    write_coefficient_scan_csv(cs, out / "coefficient_scan.csv")
    config = dict(
        config,
        exponent_opt=ns.exponent_opt,
        exponent_orth=ns.exponent_orth,
    )
    _write_metadata(out, "scan", config)
    return EXIT_OK


def cmd_gamma(config) -> int:
    ks = [int(s) for s in str(config["k_list"]).split(",")]
    if any(k < 1 for k in ks):
        raise ValidationError("all ansatz sizes must be >= 1")
    values = np.linspace(config["cmin"], config["cmax"], config["points"])
    points = line_cut(config["axis"], config["fixed"], values)
    entries = gamma_sweep(points, ks, workers=resolve_workers(config["workers"]))
    out = _outdir(config)
    write_gamma_csv(entries, out / "gamma.csv")
    _write_metadata(out, "gamma", config)
    return EXIT_OK


def _run_protocol(config, initial, k):
    proto = RampProtocol(
        config["ramp"],
        config["T"],
        (config["h0"], config["g0"]),
        (config["h1"], config["g1"]),
    )
    dt = config["dt"] if config["dt"] is not None else 1e-3 * config["T"]
    return evolve(initial, proto, CdConfig(k=k), config["L"], dt=dt)


def _write_trace_csv(res, path):
    import csv

    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["t", "lambda", "h", "g", "energy", "variance"])
        for row in zip(res.times, res.lams, res.hs, res.gs, res.energies,
                       res.variances):
            w.writerow([fmt(x) for x in row])


def cmd_evolve(config) -> int:
    if config["L"] < 2 or config["L"] > 14:
        raise ValidationError("L must be between 2 and 14")
    if config["k"] < 0:
        raise ValidationError("k must be >= 0")
    if config["T"] <= 0:
        raise ValidationError("T must be > 0")
    pattern = config["initial"]
    if len(pattern) != config["L"]:
        raise ValidationError("initial pattern length must equal L")
    psi = basis_state(pattern)
    res = _run_protocol(config, psi, config["k"])
    out = _outdir(config)
    _write_trace_csv(res, out / "trace.csv")
    config = dict(config, final_variance=res.final_variance)
    _write_metadata(out, "evolve", config)
    return EXIT_OK


def cmd_dark(config) -> int:
    if config["L"] % 4:
        raise ValidationError("the dark-state scenario needs L divisible by 4")
    config = dict(
        config,
        ramp="sin_square",
        h0=2.0, g0=0.0, h1=2.0, g1=0.5,
    )
    lib = dark_state_library(config["L"])
    out = _outdir(config)
    report = {}
    for st in lib:
        if st.label not in ("period4_dark", "neel_bright"):
            continue
        psi = basis_state(st.pattern)
        for k in (0, config["k"]):
            res = _run_protocol(config, psi, k)
            tag = "unassisted" if k == 0 else f"cd_k{k}"
            report[f"{st.label}_{tag}"] = res.final_variance
            _write_trace_csv(res, out / f"dark_{st.label}_{tag}.csv")
    with open(out / "dark_report.json", "w") as f:
        json.dump(report, f, indent=2, sort_keys=True)
        f.write("\n")
    _write_metadata(out, "dark", config)
    return EXIT_OK


def cmd_pertcheck(config) -> int:
    """Compare the variational transverse solve against the closed-form oracle."""
    h, g, k, tol = config["h"], config["g"], config["k"], config["tol"]
    if k < 3:
        raise ValidationError("the oracle comparison needs k >= 3")
    sol = solve((h, g), math.pi / 2, k)
    var_op = sol.to_transop()
    oracle = leading_g(h)
    rows = []
    ok = True
    for w in sorted(set(var_op.terms) | set(oracle.terms),
                    key=lambda w: (len(w), w)):
        from .pauli import word_str

        cv = var_op.coeff(w).real
        co = oracle.coeff(w).real
        if co != 0.0:
            rel = abs(cv - co) / abs(co)
            passed = rel <= tol
        else:
            # words absent from the leading order must vanish with g
            rel = abs(cv)
            passed = rel <= max(10.0 * g, tol * 0.1)
        ok &= passed
        rows.append(
            {
                "word": word_str(w),
                "variational": cv,
                "oracle": co,
                "deviation": rel,
                "pass": bool(passed),
            }
        )
    report = {"h": h, "g": g, "k": k, "tol": tol, "all_pass": bool(ok),
              "rows": rows}
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if config["out"] is None:
        sys.stdout.write(text)
    else:
        out = _outdir(config)
        (out / "pertcheck.json").write_text(text)
        _write_metadata(out, "pertcheck", config)
    return EXIT_OK if ok else EXIT_NUMERIC


_COMMANDS = {
    "solve": cmd_solve,
    "flow": cmd_flow,
    "streamline": cmd_streamline,
    "scan": cmd_scan,
    "gamma": cmd_gamma,
    "evolve": cmd_evolve,
    "dark": cmd_dark,
    "pertcheck": cmd_pertcheck,
}


def _add_common(p):
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--out", help="output directory (default: print or cwd)")
    p.add_argument("--workers", type=int, help="worker processes for sweeps")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="agpflow",
        description="Local adiabatic gauge potentials for the mixed-field "
        "Ising chain: solves, flow maps, scans, decay rates, protocols.",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="one variational solve, JSON output")
    p.add_argument("--h", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--phi", help="angle in radians, or 'radial'")
    p.add_argument("--k", type=int)
    _add_common(p)

    p = sub.add_parser("flow", help="optimal-direction field on a grid")
    for name in ("hmin", "hmax", "gmin", "gmax"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--res", type=int, help="grid points per axis")
    p.add_argument("--k", type=int)
    _add_common(p)

    p = sub.add_parser("streamline", help="trace one optimal-direction line")
    for name in ("hmin", "hmax", "gmin", "gmax", "h", "g", "dh", "dg", "step"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--max-steps", dest="max_steps", type=int)
    p.add_argument("--k", type=int)
    _add_common(p)

    p = sub.add_parser("scan", help="norm and coefficient scans along a ray")
    p.add_argument("--slope", type=float, help="ray slope g/h")
    p.add_argument("--rmin", type=float)
    p.add_argument("--rmax", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--k", type=int)
    _add_common(p)

    p = sub.add_parser("gamma", help="decay-rate sweep along a cut")
    p.add_argument("--axis", choices=("h", "g", "diag"))
    p.add_argument("--fixed", type=float, help="the frozen coupling value")
    p.add_argument("--cmin", type=float)
    p.add_argument("--cmax", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--k-list", dest="k_list", help="comma-separated sizes")
    _add_common(p)

    p = sub.add_parser("evolve", help="driven protocol from a product state")
    p.add_argument("--L", type=int)
    p.add_argument("--T", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--ramp", choices=("sin_square", "linear"))
    for name in ("h0", "g0", "h1", "g1"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--initial", help="product state pattern, e.g. uudduudd")
    _add_common(p)

    p = sub.add_parser("dark", help="protected-state preparation scenario")
    p.add_argument("--L", type=int)
    p.add_argument("--T", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--k", type=int)
    _add_common(p)

    p = sub.add_parser("pertcheck", help="variational vs closed-form oracle")
    p.add_argument("--h", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--tol", type=float)
    _add_common(p)

    return ap


_DEFAULTS = {
    "solve": {"h": 1.0, "g": 0.0, "phi": "radial", "k": 3, "out": None},
    "flow": {"hmin": 0.0, "hmax": 3.0, "gmin": 0.0, "gmax": 2.0, "res": 30,
             "k": 3, "out": "."},
    "streamline": {"hmin": -1.0, "hmax": 4.0, "gmin": -2.0, "gmax": 2.0,
                   "h": 0.3, "g": 0.3, "dh": -1.0, "dg": -1.0, "step": 0.01,
                   "max_steps": 2000, "k": 3, "out": "."},
    "scan": {"slope": 0.2, "rmin": 0.01, "rmax": 0.4, "points": 13, "k": 3,
             "out": "."},
    "gamma": {"axis": "g", "fixed": 0.15, "cmin": 0.1, "cmax": 2.0,
              "points": 20, "k_list": "3", "out": "."},
    "evolve": {"L": 8, "T": 1.0, "dt": None, "k": 0, "ramp": "sin_square",
               "h0": 0.01, "g0": 0.01, "h1": 0.5, "g1": 0.5,
               "initial": "udududud", "out": "."},
    "dark": {"L": 12, "T": 1.0, "dt": None, "k": 3, "out": "."},
    "pertcheck": {"h": 1.0, "g": 1e-3, "k": 3, "tol": 1e-2, "out": None},
}


def resolve_config(args: argparse.Namespace) -> dict:
    config = dict(_DEFAULTS[args.command])
    config["workers"] = None
    if getattr(args, "config", None):
        try:
            loaded = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise OSError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config file is not valid JSON: {exc}")
        unknown = set(loaded) - set(config)
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        config.update(loaded)
    for key in config:
        val = getattr(args, key, None)
        if val is not None:
            config[key] = val
    return config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
        return _COMMANDS[args.command](config)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ValueError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
