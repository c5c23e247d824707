"""Command line entry point: verification suites and spectrum output.

Every check prints a JSON report on stdout and exits 0 on pass, 1 on a
failed check and 2 on invalid input.  Options may also come from a JSON
file given with ``--config``; flags on the command line win.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

from . import checks
from .giv import Construction, dof_count
from .hofstadter import (
    MAX_REAL_SPACE_SITES,
    HofstadterParams,
    band_matrix_order,
    butterfly,
    pi_flux_deviation,
    real_space_spectrum,
    spectra_coincide,
    spectrum,
    write_butterfly_csv,
    write_spectrum_csv,
)
from .lattice import BoundaryCondition, LatticeGeometry

OUTPUT_DIR_ENV = "GIVLATTICE_OUTPUT_DIR"

EXIT_PASS, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class ConfigError(ValueError):
    pass


# per-command defaults; None marks a required value
DEFAULTS = {
    "roundtrip": {"dim": None, "size": None, "bc": "periodic", "construction": "asymmetric",
                  "trials": 100, "seed": None, "tol": 1e-12},
    "dof": {"dim": None, "size": None, "bc": "open", "construction": "asymmetric"},
    "gauge-orbit": {"dim": None, "size": None, "bc": "periodic", "construction": "asymmetric",
                    "trials": 100, "seed": None, "tol": 1e-12},
    "bianchi": {"dim": 3, "size": None, "bc": "open", "trials": 100, "seed": None, "tol": 1e-12},
    "action-check": {"dim": 3, "size": None, "beta": 1.0, "trials": 100, "seed": None, "tol": 1e-10},
    "twist-check": {"dim": 2, "size": None, "construction": "asymmetric", "alpha": 0.5,
                    "trials": 20, "seed": None, "tol": 1e-12},
    "spectrum": {"spatial_dim": 2, "m": None, "n": None, "kappa": None, "size": None,
                 "construction": "asymmetric", "t": 1.0, "theta": None, "compare": False,
                 "tol": 1e-8, "analytic_tol": 1e-10, "output": None},
    "butterfly": {"n_max": None, "spatial_dim": 2, "kappa": 1, "t": 1.0, "output": None},
}


def _add_common(p: argparse.ArgumentParser, names: set[str]):
    p.add_argument("--config", type=Path, help="JSON file with option values")
    p.add_argument("--report", type=Path, help="also write the report (without timing) to this file")
    if "dim" in names:
        p.add_argument("--dim", type=int, help="number of lattice directions (spacetime dimension)")
    if "size" in names:
        p.add_argument("--size", "-N", type=int, help="sites per direction")
    if "bc" in names:
        p.add_argument("--bc", choices=[b.value for b in BoundaryCondition])
    if "construction" in names:
        p.add_argument("--construction", choices=[c.value for c in Construction])
    if "trials" in names:
        p.add_argument("--trials", type=int)
    if "seed" in names:
        p.add_argument("--seed", type=int, help="seed for the random configurations (required)")
    if "tol" in names:
        p.add_argument("--tol", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="givlattice", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "roundtrip": "extract and reconstruct random link configurations",
        "dof": "compare variable counts with the closed forms",
        "gauge-orbit": "check gauge invariance of strips and loops",
        "bianchi": "Bianchi identity of reconstructed configurations",
        "action-check": "link vs strip form of the (2+1)d action",
        "twist-check": "transition data and twisted periodic boundaries",
        "spectrum": "Hofstadter spectrum from magnetic band matrices",
        "butterfly": "energies for all coprime fluxes m/n up to n_max",
    }
    for name, defaults in DEFAULTS.items():
        p = sub.add_parser(name, help=helps[name])
        _add_common(p, set(defaults))
        if name == "action-check":
            p.add_argument("--beta", type=float)
        if name == "twist-check":
            p.add_argument("--alpha", type=float, help="slope of the transition function phi_0 = alpha n_1")
        if name in ("spectrum", "butterfly"):
            p.add_argument("--spatial-dim", dest="spatial_dim", type=int, choices=[2, 3])
            p.add_argument("--t", type=float, help="hopping amplitude")
            p.add_argument("--kappa", type=int)
            p.add_argument("--output", "-o", type=Path, help="CSV path (default: output directory)")
        if name == "spectrum":
            p.add_argument("--m", type=int)
            p.add_argument("--n", type=int)
            p.add_argument("--theta", type=float, nargs="+")
            p.add_argument("--compare", action="store_true", default=None,
                           help="also run the other construction at the same N")
            p.add_argument("--analytic-tol", dest="analytic_tol", type=float)
        if name == "butterfly":
            p.add_argument("--n-max", dest="n_max", type=int)
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    file_cfg = {}
    if args.config is not None:
        try:
            file_cfg = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        file_cfg = {k.replace("-", "_"): v for k, v in file_cfg.items()}
    defaults = DEFAULTS[args.command]
    unknown = set(file_cfg) - set(defaults) - {"command"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    cfg = {}
    for key, default in defaults.items():
        flag = getattr(args, key, None)
        cfg[key] = flag if flag is not None else file_cfg.get(key, default)
    return cfg


def _require(cfg: dict, *keys: str):
    for k in keys:
        if cfg.get(k) is None:
            raise ConfigError(f"missing required option: {k}")


def _positive_int(cfg: dict, key: str) -> int:
    v = cfg[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise ConfigError(f"{key} must be a positive integer, got {v!r}")
    return v


def _geometry(cfg: dict) -> LatticeGeometry:
    _require(cfg, "dim", "size")
    try:
        return LatticeGeometry(int(cfg["dim"]), int(cfg["size"]), BoundaryCondition(cfg.get("bc", "periodic")))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _report(check: str, max_violation: float, tol: float, elapsed: float, seed=None, **extra) -> dict:
    passed = max_violation is not None and math.isfinite(max_violation) and max_violation <= tol
    out = {"check": check, "pass": bool(passed), "max_violation": max_violation, "tolerance": tol,
           "elapsed": round(elapsed, 6), "seed": seed}
    out.update(extra)
    return out


def _output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, "."))


# ---------------------------------------------------------------------------

def cmd_roundtrip(cfg: dict) -> dict:
    _require(cfg, "seed")
    g = _geometry(cfg)
    start = time.perf_counter()
    v = checks.roundtrip_violation(g, cfg["construction"], _positive_int(cfg, "trials"), cfg["seed"])
    return _report("roundtrip", v, cfg["tol"], time.perf_counter() - start, cfg["seed"], **g.to_dict(),
                   construction=cfg["construction"], trials=cfg["trials"])


def cmd_dof(cfg: dict) -> dict:
    g = _geometry(cfg)
    start = time.perf_counter()
    v = checks.dof_violation(g, cfg["construction"])
    c = dof_count(g, cfg["construction"])
    return _report("dof", v, 0, time.perf_counter() - start, None, **g.to_dict(),
                   n_phi=c.n_phi, n_strips=c.n_strips, n_loops=c.n_loops, n_links=c.n_links,
                   total=c.total)


def cmd_gauge_orbit(cfg: dict) -> dict:
    _require(cfg, "seed")
    g = _geometry(cfg)
    start = time.perf_counter()
    v = checks.gauge_orbit_violation(g, cfg["construction"], _positive_int(cfg, "trials"), cfg["seed"])
    return _report("gauge-orbit", v, cfg["tol"], time.perf_counter() - start, cfg["seed"], **g.to_dict(),
                   construction=cfg["construction"], trials=cfg["trials"])


def cmd_bianchi(cfg: dict) -> dict:
    _require(cfg, "seed")
    g = _geometry(cfg)
    if g.dim < 3:
        raise ConfigError("the Bianchi identity needs at least three directions")
    start = time.perf_counter()
    v = checks.bianchi_violation(g, _positive_int(cfg, "trials"), cfg["seed"])
    return _report("bianchi", v, cfg["tol"], time.perf_counter() - start, cfg["seed"], **g.to_dict(),
                   trials=cfg["trials"])


def cmd_action_check(cfg: dict) -> dict:
    _require(cfg, "seed", "size")
    if cfg["dim"] != 3:
        raise ConfigError("the strip form of the action is only available in three dimensions")
    size = _positive_int(cfg, "size")
    if size < 2:
        raise ConfigError("size must be at least 2")
    beta = cfg["beta"]
    if not isinstance(beta, (int, float)) or not math.isfinite(beta) or beta < 0:
        raise ConfigError(f"beta must be finite and non-negative, got {beta!r}")
    start = time.perf_counter()
    r = checks.action_check(size, float(beta), _positive_int(cfg, "trials"), cfg["seed"])
    violation = max(r.rel_err, r.bianchi)
    return _report("action-check", violation, cfg["tol"], time.perf_counter() - start, cfg["seed"],
                   size=size, trials=cfg["trials"], beta=r.beta, S_links=r.S_links,
                   S_strips=r.S_strips, rel_err=r.rel_err, bianchi=r.bianchi)


def cmd_twist_check(cfg: dict) -> dict:
    _require(cfg, "seed")
    cfg = dict(cfg, bc="periodic")
    g = _geometry(cfg)
    start = time.perf_counter()
    try:
        v = checks.twist_violation(g, float(cfg["alpha"]), _positive_int(cfg, "trials"), cfg["seed"],
                                   cfg["construction"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return _report("twist-check", v, cfg["tol"], time.perf_counter() - start, cfg["seed"], **g.to_dict(),
                   construction=cfg["construction"], alpha=cfg["alpha"], trials=cfg["trials"])


def _hofstadter_params(cfg: dict, construction: Construction) -> HofstadterParams:
    _require(cfg, "m", "n")
    try:
        if cfg["size"] is not None:
            return HofstadterParams.for_size(cfg["spatial_dim"], cfg["m"], cfg["n"], cfg["size"],
                                             construction, cfg["t"], cfg["theta"])
        return HofstadterParams(cfg["spatial_dim"], cfg["m"], cfg["n"], cfg["kappa"] or 1,
                                cfg["t"], cfg["theta"])
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def cmd_spectrum(cfg: dict) -> dict:
    construction = Construction(cfg["construction"])
    params = _hofstadter_params(cfg, construction)
    N = params.size(construction)
    start = time.perf_counter()
    spec = spectrum(params, construction)
    out = Path(cfg["output"]) if cfg["output"] else (
        _output_dir() / f"spectrum_{params.spatial_dim}d_m{params.m}_n{params.n}_{construction.value}_N{N}.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    write_spectrum_csv(spec, out)

    sub: dict = {}
    violation = 0.0
    tol = cfg["tol"]
    if N ** params.spatial_dim <= MAX_REAL_SPACE_SITES:
        r = spectra_coincide(spec, real_space_spectrum(params, construction), tol)
        sub["real_space"] = r
        violation = max(violation, r["max_abs_diff"] if r["pass"] else math.inf)
    if cfg["compare"]:
        other = Construction.SYMMETRIC if construction is Construction.ASYMMETRIC else Construction.ASYMMETRIC
        oparams = _hofstadter_params(dict(cfg, size=N), other)
        r = spectra_coincide(spec, spectrum(oparams, other), tol)
        sub["compare"] = {"construction": other.value, **r}
        violation = max(violation, r["max_abs_diff"] if r["pass"] else math.inf)
    analytic_pass = True
    if params.m == 1 and params.n == 2 and construction is Construction.ASYMMETRIC:
        diff = pi_flux_deviation(spec, params.t)
        sub["pi_flux"] = {"max_abs_diff": diff, "tol": cfg["analytic_tol"],
                          "pass": diff <= cfg["analytic_tol"]}
        analytic_pass = diff <= cfg["analytic_tol"]
    rep = _report("spectrum", violation, tol, time.perf_counter() - start, None,
                  spatial_dim=params.spatial_dim, m=params.m, n=params.n, size=N,
                  construction=construction.value, matrix_order=band_matrix_order(params, construction),
                  n_eigenvalues=len(spec), csv=str(out), **sub)
    rep["pass"] = rep["pass"] and analytic_pass
    return rep


def cmd_butterfly(cfg: dict) -> dict:
    _require(cfg, "n_max")
    n_max = _positive_int(cfg, "n_max")
    if n_max > 40:
        raise ConfigError("n_max must not exceed 40")
    if cfg["spatial_dim"] not in (2, 3):
        raise ConfigError("spatial_dim must be 2 or 3")
    start = time.perf_counter()
    rows = butterfly(n_max, cfg["spatial_dim"], _positive_int(cfg, "kappa"), cfg["t"])
    out = Path(cfg["output"]) if cfg["output"] else _output_dir() / f"butterfly_{cfg['spatial_dim']}d_nmax{n_max}.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_butterfly_csv(rows, out)
    pairs = sorted({(m, n) for m, n, _ in rows}, key=lambda p: (p[1], p[0]))
    return {"check": "butterfly", "pass": True, "rows": len(rows), "pairs": [list(p) for p in pairs],
            "csv": str(out), "elapsed": round(time.perf_counter() - start, 6)}


COMMANDS = {
    "roundtrip": cmd_roundtrip,
    "dof": cmd_dof,
    "gauge-orbit": cmd_gauge_orbit,
    "bianchi": cmd_bianchi,
    "action-check": cmd_action_check,
    "twist-check": cmd_twist_check,
    "spectrum": cmd_spectrum,
    "butterfly": cmd_butterfly,
}


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {k: _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    return x


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        report = COMMANDS[args.command](cfg)
    except (ConfigError, ValueError) as exc:
        print(f"givlattice {args.command}: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    report = _json_safe(report)
    print(json.dumps(report, indent=2))
    if args.report is not None:
        # timings vary between runs; the file copy stays byte-identical
        stable = {k: v for k, v in report.items() if k != "elapsed"}
        args.report.parent.mkdir(parents=True, exist_ok=True)
        args.report.write_text(json.dumps(stable, indent=2, sort_keys=True) + "\n")
    return EXIT_PASS if report["pass"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
