"""Command-line front end.

Subcommands cover the solver surface: closed-form constants, scalar and
coupled solves on both branches, parameter sweeps, limit-regime reports,
the nonexistence diagnostic, and profile-cache administration.  Every
run writes `result.json` (full serialization), `summary.csv` (one row
per solve), and `profile_*.tsv` (r, u, v columns) into the output
directory.

Exit codes: 0 success, 1 usage error, 2 nonconvergence, 3 admissibility
or geometry refusal.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import asymptotics as asy
from .fiber import GeometryRefusal, ProjectionUndefined
from .functionals import ModelParams, PairState
from .grid import GridError, RadialField, build_grid
from .profiles import (
    AdmissibilityError,
    ShootingError,
    cache_clear,
    cache_dir,
    cache_list,
    cache_warm,
    coupled_constants,
    gamma_p,
    geometry_constants,
    gn_constant,
    sobolev_constant,
    solve_scalar_profile,
)
from .solvers import (
    SolveResult,
    nonexistence_probe,
    solve_local_min,
    solve_mountain_pass,
    solve_scalar_branch,
    sweep,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NONCONV = 2
EXIT_REFUSED = 3

_FLOAT_FMT = "%.17g"

_SUMMARY_COLUMNS = [
    "p", "mu1", "mu2", "beta", "alpha1", "alpha2", "a1", "a2",
    "branch", "converged", "iterations", "energy", "lambda1", "lambda2",
    "pohozaev_rel", "tangent_residual", "mass_rel_err", "identity_rel",
]

_EPILOG = """\
output files:
  result.json   full serialization of the run (config echo + results/report)
  summary.csv   one row per solve; columns, in order:
                p, mu1, mu2, beta, alpha1, alpha2, a1, a2, branch,
                converged, iterations, energy, lambda1, lambda2,
                pohozaev_rel, tangent_residual, mass_rel_err, identity_rel
                (floats carry 17 significant digits)
  profile_*.tsv radial samples, tab-separated columns r, u, v

environment:
  NORMCRIT_CACHE   overrides the scalar-profile cache directory

config file:
  --config FILE loads JSON key/value pairs; command-line flags override
  file values; unknown keys are rejected.
"""

# keys a config file may set, by section
_CONFIG_KEYS = {
    "p", "mu1", "mu2", "beta", "alpha1", "alpha2", "a1", "a2",
    "r_max", "n", "mapping",
    "tol", "max_iter", "seed", "threads", "out",
    "branch", "ratio", "halvings", "factor",
    "mode", "input", "final_tol",
    "p_list",
}


class _Parser(argparse.ArgumentParser):
    # usage failures must exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


class Refusal(RuntimeError):
    """Internal: admissibility/geometry refusal carrying the message."""


def _build_parser() -> _Parser:
    top = _Parser(
        prog="normcrit",
        description="Normalized states of a coupled quartic-critical system on R^4.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = top.add_subparsers(dest="command", required=True)

    def add_common(sp, grid=True, solver=True):
        sp.add_argument("--config", type=str, default=None, help="JSON config file")
        sp.add_argument("--out", type=str, default=None, help="output directory (default .)")
        for name in ("p", "mu1", "mu2", "beta", "alpha1", "alpha2", "a1", "a2"):
            sp.add_argument(f"--{name}", type=float, default=None)
        if grid:
            sp.add_argument("--r-max", dest="r_max", type=float, default=None)
            sp.add_argument("--n", type=int, default=None)
            sp.add_argument("--mapping", type=str, default=None, choices=("uniform", "graded"))
        if solver:
            sp.add_argument("--tol", type=float, default=None)
            sp.add_argument("--max-iter", dest="max_iter", type=int, default=None)
            sp.add_argument("--seed", type=int, default=None, help="controls all randomness")
            sp.add_argument("--threads", type=int, default=None, help="cap on sweep workers")

    sp = sub.add_parser("constants", help="derived constants table")
    add_common(sp, solver=False)

    sp = sub.add_parser("scalar", help="single-component solve (uses mu1, alpha1, a1)")
    add_common(sp)
    sp.add_argument("--branch", type=str, default=None, choices=("min", "mp"))

    sp = sub.add_parser("ground", help="coupled local-minimum ground state")
    add_common(sp)

    sp = sub.add_parser("mp", help="coupled mountain-pass state")
    add_common(sp)

    sp = sub.add_parser("sweep", help="solve along a geometric mass path")
    add_common(sp)
    sp.add_argument("--branch", type=str, default=None,
                    choices=("local_min", "mountain_pass"))
    sp.add_argument("--ratio", type=float, default=None, help="a2/a1 along the path")
    sp.add_argument("--halvings", type=int, default=None,
                    help="number of multiplicative steps after the first entry")
    sp.add_argument("--factor", type=float, default=None,
                    help="mass multiplier per step (default 0.5)")

    sp = sub.add_parser("asym", help="limit-regime report from a sweep directory")
    sp.add_argument("--config", type=str, default=None)
    sp.add_argument("--out", type=str, default=None)
    sp.add_argument("--input", type=str, default=None,
                    help="directory holding a sweep's result.json (default: out dir)")
    sp.add_argument("--mode", type=str, default=None,
                    choices=("auto", "small_mass", "large_mass", "p3_threshold", "mp"))
    sp.add_argument("--final-tol", dest="final_tol", type=float, default=None)

    sp = sub.add_parser("probe", help="multiplier-sign nonexistence diagnostic")
    add_common(sp)

    sp = sub.add_parser("cache", help="profile cache administration")
    sp.add_argument("action", choices=("list", "clear", "warm"))
    sp.add_argument("--p-list", dest="p_list", type=str, default=None,
                    help="comma-separated powers for warm")
    sp.add_argument("--config", type=str, default=None)
    sp.add_argument("--out", type=str, default=None)

    return top


# ---------------------------------------------------------------------------
# config assembly


_DEFAULTS = {
    "p": 2.5, "mu1": 1.0, "mu2": 2.0, "beta": 3.0,
    "alpha1": 1.0, "alpha2": 1.0, "a1": 2.0, "a2": 2.0,
    "r_max": None, "n": None, "mapping": "uniform",
    "tol": 1e-8, "max_iter": None, "seed": 0, "threads": 1, "out": ".",
    "branch": None, "ratio": None, "halvings": 5, "factor": 0.5,
    "mode": "auto", "input": None, "final_tol": None, "p_list": None,
}


def _load_config(args: argparse.Namespace) -> Dict:
    cfg = dict(_DEFAULTS)
    path = getattr(args, "config", None)
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}")
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(data) - _CONFIG_KEYS
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg.update(data)
    for key in _CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


class UsageError(RuntimeError):
    pass


def _params_from(cfg: Dict) -> ModelParams:
    try:
        return ModelParams(
            p=float(cfg["p"]), mu1=float(cfg["mu1"]), mu2=float(cfg["mu2"]),
            beta=float(cfg["beta"]), alpha1=float(cfg["alpha1"]),
            alpha2=float(cfg["alpha2"]), a1=float(cfg["a1"]), a2=float(cfg["a2"]),
        )
    except ValueError as exc:
        raise UsageError(str(exc))


def _grid_from(cfg: Dict, params: ModelParams, branch: str):
    r_max, n = cfg["r_max"], cfg["n"]
    min_like = branch in ("local_min", "min") or (
        branch == "probe" and min(params.alpha1, params.alpha2) > 0.0
    )
    if r_max is None:
        if min_like and 2.0 < params.p < 3.0:
            # spread states: size the domain from the collapse multiplier
            prof = solve_scalar_profile(params.p)
            lam = min(
                asy.limit_multiplier(params.p, params.alpha1, params.a1, prof.mass_sq),
                asy.limit_multiplier(params.p, params.alpha2, params.a2, prof.mass_sq),
            )
            r_max, n_sug = asy.suggest_grid(lam)
            if n is None:
                n = n_sug
        elif abs(params.p - 3.0) < 1e-12:
            r_max = 60.0
            if n is None:
                n = 8192
        else:
            r_max = 20.0
    if n is None:
        n = 4096
    try:
        return build_grid(float(r_max), int(n), cfg["mapping"])
    except (GridError, ValueError) as exc:
        raise UsageError(str(exc))


# ---------------------------------------------------------------------------
# serialization helpers


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, int, float, str)) or obj is None:
        return obj
    return str(obj)


def _params_dict(params: ModelParams) -> Dict:
    return {
        "p": params.p, "mu1": params.mu1, "mu2": params.mu2, "beta": params.beta,
        "alpha1": params.alpha1, "alpha2": params.alpha2,
        "a1": params.a1, "a2": params.a2,
    }


def _result_dict(res: SolveResult, profile_name: Optional[str]) -> Dict:
    g = res.pair.u.grid
    return {
        "params": _params_dict(res.params),
        "branch": res.branch,
        "converged": res.converged,
        "iterations": res.iterations,
        "energy": res.energy,
        "lambda1": res.lambda1,
        "lambda2": res.lambda2,
        "pohozaev": res.pohozaev,
        "pohozaev_rel": res.pohozaev_rel,
        "tangent_residual": res.tangent_residual,
        "tangent_tol": res.tangent_tol,
        "mass_rel_err": res.mass_rel_err,
        "identity_rel": res.identity_rel,
        "boundary_hit": res.boundary_hit,
        "psi2_at_state": res.psi2_at_state,
        "grid": {"r_max": g.r_max, "n": g.n, "mapping": g.mapping},
        "profile": profile_name,
        "diagnostics": _jsonable(res.diagnostics),
    }


def _write_json(out: Path, payload: Dict) -> None:
    with open(out / "result.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return _FLOAT_FMT % x
    return str(x)


def _write_summary(out: Path, results: Sequence[SolveResult]) -> None:
    with open(out / "summary.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_SUMMARY_COLUMNS)
        for res in results:
            pr = res.params
            writer.writerow([
                _fmt(pr.p), _fmt(pr.mu1), _fmt(pr.mu2), _fmt(pr.beta),
                _fmt(pr.alpha1), _fmt(pr.alpha2), _fmt(pr.a1), _fmt(pr.a2),
                res.branch, _fmt(res.converged), _fmt(res.iterations),
                _fmt(res.energy), _fmt(res.lambda1), _fmt(res.lambda2),
                _fmt(res.pohozaev_rel), _fmt(res.tangent_residual),
                _fmt(res.mass_rel_err), _fmt(res.identity_rel),
            ])


def _write_profile(out: Path, name: str, res: SolveResult) -> str:
    g = res.pair.u.grid
    with open(out / name, "w", encoding="utf-8") as fh:
        fh.write("# r\tu\tv\n")
        for r, u, v in zip(g.r, res.pair.u.values, res.pair.v.values):
            fh.write(f"{_FLOAT_FMT % r}\t{_FLOAT_FMT % u}\t{_FLOAT_FMT % v}\n")
    return name


def _echo(cfg: Dict, command: str) -> Dict:
    keep = {k: v for k, v in cfg.items() if v is not None}
    keep["command"] = command
    return keep


# ---------------------------------------------------------------------------
# commands


def _cmd_constants(cfg: Dict) -> int:
    params = _params_from(cfg)
    geom = geometry_constants(
        params.p, params.a1, params.a2, params.alpha1, params.alpha2,
        params.mu1, params.mu2, params.beta,
    )
    cc = geom.coupled
    rows = [
        ("gamma_p", gamma_p(params.p)),
        ("C_p", geom.C_p),
        ("S", cc.s),
        ("k1", cc.k1),
        ("k2", cc.k2),
        ("limit_level", cc.level),
        ("T", geom.T),
        ("gamma1", geom.gamma1),
        ("gamma0", geom.gamma0),
        ("rho0", geom.rho0),
        ("geometry_ok", geom.geometry_ok),
    ]
    width = max(len(k) for k, _ in rows)
    for key, val in rows:
        if val is None:
            text = "n/a"
        elif isinstance(val, bool):
            text = "yes" if val else "no"
        else:
            text = f"{val:.12g}"
        print(f"{key:<{width}}  {text}")
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    payload = {
        "command": "constants",
        "config": _echo(cfg, "constants"),
        "constants": {k: _jsonable(v) for k, v in rows},
    }
    _write_json(out, payload)
    return EXIT_OK


def _finish_solves(cfg: Dict, command: str, results: List[SolveResult]) -> int:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    names = []
    for k, res in enumerate(results):
        names.append(_write_profile(out, f"profile_{k:03d}.tsv", res))
    payload = {
        "command": command,
        "config": _echo(cfg, command),
        "results": [_result_dict(r, n) for r, n in zip(results, names)],
    }
    _write_json(out, payload)
    _write_summary(out, results)
    for res in results:
        state = "converged" if res.converged else "NOT converged"
        lam2 = "n/a" if math.isnan(res.lambda2) else f"{res.lambda2:.6g}"
        print(
            f"{res.branch}: a=({res.params.a1:g},{res.params.a2:g}) {state}, "
            f"energy {res.energy:.10g}, multipliers ({res.lambda1:.6g}, {lam2})"
        )
    return EXIT_OK if all(r.converged for r in results) else EXIT_NONCONV


def _solver_kwargs(cfg: Dict) -> Dict:
    kw = {"tol": float(cfg["tol"])}
    if cfg["max_iter"] is not None:
        kw["max_iter"] = int(cfg["max_iter"])
    return kw


def _cmd_scalar(cfg: Dict) -> int:
    params = _params_from(cfg)
    branch = cfg["branch"] or "min"
    if branch not in ("min", "mp"):
        raise UsageError(f"scalar branch must be min or mp, got {branch!r}")
    g = _grid_from(cfg, params, branch)
    res = solve_scalar_branch(
        params.p, params.mu1, params.alpha1, params.a1, g, branch,
        **_solver_kwargs(cfg),
    )
    return _finish_solves(cfg, "scalar", [res])


def _cmd_ground(cfg: Dict) -> int:
    params = _params_from(cfg)
    geom = geometry_constants(
        params.p, params.a1, params.a2, params.alpha1, params.alpha2,
        params.mu1, params.mu2, params.beta,
    )
    if params.p < 3.0 and not geom.geometry_ok:
        raise Refusal(
            f"geometry gate violated: T <= gamma1 fails "
            f"(T = {geom.T:.6g}, gamma1 = {geom.gamma1:.6g})"
        )
    g = _grid_from(cfg, params, "local_min")
    res = solve_local_min(params, g, geom=geom, **_solver_kwargs(cfg))
    return _finish_solves(cfg, "ground", [res])


def _cmd_mp(cfg: Dict) -> int:
    params = _params_from(cfg)
    g = _grid_from(cfg, params, "mountain_pass")
    seed = int(cfg["seed"])
    res = solve_mountain_pass(
        params, g, seeds=(seed, seed + 1, seed + 2), **_solver_kwargs(cfg),
    )
    return _finish_solves(cfg, "mp", [res])


def _cmd_sweep(cfg: Dict) -> int:
    params = _params_from(cfg)
    branch = cfg["branch"] or "local_min"
    ratio = float(cfg["ratio"]) if cfg["ratio"] is not None else params.a2 / params.a1
    if ratio <= 0.0:
        raise UsageError("ratio must be positive")
    halvings = int(cfg["halvings"])
    if halvings < 0:
        raise UsageError("halvings must be nonnegative")
    factor = float(cfg["factor"])
    if not (0.0 < factor) or factor == 1.0:
        raise UsageError("factor must be positive and different from 1")
    path = []
    for k in range(halvings + 1):
        a1 = params.a1 * factor**k
        path.append(
            ModelParams(
                p=params.p, mu1=params.mu1, mu2=params.mu2, beta=params.beta,
                alpha1=params.alpha1, alpha2=params.alpha2,
                a1=a1, a2=ratio * a1,
            )
        )
    # size the shared grid for the most spread entry of the path
    tail = path[-1] if factor < 1.0 else path[0]
    probe_cfg = dict(cfg)
    probe_cfg["a1"], probe_cfg["a2"] = tail.a1, tail.a2
    g = _grid_from(probe_cfg, tail, branch)
    kw = _solver_kwargs(cfg)
    if branch == "mountain_pass":
        seed = int(cfg["seed"])
        kw["seeds"] = (seed, seed + 1, seed + 2)
    results = sweep(path, grid=g, branch=branch, warm=True, **kw)
    return _finish_solves(cfg, "sweep", results)


def _load_sweep_dir(path: Path) -> List[SolveResult]:
    try:
        with open(path / "result.json", "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read sweep results under {path}: {exc}")
    rows = payload.get("results")
    if not rows:
        raise UsageError(f"{path}/result.json holds no solve results")
    out: List[SolveResult] = []
    grids: Dict[tuple, object] = {}
    for row in rows:
        gspec = row["grid"]
        key = (gspec["r_max"], gspec["n"], gspec["mapping"])
        if key not in grids:
            grids[key] = build_grid(gspec["r_max"], gspec["n"], gspec["mapping"])
        g = grids[key]
        data = np.loadtxt(path / row["profile"], comments="#")
        if data.shape[0] != g.n:
            raise UsageError(f"profile {row['profile']} does not match its grid")
        pair = PairState(RadialField(g, data[:, 1]), RadialField(g, data[:, 2]))
        pr = ModelParams(**row["params"])
        out.append(
            SolveResult(
                params=pr, branch=row["branch"], pair=pair,
                converged=bool(row["converged"]), iterations=int(row["iterations"]),
                energy=float(row["energy"]), lambda1=float(row["lambda1"]),
                lambda2=float(row["lambda2"]), pohozaev=float(row["pohozaev"]),
                pohozaev_rel=float(row["pohozaev_rel"]),
                tangent_residual=float(row["tangent_residual"]),
                tangent_tol=float(row["tangent_tol"]),
                mass_rel_err=float(row["mass_rel_err"]),
                identity_rel=float(row["identity_rel"]),
                boundary_hit=bool(row["boundary_hit"]),
                psi2_at_state=float(row["psi2_at_state"]),
                diagnostics={},
            )
        )
    return out


def _cmd_asym(cfg: Dict) -> int:
    src = Path(cfg["input"]) if cfg["input"] is not None else Path(cfg["out"])
    results = _load_sweep_dir(src)
    mode = cfg["mode"]
    if mode == "auto":
        branch = results[0].branch
        p = results[0].params.p
        if branch == "mountain_pass" and abs(p - 3.0) > 1e-12 and p < 3.0:
            mode = "mp"
        elif abs(p - 3.0) < 1e-12:
            mode = "p3_threshold"
        elif p > 3.0:
            mode = "large_mass"
        else:
            mode = "small_mass"
    if mode == "mp":
        kw = {}
        if cfg["final_tol"] is not None:
            kw["final_tol"] = float(cfg["final_tol"])
        report = asy.mp_limit_check(results, **kw)
    else:
        kw = {}
        if cfg["final_tol"] is not None:
            kw["final_tol"] = float(cfg["final_tol"])
        report = asy.ground_limit_check(results, mode, **kw)
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    payload = {
        "command": "asym",
        "config": _echo(cfg, "asym"),
        "report": _jsonable(report.to_dict()),
    }
    _write_json(out, payload)
    print(f"regime {report.regime}: verdict {report.verdict}")
    for k, (dist, gap) in enumerate(zip(report.distances, report.limit_energy_gap)):
        print(f"  step {k}: distance {dist:.6g}, energy gap {gap:.6g}")
    for name, fit in report.fitted_rates.items():
        print(f"  rate {name}: slope {fit.slope:.6g} (stderr {fit.stderr:.2g})")
    return EXIT_OK


def _cmd_probe(cfg: Dict) -> int:
    params = _params_from(cfg)
    g = _grid_from(cfg, params, "probe")
    kw = _solver_kwargs(cfg)
    report = nonexistence_probe(params, g, **kw)
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    payload = {
        "command": "probe",
        "config": _echo(cfg, "probe"),
        "probe": {
            "verdict": report.verdict,
            "near_critical_checks": report.near_critical_checks,
            "near_critical_flagged": report.near_critical_flagged,
            "admissible_found": report.admissible_found,
            "result": _result_dict(report.result, None),
        },
    }
    _write_json(out, payload)
    _write_summary(out, [report.result])
    print(
        f"probe verdict: {report.verdict} "
        f"({report.near_critical_flagged}/{report.near_critical_checks} near-critical "
        f"iterates flagged, converged={report.result.converged})"
    )
    return EXIT_OK


def _cmd_cache(cfg: Dict, action: str) -> int:
    out = Path(cfg["out"])
    if action == "list":
        entries = cache_list()
        for entry in entries:
            print(entry)
        if not entries:
            print(f"cache empty ({cache_dir()})")
        payload = {"command": "cache", "action": "list", "entries": _jsonable(entries)}
    elif action == "clear":
        removed = cache_clear()
        print(f"removed {removed} cached profile(s)")
        payload = {"command": "cache", "action": "clear", "removed": removed}
    else:
        raw = cfg["p_list"]
        if not raw:
            raise UsageError("cache warm needs --p-list")
        try:
            p_values = [float(tok) for tok in str(raw).replace(",", " ").split()]
        except ValueError:
            raise UsageError(f"cannot parse --p-list {raw!r}")
        written = cache_warm(p_values)
        for item in written:
            print(item)
        payload = {"command": "cache", "action": "warm", "entries": _jsonable(written)}
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out, payload)
    return EXIT_OK


# ---------------------------------------------------------------------------


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        threads = int(cfg["threads"])
        if threads < 1:
            raise UsageError("threads must be at least 1")
        command = args.command
        if command == "constants":
            rc = _cmd_constants(cfg)
        elif command == "scalar":
            rc = _cmd_scalar(cfg)
        elif command == "ground":
            rc = _cmd_ground(cfg)
        elif command == "mp":
            rc = _cmd_mp(cfg)
        elif command == "sweep":
            rc = _cmd_sweep(cfg)
        elif command == "asym":
            rc = _cmd_asym(cfg)
        elif command == "probe":
            rc = _cmd_probe(cfg)
        elif command == "cache":
            rc = _cmd_cache(cfg, args.action)
        else:  # pragma: no cover - argparse enforces the choices
            raise UsageError(f"unknown command {command!r}")
        return rc
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (Refusal, GeometryRefusal, AdmissibilityError, ProjectionUndefined,
            asy.FitNotApplicable) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except ShootingError as exc:
        print(f"did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONV
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
