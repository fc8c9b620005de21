"""Command-line front end.

Exit status: 0 success, 2 invalid input or configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .certificates import certificate_record
from .config import MODE_PARAMS, MODES, ConfigError, RunConfig, parse_config
from .exponents import (
    PotentialSpec,
    ReactionSpec,
    classify,
    fujita_exponent,
)
from .pde_sim import (
    Exterior,
    InitialData,
    ProblemSpec,
    SolverConfig,
    SolverError,
    WholeSpace,
    solve_radial,
)
from .special_kernels import (
    DuhamelParams,
    KernelParams,
    QuadratureError,
    critical_u_integral,
    dirichlet_lower_bound,
    duhamel_lower_integral,
    kernel_qn,
)
from .spectral import ConvergenceError, EigenProblem, annulus_scaling, inverse_square, principal_eigenpair

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3

SWEEP_COLUMNS = ("n", "omega", "m", "p", "p_star", "alpha", "N", "M",
                 "theory_verdict", "sim_verdict", "blowup_time", "notes")


class NumericalFailure(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# formatting


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


def render_rows(rows: list[dict], columns, fmt: str) -> str:
    if fmt == "json":
        clean = [{c: _json_safe(r.get(c)) for c in columns} for r in rows]
        return json.dumps(clean, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return _fmt(x)
    return x


def emit(text: str, cfg: RunConfig, out=None) -> None:
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        (out or sys.stdout).write(text)


# ---------------------------------------------------------------------------
# problem construction


def _solver_config(p: dict) -> SolverConfig:
    return SolverConfig(
        r_max=float(p["r_max"]),
        grid_points=int(p["grid_points"]),
        xi_points=int(p["xi_points"]),
        t_max=float(p["t_max"]),
        frame=str(p["frame"]),
        blowup_threshold=float(p["blowup_threshold"]),
    )


def _problem(p: dict, n: float, omega: float, m: float, power: float) -> ProblemSpec:
    geo = p["geometry"]
    if geo == "whole":
        geometry = WholeSpace()
    elif geo == "exterior":
        geometry = Exterior(float(p["r0"]))
    else:
        raise ConfigError(f"geometry must be 'whole' or 'exterior', got {geo!r}")
    return ProblemSpec(
        pot=PotentialSpec(omega=omega, n=n, regularization_eps=float(p["eps"])),
        reac=ReactionSpec(m=m, c1=float(p["c1"])),
        p=power,
        geometry=geometry,
        initial=InitialData(float(p["amplitude"]), float(p["center"]), float(p["width"])),
    )


def _agreement(theory: str, sim: str) -> str:
    expected = {"NoGlobal": "BlowUp", "HardySupercritical": "BlowUp", "GlobalPossible": "Global"}
    if sim not in ("BlowUp", "Global"):
        return "n/a"
    return "agree" if expected.get(theory) == sim else "disagree"


def sweep_row(task: tuple) -> dict:
    """One grid point of a sweep; failures are reported in the row."""
    n, omega, m, power, params = task
    row = {"n": n, "omega": omega, "m": m, "p": power}
    notes = []
    try:
        rep = classify(PotentialSpec(omega=omega, n=n), ReactionSpec(m=m, c1=float(params["c1"])), power,
                       margin=float(params["margin"]))
    except ValueError as exc:
        row.update({"theory_verdict": "Invalid", "sim_verdict": "", "notes": str(exc)})
        return row
    row.update({"p_star": rep.p_star, "alpha": rep.alpha, "N": rep.N, "M": rep.M,
                "theory_verdict": rep.verdict.value})
    if rep.borderline:
        notes.append("borderline")
    if params.get("simulate", True):
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                out = solve_radial(_problem(params, n, omega, m, power), _solver_config(params),
                                   margin=float(params["margin"]))
            sim = out.verdict.value
            row["sim_verdict"] = sim
            row["blowup_time"] = out.blowup_time
            if out.policy_undetermined:
                notes.append(f"near-critical policy (raw {out.raw_verdict.value})")
            notes.append(_agreement(rep.verdict.value, sim))
        except (SolverError, ValueError, ArithmeticError) as exc:
            row["sim_verdict"] = "Failed"
            notes.append(f"failed: {exc}")
    else:
        row["sim_verdict"] = ""
    row["notes"] = "; ".join(notes)
    return row


def _sort_key(row):
    return (row["n"], row["omega"], row["m"], row["p"])


def run_sweep(cfg: RunConfig) -> list[dict]:
    p = cfg.params
    tasks = [(n, om, m, pw, p) for n, om, m, pw in itertools.product(p["n"], p["omega"], p["m"], p["p"])]
    if cfg.parallelism == 1 or len(tasks) == 1:
        rows = [sweep_row(t) for t in tasks]
    else:
        # one task at a time per worker: idle workers pick up the next point
        with ProcessPoolExecutor(max_workers=cfg.parallelism) as ex:
            rows = list(ex.map(sweep_row, tasks, chunksize=1))
    return sorted(rows, key=_sort_key)


# ---------------------------------------------------------------------------
# modes


def mode_exponent(cfg: RunConfig, out) -> int:
    p = cfg.params
    rep = fujita_exponent(PotentialSpec(omega=float(p["omega"]), n=float(p["n"])), ReactionSpec(m=float(p["m"])))
    out.write(f"p* = {rep.p_star:.6f}\n")
    if math.isfinite(rep.p_star):
        out.write(f"alpha = {rep.alpha:.6f}  N = {rep.N:.6f}  M = {rep.M:.6f}\n")
    else:
        out.write(f"verdict = {rep.verdict.value}\n")
    if cfg.output_path:
        emit(render_rows([rep.as_dict()], list(rep.as_dict()), cfg.format), cfg)
    return EXIT_OK


def mode_classify(cfg: RunConfig, out) -> int:
    p = cfg.params
    rep = classify(PotentialSpec(omega=float(p["omega"]), n=float(p["n"])), ReactionSpec(m=float(p["m"])),
                   float(p["p"]), margin=float(p["margin"]))
    tag = " (borderline)" if rep.borderline else ""
    out.write(f"{rep.verdict.value}{tag}  p = {rep.p}  p* = {rep.p_star:.6f}  margin = {rep.margin:.6f}\n")
    if cfg.output_path:
        emit(render_rows([rep.as_dict()], list(rep.as_dict()), cfg.format), cfg)
    return EXIT_OK


def mode_simulate(cfg: RunConfig, out) -> int:
    p = cfg.params
    spec = _problem(p, float(p["n"]), float(p["omega"]), float(p["m"]), float(p["p"]))
    try:
        res = solve_radial(spec, _solver_config(p), margin=float(p["margin"]))
    except SolverError as exc:
        raise NumericalFailure(str(exc)) from exc
    bt = f"  t* = {res.blowup_time:.6g}" if res.blowup_time is not None else ""
    out.write(f"{res.verdict.value}{bt}  frame = {res.frame}  steps = {res.evidence.get('steps')}\n")
    if res.policy_undetermined:
        out.write(f"near-critical policy applied; trajectory verdict was {res.raw_verdict.value}\n")
    if cfg.output_path:
        rows = [{"t": float(t), "sup_norm": float(s), "dt": float(d)} for t, s, d in zip(res.t, res.sup_norm, res.dt)]
        emit(render_rows(rows, ("t", "sup_norm", "dt"), cfg.format), cfg)
    return EXIT_OK


def mode_sweep(cfg: RunConfig, out) -> int:
    if cfg.params["geometry"] not in ("whole", "exterior"):
        raise ConfigError(f"geometry must be 'whole' or 'exterior', got {cfg.params['geometry']!r}")
    rows = run_sweep(cfg)
    emit(render_rows(rows, SWEEP_COLUMNS, cfg.format), cfg, out)
    return EXIT_OK


def mode_kernel(cfg: RunConfig, out) -> int:
    p = cfg.params
    kp = KernelParams(N=float(p["N"]), r0=float(p["r0"]), comparison_c=float(p["c"]), comparison_K0=float(p["K0"]))
    rows = []
    for t, r, rho in itertools.product(p["t"], p["r"], p["rho"]):
        row = {"N": kp.N, "t": t, "r": r, "rho": rho, "q": float(kernel_qn(kp, t, r, rho))}
        if r >= kp.r0 + 1 and rho >= kp.r0 + 1:
            row["lower_bound"] = float(dirichlet_lower_bound(kp, t, r, rho))
        rows.append(row)
    emit(render_rows(rows, ("N", "t", "r", "rho", "q", "lower_bound"), cfg.format), cfg, out)
    return EXIT_OK


def mode_eigen(cfg: RunConfig, out) -> int:
    p = cfg.params
    N = float(p["N"])
    sizes = [float(s) for s in str(p["sizes"]).split(",") if s.strip()]
    if sizes:
        rows = [{"N": N, "n": n, "lambda_n2": v} for n, v in annulus_scaling(N, sizes, int(p["grid_points"]))]
        emit(render_rows(rows, ("N", "n", "lambda_n2"), cfg.format), cfg, out)
        return EXIT_OK
    prob = EigenProblem(N=N, interval=(float(p["a"]), float(p["b"])),
                        potential=inverse_square(float(p["omega"])), grid_points=int(p["grid_points"]))
    pair = principal_eigenpair(prob)
    out.write(f"lambda0 = {pair.lambda0:.10g}\n")
    if cfg.output_path:
        rows = [{"r": float(r), "phi": float(f)} for r, f in zip(pair.r, pair.phi)]
        emit(render_rows(rows, ("r", "phi"), cfg.format), cfg)
    return EXIT_OK


def mode_certify(cfg: RunConfig, out) -> int:
    p = cfg.params
    recs = [certificate_record(om, n, m, pw) for n, om, m, pw in itertools.product(p["n"], p["omega"], p["m"], p["p"])]
    recs.sort(key=lambda r: (r["n"], r["omega"], r["m"], r["p"]))
    if cfg.format == "json":
        text = json.dumps(recs, indent=2, sort_keys=True) + "\n"
    else:
        rows = [{**r, "gamma": r.get("params", {}).get("gamma"), "delta": r.get("params", {}).get("delta")} for r in recs]
        text = render_rows(rows, ("n", "omega", "m", "p", "feasible", "gamma", "delta", "max_residual", "passed"), "csv")
    emit(text, cfg, out)
    return EXIT_OK


def mode_duhamel(cfg: RunConfig, out) -> int:
    p = cfg.params
    N = float(p["N"])
    dp = DuhamelParams(K1=float(p["K1"]), K2=float(p["K2"]), beta=float(p["beta"]), M=float(p["M"]), p=float(p["p"]))
    kp = KernelParams(N=N, r0=float(p["r0"]))
    rows = []
    for t in p["t"]:
        rows.append({"t": t, "I": duhamel_lower_integral(kp, dp, t, float(p["r"])),
                     "J": critical_u_integral(dp, N, t)})
    emit(render_rows(rows, ("t", "I", "J"), cfg.format), cfg, out)
    return EXIT_OK


HANDLERS = {
    "exponent": mode_exponent,
    "classify": mode_classify,
    "simulate": mode_simulate,
    "sweep": mode_sweep,
    "kernel": mode_kernel,
    "eigen": mode_eigen,
    "certify": mode_certify,
    "duhamel": mode_duhamel,
}


def run(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    if cfg.mode not in HANDLERS:
        raise ConfigError(f"unknown mode {cfg.mode!r}")
    return HANDLERS[cfg.mode](cfg, out)


# ---------------------------------------------------------------------------
# argument parsing


def _flag_type(default):
    if isinstance(default, bool):
        return None
    if isinstance(default, int):
        return int
    if isinstance(default, float):
        return float
    return str


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fujita-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="mode", metavar="MODE")
    for mode in MODES:
        sp = sub.add_parser(mode, help=f"{mode} mode")
        sp.add_argument("--config", help="JSON config file; flags override its values")
        sp.add_argument("--output", dest="output_path")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--parallelism", type=int)
        sp.add_argument("--seed", type=int)
        for key, default in MODE_PARAMS[mode].items():
            flag = "--" + key.replace("_", "-")
            if isinstance(default, bool):
                sp.add_argument(flag, dest=key, action=argparse.BooleanOptionalAction, default=None)
            else:
                typ = _flag_type(default)
                # p accepts ranges in some modes and a number in others
                sp.add_argument(flag, dest=key, type=typ if default is not None else str, default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)
    if ns.mode is None:
        parser.print_help(sys.stderr)
        return EXIT_INVALID
    overrides = {k: v for k, v in vars(ns).items() if k != "config" and v is not None}
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            cfg = parse_config(ns.config, overrides)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        for key in ("p",):
            if key in cfg.params and not isinstance(cfg.params[key], list):
                cfg.params[key] = float(cfg.params[key])
        return run(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalFailure, QuadratureError, ConvergenceError, SolverError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
