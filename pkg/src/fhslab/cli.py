"""Command-line front end: solve, verify, sweep, kernel-table, evaluate.

Exit codes: 0 success, 1 validation error, 2 numerical failure, 3 check failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from . import functionals as fn
from . import verification as vf
from .config import ConfigError, RunConfig, config_error, load_config
from .kernels import KernelError, KernelTable, build_kernel_table
from .optimizer import MinimizeOptions, OptimizerError, minimize
from .params import ParameterError
from .profiles import ProfileError, RadialProfile, candidate_extremal

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_CHECK = 0, 1, 2, 3
REPORT_SCHEMA = "fhs-report/1"


class NumericalFailure(RuntimeError):
    pass


def _stamp(cfg: RunConfig) -> dict:
    return {"version": __version__, "config_digest": cfg.digest()}


def _json(obj) -> str:
    return json.dumps(_finite(obj), indent=1, sort_keys=True) + "\n"


def _finite(obj):
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _csv_header(cfg: RunConfig) -> str:
    return f"# version={__version__} config_digest={cfg.digest()}\n"


def _outdir(cfg: RunConfig) -> Path:
    d = Path(cfg.output_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _load_profile(cfg: RunConfig, source: str) -> RadialProfile:
    params = cfg.problem()
    if source == "extremal":
        return candidate_extremal(params, cfg.make_grid())
    try:
        u = RadialProfile.from_json(Path(source))
    except OSError as exc:
        raise ConfigError(f"cannot read profile: {exc.strerror}", source=source) from exc
    except (ProfileError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid profile file: {exc}", source=source) from exc
    if u.dim != params.N:
        raise ConfigError(f"profile dimension {u.dim} does not match params.N = {params.N}", source=source)
    return u.with_values(u.values, params=params)


# -- subcommands ------------------------------------------------------------------------------

def cmd_solve(cfg: RunConfig, args) -> int:
    params = cfg.problem()
    if params.evaluation_only:
        raise config_error(cfg, "alpha = p*s is the evaluation-only (Hardy) case: the quotient has no "
                                "minimizer to compute; use 'evaluate' instead", "params.alpha")
    if not params.minimization_mode:
        raise config_error(cfg, "parameters are not in minimization mode (need alpha < p*s)", "params.alpha")
    o = cfg.optimizer
    opts = MinimizeOptions(max_iter=o.max_iter, tol=o.tol, window=o.window, pin_every=o.pin_every,
                           level=o.level, seed=cfg.seed)
    res = minimize(params, o.init, opts, cfg.make_grid())
    out = _outdir(cfg)
    stamp = _stamp(cfg)
    prof = res.profile.to_dict()
    prof.update(stamp)
    (out / "profile.json").write_text(_json(prof))
    (out / "trace.csv").write_text(_csv_header(cfg) + res.trace_csv())
    summary = {k: v for k, v in res.to_dict().items() if k != "profile"}
    summary.update(stamp)
    summary["config"] = cfg.to_dict()
    summary["config"].pop("output_dir")
    (out / "summary.json").write_text(_json(summary))
    _say(args, f"I1_estimate = {res.I1_estimate:.10g}  R = {res.rayleigh:.10g}  iterations = {res.iterations}")
    if not res.converged:
        raise NumericalFailure("; ".join(res.messages) or "optimizer did not converge")
    return EXIT_OK


def _write_reports(cfg, reports, stem) -> Path:
    out = _outdir(cfg)
    doc = {"schema": REPORT_SCHEMA, **_stamp(cfg), "reports": [r.to_dict() for r in reports]}
    path = out / f"{stem}.json"
    path.write_text(_json(doc))
    for r in reports:
        if r.rows:
            (out / f"{stem}_{r.check}.csv").write_text(_csv_header(cfg) + r.rows_csv())
    return path


def _exit_for(reports) -> int:
    return EXIT_OK if all(r.verdict != "fail" for r in reports) else EXIT_CHECK


def cmd_verify(cfg: RunConfig, args) -> int:
    names = cfg.checks if cfg.checks is not None else list(vf.DEFAULT_CHECKS)
    if args.checks is not None:
        names = [c for c in args.checks.split(",") if c.strip()]
        for c in names:
            if c not in vf.CHECKS:
                raise ConfigError(f"unknown check '{c}'", source="<command line>")
    u = _load_profile(cfg, args.profile)
    reports = vf.run_checks(u, cfg.problem(), names, cfg.check_overrides)
    path = _write_reports(cfg, reports, "verify")
    for r in reports:
        _say(args, f"{r.check:20s} {r.verdict}")
    _say(args, f"wrote {path}")
    return _exit_for(reports)


def cmd_sweep(cfg: RunConfig, args) -> int:
    u = _load_profile(cfg, args.profile)
    params = cfg.problem()
    kw = dict(cfg.check_overrides.get("gamma_sweep", {}))
    if args.gammas:
        kw["gammas"] = [float(g) for g in args.gammas.split(",")]
    try:
        rep = vf.CHECKS["gamma_sweep"](u, params, **kw)
    except vf.VerificationError as exc:
        raise ConfigError(str(exc), source="<command line>") from exc
    path = _write_reports(cfg, [rep], "sweep")
    _say(args, f"gamma_sweep {rep.verdict}; wrote {path}")
    return _exit_for([rep])


def cmd_kernel_table(cfg: RunConfig, args) -> int:
    params = cfg.problem()
    beta = params.ps if args.beta is None else args.beta
    out = _outdir(cfg)
    path = Path(args.output) if args.output else out / f"kernel_N{params.N}_beta{beta:g}_M{cfg.grid['M']}.bin"
    if args.load:
        table = KernelTable.load(path, N=params.N, beta=beta)
        _say(args, f"loaded {path}: N={table.N} beta={table.beta} M={table.M} digest={table.digest()[:16]}")
        return EXIT_OK
    grid = cfg.make_grid()
    try:
        table = build_kernel_table(params.N, grid.nodes[1:], beta)
    except KernelError as exc:
        raise ConfigError(str(exc), source="<command line>") from exc
    try:
        table.save(path)
    except OSError as exc:
        raise NumericalFailure(f"cannot write kernel table: {exc.strerror}") from exc
    meta = {"N": table.N, "beta": table.beta, "M": table.M, "digest": table.digest(), "file": path.name, **_stamp(cfg)}
    Path(str(path) + ".json").write_text(_json(meta))
    _say(args, f"wrote {path} ({table.M}x{table.M}) digest={table.digest()[:16]}")
    if args.timing:
        u = candidate_extremal(params, grid)
        t0 = time.perf_counter()
        fn.seminorm_power(u, params.s, params.p)
        t1 = time.perf_counter()
        fn.seminorm_power(u, params.s, params.p)
        t2 = time.perf_counter()
        _say(args, f"seminorm: first {t1 - t0:.3f} s, reused tables {t2 - t1:.3f} s "
                   f"(speed-up {(t1 - t0) / max(t2 - t1, 1e-9):.1f}x, informational)")
    return EXIT_OK


def cmd_evaluate(cfg: RunConfig, args) -> int:
    u = _load_profile(cfg, args.profile)
    rep = fn.functional_report(u, cfg.problem(), refine=not args.no_refine)
    doc = {"schema": REPORT_SCHEMA, **_stamp(cfg), "functionals": rep.to_dict()}
    out = _outdir(cfg)
    (out / "evaluate.json").write_text(_json(doc))
    _say(args, f"[u]_(s,p) = {rep.seminorm_s_p:.10g}  ||u||_(alpha,q) = {rep.weighted_norm_alpha_q:.10g}  "
               f"R = {rep.rayleigh:.10g}")
    if not all(math.isfinite(x) for x in (rep.seminorm_s_p, rep.weighted_norm_alpha_q)):
        raise NumericalFailure("functional is infinite for this profile")
    return EXIT_OK


# -- entry point ---------------------------------------------------------------------------------

def _say(args, msg):
    if not getattr(args, "quiet", False):
        print(msg)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help="TOML run configuration")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override a configuration value (repeatable)")
    common.add_argument("-o", "--output-dir", help="output directory (default: run.output_dir, $FHSLAB_OUTPUT_DIR)")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int)
    common.add_argument("-q", "--quiet", action="store_true")

    ap = argparse.ArgumentParser(prog="fhslab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"fhslab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="minimize the Rayleigh quotient")
    v = sub.add_parser("verify", parents=[common], help="run verification checks on a profile")
    v.add_argument("profile", nargs="?", default="extremal", help="profile JSON path or 'extremal'")
    v.add_argument("--checks", help="comma-separated check names (empty string: none)")
    w = sub.add_parser("sweep", parents=[common], help="truncated-seminorm sweep over gamma")
    w.add_argument("profile", nargs="?", default="extremal")
    w.add_argument("--gammas", help="comma-separated exponents")
    k = sub.add_parser("kernel-table", parents=[common], help="build or reload an angular kernel table")
    k.add_argument("--beta", type=float, help="kernel exponent (default p*s)")
    k.add_argument("--output", help="table path")
    k.add_argument("--load", action="store_true", help="reload and validate an existing table")
    k.add_argument("--timing", action="store_true", help="report first vs. reused seminorm timing")
    e = sub.add_parser("evaluate", parents=[common], help="one-shot functional report")
    e.add_argument("profile", nargs="?", default="extremal")
    e.add_argument("--no-refine", action="store_true", help="skip the grid-doubling deltas")
    return ap


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "sweep": cmd_sweep, "kernel-table": cmd_kernel_table,
            "evaluate": cmd_evaluate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = list(args.set)
    if args.output_dir:
        overrides.append(f"run.output_dir={json.dumps(args.output_dir)}")
    if args.seed is not None:
        overrides.append(f"run.seed={args.seed}")
    if args.threads is not None:
        overrides.append(f"run.threads={args.threads}")
    try:
        cfg = load_config(args.config, overrides=overrides)
        with threadpool_limits(limits=cfg.threads):
            return COMMANDS[args.command](cfg, args)
    except (ConfigError, ParameterError, KernelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalFailure, OptimizerError, fn.FunctionalError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
