"""Command-line front end: run scenarios, list builtins, emit envelope grids.

Exit codes: 0 converged with every audit holding, 1 a violated or
inconclusive audit / divergence / iteration cap, 2 an oracle error,
3 an invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import diagnostics as dg
from .config import (
    ConfigError,
    ScenarioConfig,
    build_function,
    build_gauge,
    builtin_names,
    load_builtin,
    load_config,
)
from .gauges import GaugeOracle, fundamental_set
from .polar import polar_prox
from .solver import SHADOW_FLOOR, SolverTrace, Status, run_gp4a

__all__ = ["RunSummary", "run_scenario", "emit_envelope_grid", "list_builtin_scenarios", "main",
           "EXIT_OK", "EXIT_FAIL", "EXIT_ERROR", "EXIT_CONFIG", "UnsupportedDimension"]

EXIT_OK, EXIT_FAIL, EXIT_ERROR, EXIT_CONFIG = 0, 1, 2, 3


class UnsupportedDimension(ValueError):
    pass


def _fmt(x) -> str:
    return format(float(x), ".17g")


@dataclass
class RunSummary:
    status: Status
    iterations: int
    final_point: list
    final_shadow: Optional[list]
    residual: float
    gamma: float
    lambda_prime: object = None
    minimizer_estimate: Optional[list] = None
    reports: list = field(default_factory=list)
    message: str = ""
    wall_clock_seconds: float = 0.0

    @property
    def exit_code(self) -> int:
        if self.status is Status.Error:
            return EXIT_ERROR
        if self.status is not Status.Converged:
            return EXIT_FAIL
        if any(r.get("verdict") != "Holds" for r in self.reports):
            return EXIT_FAIL
        return EXIT_OK

    def to_dict(self) -> dict:
        d = {
            "status": str(self.status),
            "gamma": self.gamma,
            "iterations": self.iterations,
            "final_point": self.final_point,
            "final_shadow": self.final_shadow,
            "residual": self.residual,
            "lambda_prime": self.lambda_prime,
            "minimizer_estimate": self.minimizer_estimate,
            "message": self.message,
            "reports": self.reports,
            "exit_code": self.exit_code,
        }
        return dg._jsonable(d)


# ---------------------------------------------------------------------------
# audits


def _inconclusive(name, why):
    return {"property_name": name, "verdict": "Inconclusive", "samples_tested": 0, "worst_violation": None,
            "slack": None, "witnesses": [], "details": {"reason": why}}


def _slice_probes(rng, center, n, half_width=4.0):
    c = np.asarray(center, dtype=float)
    pts = np.tile(c, (n, 1))
    pts[:, :-1] += rng.uniform(-half_width, half_width, size=(n, c.size - 1))
    pts[:, -1] = 1.0
    return list(pts)


def _run_audits(cfg: ScenarioConfig, g: GaugeOracle, trace: SolverTrace, rng, summary: RunSummary):
    ref = None
    if cfg.fixed_point is not None:
        ref = np.asarray(cfg.fixed_point, dtype=float)
    elif trace.converged:
        ref = trace.final_point
    alpha = cfg.alpha
    out = []
    for name in cfg.audits:
        try:
            if name == "fejer":
                if ref is None:
                    out.append(_inconclusive("Fejer monotone", "no reference fixed point"))
                    continue
                out.append(dg.audit_fejer(trace, ref).to_dict())
            elif name == "shadow_limit":
                if not trace.converged:
                    out.append(_inconclusive("shadow height limit", f"run status {trace.status}"))
                    continue
                out.append(dg.check_shadow_limit(trace).to_dict())
            elif name == "composite_contraction":
                if ref is None:
                    out.append(_inconclusive("composite contraction", "no reference fixed point"))
                    continue
                probes = _slice_probes(rng, ref, cfg.probes)
                out.append(dg.audit_composite_contraction(g, ref, probes, alpha=alpha).to_dict())
            elif name == "t_fqne":
                zeros = [np.zeros(len(cfg.start))]
                d = len(cfg.start)
                probes = list(rng.uniform(-4.0, 4.0, size=(cfg.probes, d)))
                out.append(dg.audit_T_fqne(g, zeros, probes, alpha=alpha).to_dict())
            elif name == "fqne_violation":
                if ref is None:
                    out.append(_inconclusive("P_S T firmly quasinonexpansive", "no reference fixed point"))
                    continue
                seed = int(rng.integers(2**31))
                out.append(dg.search_fqne_violation(g, ref, 1000, alpha=alpha, seed=seed).to_dict())
            elif name == "facial":
                if cfg.gauge_kind != "perspective":
                    out.append(_inconclusive("facial characterization", "needs a perspective gauge"))
                    continue
                if not trace.converged:
                    out.append(_inconclusive("facial characterization", f"run status {trace.status}"))
                    continue
                rep = dg.verify_facial_characterization(build_function(cfg.gauge_spec), trace, alpha=alpha,
                                                        gauge=g)
                d = rep.to_dict()
                d["property_name"] = "facial characterization"
                d["worst_violation"] = max(rep.consistency_errors.values())
                out.append(d)
            elif name == "lambda_prime":
                est = dg.estimate_lambda_prime(fundamental_set(g, len(cfg.start)))
                summary.lambda_prime = est
                details = {"estimate": est}
                verdict = "Holds"
                worst = None
                if cfg.gauge_kind == "perspective":
                    f = build_function(cfg.gauge_spec)
                    if f.min_value and f.min_value > 0:
                        worst = abs(est - 1.0 / f.min_value) if est is not dg.UNBOUNDED else math.inf
                        details["expected"] = 1.0 / f.min_value
                        verdict = "Holds" if worst <= 1e-3 else "Violated"
                out.append({"property_name": "lambda prime", "verdict": verdict, "samples_tested": 1,
                            "worst_violation": worst, "slack": 1e-3, "witnesses": [],
                            "details": dg._jsonable(details)})
        except (dg.InvalidFixedPoint, dg.InconclusiveEstimate, dg.MissingGroundTruth) as exc:
            out.append(_inconclusive(name, f"{type(exc).__name__}: {exc}"))
    return out


# ---------------------------------------------------------------------------
# outputs


def _write_trace(path: Path, trace: SolverTrace, reference):
    d = trace.iterates.shape[1]
    names = [f"y{i}" for i in range(d - 1)] + ["y_height"]
    snames = [f"shadow{i}" for i in range(d - 1)] + ["shadow_height"]
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iter", *names, *snames, "residual", "fejer_distance"])
        for k, y in enumerate(trace.iterates):
            row = [int(trace.indices[k]), *(_fmt(v) for v in y)]
            if k < len(trace.shadows):
                row += [*(_fmt(v) for v in trace.shadows[k]), _fmt(trace.residuals[k])]
            else:
                row += [""] * (d + 1)
            row.append("" if reference is None else _fmt(np.linalg.norm(y - reference)))
            w.writerow(row)


def _write_json(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2, allow_nan=False) + "\n", encoding="utf-8")


def emit_envelope_grid(cfg: ScenarioConfig, path, gauge: Optional[GaugeOracle] = None) -> Path:
    """Write ``x, lam, envelope, case, prox_x, prox_lam`` over the configured grid."""
    if cfg.grid is None:
        raise ConfigError([f"{cfg.name}: outputs.grid is required for grid output"])
    if cfg.base_dim != 1:
        raise UnsupportedDimension("envelope grids need a one-dimensional base space")
    g = gauge if gauge is not None else build_gauge(cfg.gauge_spec)
    xs = np.linspace(*cfg.grid.x_range, cfg.grid.resolution)
    ls = np.linspace(*cfg.grid.y_range, cfg.grid.resolution)
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "lam", "envelope", "case", "prox_x", "prox_lam"])
        for x in xs:
            for lam in ls:
                res = polar_prox(g, cfg.alpha, np.array([x, lam]))
                w.writerow([_fmt(x), _fmt(lam), _fmt(res.envelope_value), str(res.case_tag),
                            _fmt(res.prox_point[0]), _fmt(res.prox_point[1])])
    return path


def _one_run(cfg: ScenarioConfig, g: GaugeOracle, gamma: float, rng) -> tuple:
    t0 = time.perf_counter()
    trace = run_gp4a(g, cfg.solver_config(gamma), np.asarray(cfg.start, dtype=float))
    summary = RunSummary(
        status=trace.status,
        iterations=trace.iterations,
        final_point=trace.final_point.tolist(),
        final_shadow=None if trace.final_shadow is None else trace.final_shadow.tolist(),
        residual=trace.final_residual,
        gamma=gamma,
        message=trace.message,
    )
    if cfg.gauge_kind == "perspective" and len(trace.shadows):
        lam = float(trace.shadows[-1, -1])
        base = trace.final_point[:-1]
        summary.minimizer_estimate = (base / lam if lam > SHADOW_FLOOR else base).tolist()
    summary.reports = _run_audits(cfg, g, trace, rng, summary)
    summary.wall_clock_seconds = time.perf_counter() - t0
    return trace, summary


def run_scenario(cfg: ScenarioConfig, out_dir, *, seed: Optional[int] = None, timing: bool = False) -> int:
    """Run every configured relaxation, write trace(s), summary and grid; return the exit code."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seed = cfg.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    try:
        g = build_gauge(cfg.gauge_spec)
    except (ValueError, TypeError) as exc:
        raise ConfigError([f"{cfg.name}: gauge construction failed: {exc}"]) from exc
    runs = []
    t0 = time.perf_counter()
    for gamma in cfg.gamma:
        trace, summary = _one_run(cfg, g, gamma, rng)
        ref = trace.final_point if trace.converged else (
            None if cfg.fixed_point is None else np.asarray(cfg.fixed_point))
        name = cfg.trace_path
        if len(cfg.gamma) > 1:
            stem, dot, ext = name.rpartition(".")
            name = f"{stem}_gamma{gamma:g}.{ext}" if dot else f"{name}_gamma{gamma:g}"
        _write_trace(out / name, trace, ref)
        runs.append(summary)
    if cfg.grid is not None:
        emit_envelope_grid(cfg, out / cfg.grid_path, g)
    code = max(r.exit_code for r in runs)
    doc = {"scenario": cfg.name, "seed": seed}
    if len(runs) == 1:
        doc.update(runs[0].to_dict())
    else:
        doc["runs"] = [r.to_dict() for r in runs]
        doc["exit_code"] = code
    _write_json(out / cfg.summary_path, doc)
    if timing:
        _write_json(out / "timing.json", {"wall_clock_seconds": time.perf_counter() - t0,
                                          "runs": [r.wall_clock_seconds for r in runs]})
    return code


def list_builtin_scenarios() -> str:
    lines = []
    for name in builtin_names():
        cfg = load_builtin(name)
        lines.append(f"{name:<26} {cfg.description}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# entry point


def _parser():
    p = argparse.ArgumentParser(prog="polarprox", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out-dir", default="polarprox-out", help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="override the scenario seed")

    r = sub.add_parser("run", help="run a scenario")
    r.add_argument("config", nargs="?", help="scenario YAML file")
    r.add_argument("--builtin", metavar="NAME", help="run a builtin scenario")
    r.add_argument("--all", action="store_true", help="run every builtin scenario")
    r.add_argument("--timing", action="store_true", help="also write timing.json")
    common(r)

    sub.add_parser("list", help="list builtin scenarios")

    gr = sub.add_parser("grid", help="write the envelope grid of a scenario")
    gr.add_argument("config", nargs="?")
    gr.add_argument("--builtin", metavar="NAME")
    common(gr)
    return p


def _load(args):
    picked = [x for x in (args.config, args.builtin) if x]
    if len(picked) != 1:
        raise ConfigError(["give exactly one of a config path or --builtin NAME"])
    return load_builtin(args.builtin) if args.builtin else load_config(args.config)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "list":
            print(list_builtin_scenarios())
            return EXIT_OK
        if args.command == "grid":
            cfg = _load(args)
            out = Path(args.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            path = emit_envelope_grid(cfg, out / cfg.grid_path)
            print(f"{cfg.name}: wrote {path}")
            return EXIT_OK
        if args.all:
            if args.config or args.builtin:
                raise ConfigError(["--all takes no config"])
            cfgs = [load_builtin(n) for n in builtin_names()]
            multi = True
        else:
            cfgs = [_load(args)]
            multi = False
    except (ConfigError, UnsupportedDimension) as exc:
        for e in getattr(exc, "errors", [str(exc)]):
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    worst = EXIT_OK
    for cfg in cfgs:
        out = Path(args.out_dir) / cfg.name if multi else Path(args.out_dir)
        try:
            code = run_scenario(cfg, out, seed=args.seed, timing=args.timing)
        except ConfigError as exc:
            for e in exc.errors:
                print(f"config error: {e}", file=sys.stderr)
            return EXIT_CONFIG
        summary = json.loads((out / cfg.summary_path).read_text(encoding="utf-8"))
        status = summary.get("status") or ",".join(r["status"] for r in summary["runs"])
        print(f"{cfg.name}: status={status} exit={code} -> {out}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
