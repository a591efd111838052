"""Scenario files: YAML schema, validation and construction of gauges from it.

A scenario names exactly one gauge variant::

    gauge:
      norm: {kind: linf, weight: 1.0, base_only: false}
      # or  minkowski: {set: <set>}
      # or  gauge_plus_indicator: {inner: <gauge>, set: <set>}
      # or  perspective: {family: abs_shift, params: {shift: 1.0, offset: 1.0}}

where a ``<set>`` is one of ``box``, ``halfspace``, ``ball``, ``polyhedron``,
``parabola`` or ``intersection`` (a list of sets).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from . import gauges as G
from .geometry import Ball, Box, ConvexSetOracle, Halfspace, Intersection, ParabolaRegion, Polyhedron
from .solver import SolverConfig

__all__ = [
    "ConfigError",
    "GridSpec",
    "ScenarioConfig",
    "KNOWN_AUDITS",
    "load_config",
    "parse_config",
    "builtin_names",
    "builtin_path",
    "build_gauge",
    "build_set",
    "build_function",
    "load_builtin",
]

KNOWN_AUDITS = (
    "fejer",
    "shadow_limit",
    "composite_contraction",
    "t_fqne",
    "fqne_violation",
    "facial",
    "lambda_prime",
)

_TOP_KEYS = {"name", "description", "seed", "gauge", "alpha", "gamma", "start", "solver", "audits",
             "outputs", "fixed_point", "probes"}
_SOLVER_KEYS = {f.name for f in dataclasses.fields(SolverConfig)} - {"alpha", "gamma"}


class ConfigError(ValueError):
    """Collects field-level validation messages."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class GridSpec:
    x_range: tuple = (-2.0, 2.0)
    y_range: tuple = (-2.0, 2.0)
    resolution: int = 101


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    gauge_spec: dict
    alpha: float = 1.0
    gamma: tuple = (0.0,)
    start: tuple = (0.0, 1.0)
    solver: dict = field(default_factory=dict)
    audits: tuple = ()
    trace_path: str = "trace.csv"
    summary_path: str = "summary.json"
    grid: Optional[GridSpec] = None
    grid_path: str = "grid.csv"
    fixed_point: Optional[tuple] = None
    probes: int = 100
    seed: int = 0
    description: str = ""

    @property
    def gauge_kind(self) -> str:
        return next(iter(self.gauge_spec))

    @property
    def base_dim(self) -> int:
        return len(self.start) - 1

    def solver_config(self, gamma: Optional[float] = None) -> SolverConfig:
        g = self.gamma[0] if gamma is None else gamma
        return SolverConfig(alpha=self.alpha, gamma=g, **self.solver)


def _num(v, where, errs, positive=False, nonneg=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        errs.append(f"{where}: expected a number, got {v!r}")
        return None
    v = float(v)
    if not np.isfinite(v):
        errs.append(f"{where}: must be finite")
    elif positive and v <= 0:
        errs.append(f"{where}: must be > 0, got {v}")
    elif nonneg and v < 0:
        errs.append(f"{where}: must be >= 0, got {v}")
    return v


def _vec(v, where, errs, length=None):
    if not isinstance(v, (list, tuple)) or not v:
        errs.append(f"{where}: expected a nonempty list of numbers")
        return None
    out = [_num(x, f"{where}[{i}]", errs) for i, x in enumerate(v)]
    if any(x is None for x in out):
        return None
    if length is not None and len(out) != length:
        errs.append(f"{where}: expected length {length}, got {len(out)}")
    return tuple(out)


_SET_KEYS = {
    "box": {"lower", "upper"},
    "halfspace": {"normal", "offset"},
    "ball": {"center", "radius", "kind"},
    "polyhedron": {"A", "b"},
    "parabola": {"curvature"},
}


def _check_set(spec, where, errs, dim):
    if not isinstance(spec, dict) or len(spec) != 1:
        errs.append(f"{where}: a set is a mapping with exactly one of "
                    f"{sorted(list(_SET_KEYS) + ['intersection'])}")
        return
    (kind, body), = spec.items()
    if kind == "intersection":
        if not isinstance(body, list) or not body:
            errs.append(f"{where}.intersection: expected a nonempty list of sets")
            return
        for i, s in enumerate(body):
            _check_set(s, f"{where}.intersection[{i}]", errs, dim)
        return
    if kind not in _SET_KEYS:
        errs.append(f"{where}: unknown set kind {kind!r}")
        return
    body = body or {}
    if not isinstance(body, dict):
        errs.append(f"{where}.{kind}: expected a mapping")
        return
    extra = set(body) - _SET_KEYS[kind]
    if extra:
        errs.append(f"{where}.{kind}: unknown keys {sorted(extra)}")
    w = f"{where}.{kind}"
    if kind == "box":
        lo = _vec(body.get("lower"), f"{w}.lower", errs, dim)
        hi = _vec(body.get("upper"), f"{w}.upper", errs, dim)
        if lo and hi and any(a > b for a, b in zip(lo, hi)):
            errs.append(f"{w}: lower must not exceed upper")
    elif kind == "halfspace":
        n = _vec(body.get("normal"), f"{w}.normal", errs, dim)
        if n and not any(n):
            errs.append(f"{w}.normal: must be nonzero")
        _num(body.get("offset", 0.0), f"{w}.offset", errs)
    elif kind == "ball":
        _vec(body.get("center", [0.0] * (dim or 1)), f"{w}.center", errs, dim)
        _num(body.get("radius"), f"{w}.radius", errs, nonneg=True)
        if body.get("kind", "l2") not in ("l1", "l2", "linf"):
            errs.append(f"{w}.kind: must be l1, l2 or linf")
    elif kind == "polyhedron":
        A = body.get("A")
        if not isinstance(A, list) or not A:
            errs.append(f"{w}.A: expected a list of rows")
        else:
            for i, row in enumerate(A):
                _vec(row, f"{w}.A[{i}]", errs, dim)
        _vec(body.get("b"), f"{w}.b", errs, len(A) if isinstance(A, list) else None)
    elif kind == "parabola":
        if dim not in (None, 2):
            errs.append(f"{w}: the parabola region lives in a 2-D lifted space")
        _num(body.get("curvature", 1.0), f"{w}.curvature", errs, positive=True)


_GAUGE_KINDS = ("norm", "minkowski", "gauge_plus_indicator", "perspective")


def _check_gauge(spec, where, errs, dim):
    if not isinstance(spec, dict) or len(spec) != 1 or next(iter(spec)) not in _GAUGE_KINDS:
        errs.append(f"{where}: exactly one of {list(_GAUGE_KINDS)} must be given")
        return
    (kind, body), = spec.items()
    body = body or {}
    w = f"{where}.{kind}"
    if not isinstance(body, dict):
        errs.append(f"{w}: expected a mapping")
        return
    if kind == "norm":
        extra = set(body) - {"kind", "weight", "base_only"}
        if extra:
            errs.append(f"{w}: unknown keys {sorted(extra)}")
        if body.get("kind", "linf") not in ("l1", "l2", "linf"):
            errs.append(f"{w}.kind: must be l1, l2 or linf")
        _num(body.get("weight", 1.0), f"{w}.weight", errs, positive=True)
    elif kind == "minkowski":
        if set(body) - {"set"}:
            errs.append(f"{w}: unknown keys {sorted(set(body) - {'set'})}")
        if "set" not in body:
            errs.append(f"{w}.set: required")
        else:
            _check_set(body["set"], f"{w}.set", errs, dim)
    elif kind == "gauge_plus_indicator":
        if set(body) != {"inner", "set"}:
            errs.append(f"{w}: needs exactly the keys 'inner' and 'set'")
        if "inner" in body:
            _check_gauge(body["inner"], f"{w}.inner", errs, dim)
        if "set" in body:
            _check_set(body["set"], f"{w}.set", errs, dim)
    elif kind == "perspective":
        fam = body.get("family")
        if fam not in G.FUNCTION_FAMILIES:
            errs.append(f"{w}.family: must be one of {sorted(G.FUNCTION_FAMILIES)}, got {fam!r}")
        params = body.get("params", {}) or {}
        if not isinstance(params, dict):
            errs.append(f"{w}.params: expected a mapping")
        extra = set(body) - {"family", "params"}
        if extra:
            errs.append(f"{w}: unknown keys {sorted(extra)}")
        if fam in G.FUNCTION_FAMILIES and isinstance(params, dict):
            try:
                f = G.FUNCTION_FAMILIES[fam](**params)
            except (TypeError, ValueError) as exc:
                errs.append(f"{w}.params: {exc}")
            else:
                if dim is not None and f.dim + 1 != dim:
                    errs.append(f"{w}: function of dimension {f.dim} does not match start of length {dim - 1}")


def parse_config(raw: Any, *, source: str = "<config>") -> ScenarioConfig:
    """Validate a decoded YAML document; raises :class:`ConfigError` listing every problem."""
    errs: list = []
    if not isinstance(raw, dict):
        raise ConfigError([f"{source}: top level must be a mapping"])
    extra = set(raw) - _TOP_KEYS
    if extra:
        errs.append(f"unknown top-level keys {sorted(extra)}")
    name = raw.get("name", Path(source).stem)
    if not isinstance(name, str) or not name:
        errs.append("name: expected a nonempty string")

    start_raw = raw.get("start")
    if isinstance(start_raw, dict):
        # explicit lifted point: {base: [...], height: 1}
        if set(start_raw) - {"base", "height"}:
            errs.append(f"start: unknown keys {sorted(set(start_raw) - {'base', 'height'})}")
        if start_raw.get("height", 1.0) != 1.0:
            errs.append("start.height: iterates live on the slice, height must be 1")
        start_raw = start_raw.get("base")
    start = _vec(start_raw, "start", errs)
    if start is not None:
        start = start + (1.0,)
    dim = len(start) if start else None

    if "gauge" not in raw:
        errs.append("gauge: required")
    else:
        _check_gauge(raw["gauge"], "gauge", errs, dim)

    alpha = _num(raw.get("alpha", 1.0), "alpha", errs, positive=True)
    gam_raw = raw.get("gamma", 0.0)
    gam_list = gam_raw if isinstance(gam_raw, list) else [gam_raw]
    gammas = []
    for i, gv in enumerate(gam_list):
        v = _num(gv, f"gamma[{i}]" if isinstance(gam_raw, list) else "gamma", errs)
        if v is not None and not 0.0 <= v < 1.0:
            errs.append(f"gamma: must lie in [0, 1), got {v}")
        gammas.append(v)
    if not gammas:
        errs.append("gamma: empty list")

    solver = raw.get("solver", {}) or {}
    if not isinstance(solver, dict):
        errs.append("solver: expected a mapping")
        solver = {}
    bad = set(solver) - _SOLVER_KEYS
    if bad:
        errs.append(f"solver: unknown keys {sorted(bad)}")
    solver = {k: v for k, v in solver.items() if k in _SOLVER_KEYS}
    for k, v in solver.items():
        _num(v, f"solver.{k}", errs, positive=True)
    for k in ("max_iterations", "stall_window", "record_every"):
        if k in solver and isinstance(solver[k], float):
            if solver[k] != int(solver[k]):
                errs.append(f"solver.{k}: expected an integer")
            solver[k] = int(solver[k])

    audits = raw.get("audits", []) or []
    if not isinstance(audits, list):
        errs.append("audits: expected a list")
        audits = []
    for a in audits:
        if a not in KNOWN_AUDITS:
            errs.append(f"audits: unknown audit {a!r} (known: {', '.join(KNOWN_AUDITS)})")

    fixed_point = None
    if raw.get("fixed_point") is not None:
        fp = _vec(raw["fixed_point"], "fixed_point", errs, None if dim is None else dim - 1)
        fixed_point = None if fp is None else fp + (1.0,)

    probes = raw.get("probes", 100)
    if isinstance(probes, bool) or not isinstance(probes, int) or probes < 1:
        errs.append("probes: expected a positive integer")

    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        errs.append("seed: expected a nonnegative integer")

    outputs = raw.get("outputs", {}) or {}
    grid = None
    if not isinstance(outputs, dict):
        errs.append("outputs: expected a mapping")
        outputs = {}
    bad = set(outputs) - {"trace", "summary", "grid", "grid_file"}
    if bad:
        errs.append(f"outputs: unknown keys {sorted(bad)}")
    if outputs.get("grid") is not None:
        gs = outputs["grid"]
        if not isinstance(gs, dict):
            errs.append("outputs.grid: expected a mapping")
        else:
            if set(gs) - {"x_range", "y_range", "resolution"}:
                errs.append(f"outputs.grid: unknown keys {sorted(set(gs) - {'x_range', 'y_range', 'resolution'})}")
            xr = _vec(gs.get("x_range", [-2, 2]), "outputs.grid.x_range", errs, 2)
            yr = _vec(gs.get("y_range", [-2, 2]), "outputs.grid.y_range", errs, 2)
            res = gs.get("resolution", 101)
            if isinstance(res, bool) or not isinstance(res, int) or res < 2:
                errs.append("outputs.grid.resolution: expected an integer >= 2")
            if dim is not None and dim != 2:
                errs.append("outputs.grid: envelope grids need a one-dimensional base space")
            if xr and yr:
                grid = GridSpec(xr, yr, res)
    for k in ("trace", "summary", "grid_file"):
        if k in outputs and not isinstance(outputs[k], str):
            errs.append(f"outputs.{k}: expected a file name")

    if errs:
        raise ConfigError([f"{source}: {e}" for e in errs])
    return ScenarioConfig(
        name=name, gauge_spec=raw["gauge"], alpha=alpha, gamma=tuple(gammas), start=start,
        solver=solver, audits=tuple(audits),
        trace_path=outputs.get("trace", "trace.csv"), summary_path=outputs.get("summary", "summary.json"),
        grid=grid, grid_path=outputs.get("grid_file", "grid.csv"), fixed_point=fixed_point,
        probes=probes, seed=seed, description=str(raw.get("description", "")),
    )


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError([f"{path}: cannot read ({exc.strerror})"]) from exc
    except yaml.YAMLError as exc:
        raise ConfigError([f"{path}: not valid YAML ({exc})"]) from exc
    return parse_config(raw, source=str(path))


def _scenario_dir():
    return resources.files("polarprox") / "scenarios"


def builtin_names() -> list:
    return sorted(p.name[:-5] for p in _scenario_dir().iterdir() if p.name.endswith(".yaml"))


def builtin_path(name: str):
    p = _scenario_dir() / f"{name}.yaml"
    if not p.is_file():
        raise ConfigError([f"unknown builtin scenario {name!r} (known: {', '.join(builtin_names())})"])
    return p


def load_builtin(name: str) -> ScenarioConfig:
    p = builtin_path(name)
    return parse_config(yaml.safe_load(p.read_text(encoding="utf-8")), source=name)


# ---------------------------------------------------------------------------
# construction


def build_set(spec: dict) -> ConvexSetOracle:
    (kind, body), = spec.items()
    body = body or {}
    if kind == "box":
        return Box(body["lower"], body["upper"])
    if kind == "halfspace":
        return Halfspace(body["normal"], body.get("offset", 0.0))
    if kind == "ball":
        c = body.get("center")
        return Ball(np.asarray(c if c is not None else [0.0, 0.0], float), body["radius"], body.get("kind", "l2"))
    if kind == "polyhedron":
        return Polyhedron(body["A"], body["b"])
    if kind == "parabola":
        return ParabolaRegion(body.get("curvature", 1.0))
    if kind == "intersection":
        return Intersection(tuple(build_set(s) for s in body))
    raise ConfigError([f"unknown set kind {kind!r}"])


def build_function(spec: dict) -> G.ConvexFunctionSpec:
    body = spec["perspective"]
    return G.FUNCTION_FAMILIES[body["family"]](**(body.get("params") or {}))


def build_gauge(spec: dict) -> G.GaugeOracle:
    (kind, body), = spec.items()
    body = body or {}
    if kind == "norm":
        return G.make_norm_gauge(body.get("kind", "linf"), body.get("weight", 1.0),
                                 base_only=bool(body.get("base_only", False)))
    if kind == "minkowski":
        sset = body["set"]
        if "parabola" in sset:
            return G.make_minkowski_gauge(G.parabola_descriptor((sset["parabola"] or {}).get("curvature", 1.0)))
        return G.make_minkowski_gauge(G.FundamentalSetDescriptor(build_set(sset)))
    if kind == "gauge_plus_indicator":
        return G.make_gauge_plus_indicator(build_gauge(body["inner"]), build_set(body["set"]))
    if kind == "perspective":
        return G.make_perspective_gauge(build_function(spec))
    raise ConfigError([f"unknown gauge kind {kind!r}"])
