"""Projected polar proximal point iteration on the slice ``S = X x {1}``.

``run_gp4a`` iterates ``y <- (1 - gamma) P_S(T y) + gamma y`` where ``T`` is
the polar prox; ``run_p4a`` does the same for the perspective of a convex
function and reads off a minimizer from the limit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .gauges import ConvexFunctionSpec, GaugeOracle, make_perspective_gauge
from .geometry import ITERATIVE, ProjectionSettings, project_S
from .polar import polar_prox

__all__ = [
    "Status",
    "SolverConfig",
    "SolverTrace",
    "P4AResult",
    "gp4a_step",
    "relaxed_step",
    "run_gp4a",
    "run_p4a",
    "SHADOW_FLOOR",
]

SHADOW_FLOOR = 1e-6


class Status(enum.Enum):
    Converged = "Converged"
    MaxIterations = "MaxIterations"
    Diverged = "Diverged"
    Error = "Error"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SolverConfig:
    """Parameters of one run.

    ``stall_window``: a run is flagged Diverged when neither the residual nor
    the step length has improved for this many consecutive iterations.
    ``record_every``: keep every k-th iterate in the trace (the last one is
    always kept).
    """

    alpha: float = 1.0
    gamma: float = 0.0
    max_iterations: int = 100_000
    fixed_point_tolerance: float = 1e-8
    divergence_guard: float = 1e6
    stall_window: int = 1000
    record_every: int = 1

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must lie in [0, 1), got {self.gamma}")
        if int(self.max_iterations) < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.fixed_point_tolerance > 0:
            raise ValueError("fixed_point_tolerance must be positive")
        if not self.divergence_guard > 0:
            raise ValueError("divergence_guard must be positive")
        if int(self.stall_window) < 1 or int(self.record_every) < 1:
            raise ValueError("stall_window and record_every must be >= 1")


@dataclass
class SolverTrace:
    """Record of a run.

    ``iterates[n]`` is ``y_n`` (height 1), ``shadows[n]`` is ``T y_n`` and
    ``residuals[n]`` is ``||T y_n - y_n||``; ``indices`` maps rows back to
    iteration numbers when the trace is decimated.
    """

    iterates: np.ndarray
    shadows: np.ndarray
    residuals: np.ndarray
    status: Status
    final_point: np.ndarray
    iterations: int
    indices: np.ndarray = None
    message: str = ""
    config: Optional[SolverConfig] = None

    def __post_init__(self):
        if self.indices is None:
            self.indices = np.arange(len(self.iterates))

    @property
    def converged(self) -> bool:
        return self.status is Status.Converged

    @property
    def final_shadow(self) -> Optional[np.ndarray]:
        return self.shadows[-1] if len(self.shadows) else None

    @property
    def final_residual(self) -> float:
        return float(self.residuals[-1]) if len(self.residuals) else math.nan

    @property
    def shadow_heights(self) -> np.ndarray:
        return self.shadows[:, -1] if len(self.shadows) else np.zeros(0)


def _check_on_slice(y):
    y = np.array(y, dtype=float)
    if y.ndim != 1 or y.size < 2:
        raise ValueError("iterates are flat lifted vectors")
    if y[-1] != 1.0:
        raise ValueError(f"iterate must have height exactly 1, got {y[-1]!r}")
    return y


def gp4a_step(g: GaugeOracle, alpha: float, y):
    """One step ``y -> P_S(T y)``; returns ``(next, shadow)``."""
    y = _check_on_slice(y)
    shadow = polar_prox(g, alpha, y).prox_point
    return project_S(shadow), shadow


def relaxed_step(g: GaugeOracle, cfg: SolverConfig, y):
    """One step of ``(1 - gamma) P_S T + gamma Id``; returns ``(next, shadow)``."""
    y = _check_on_slice(y)
    nxt, shadow = gp4a_step(g, cfg.alpha, y)
    if cfg.gamma:
        nxt = (1.0 - cfg.gamma) * nxt + cfg.gamma * y
        nxt[-1] = 1.0
    return nxt, shadow


def run_gp4a(g: GaugeOracle, cfg: SolverConfig, y0) -> SolverTrace:
    y = _check_on_slice(y0)
    keep = cfg.record_every
    its, shs, res, idx = [y], [], [], [0]
    status, message = Status.MaxIterations, ""
    best_res = best_step = math.inf
    last_gain = 0
    n = 0
    for n in range(1, int(cfg.max_iterations) + 1):
        try:
            nxt, shadow = relaxed_step(g, cfg, y)
            if not math.isfinite(g.eval(shadow)):
                raise FloatingPointError(f"prox point {shadow.tolist()} is outside the gauge domain")
        except Exception as exc:  # oracle failures are reported, not raised
            status, message = Status.Error, f"iteration {n - 1}: {type(exc).__name__}: {exc}"
            n -= 1
            break
        r = float(np.linalg.norm(shadow - y))
        step = float(np.linalg.norm(nxt - y))
        last = step < cfg.fixed_point_tolerance
        if (n - 1) % keep == 0 or last:
            shs.append(shadow)
            res.append(r)
        y = nxt
        if n % keep == 0 or last:
            its.append(y)
            idx.append(n)
        if last:
            status = Status.Converged
            break
        if float(np.linalg.norm(y)) > cfg.divergence_guard:
            status, message = Status.Diverged, f"||y_{n}|| exceeded {cfg.divergence_guard:g}"
            break
        if r < best_res or step < best_step:
            best_res = min(best_res, r)
            best_step = min(best_step, step)
            last_gain = n
        elif n - last_gain >= cfg.stall_window:
            status, message = Status.Diverged, f"no progress over {cfg.stall_window} iterations"
            break
    if idx[-1] != n and status is not Status.Error:
        its.append(y)
        idx.append(n)
    # shadows/residuals pair with every stored iterate except the last
    shs_arr = np.array(shs, dtype=float).reshape(-1, y.size)
    res_arr = np.array(res, dtype=float)
    return SolverTrace(
        np.array(its, dtype=float), shs_arr, res_arr, status, y.copy(), n,
        np.array(idx), message, cfg,
    )


@dataclass
class P4AResult:
    trace: SolverTrace
    minimizer_estimate: np.ndarray
    shadow_height: float
    gauge: GaugeOracle = field(repr=False, default=None)


def run_p4a(f: ConvexFunctionSpec, alpha: float, v0, cfg: SolverConfig,
            settings: ProjectionSettings = ITERATIVE) -> P4AResult:
    """Minimize ``f`` by iterating on its perspective from ``(v0, 1)``.

    At a limit ``(y, 1)`` with shadow height ``lam`` the estimate is
    ``y / lam``; below a height of ``SHADOW_FLOOR`` the zero-minimum branch
    returns ``y`` itself.
    """
    if cfg.alpha != alpha:
        cfg = SolverConfig(**{**cfg.__dict__, "alpha": float(alpha)})
    g = make_perspective_gauge(f, settings)
    v0 = np.atleast_1d(np.asarray(v0, dtype=float))
    if v0.size != f.dim:
        raise ValueError(f"start has dimension {v0.size}, function expects {f.dim}")
    trace = run_gp4a(g, cfg, np.append(v0, 1.0))
    base = trace.final_point[:-1]
    lam = float(trace.shadows[-1, -1]) if len(trace.shadows) else math.nan
    if math.isfinite(lam) and lam > SHADOW_FLOOR:
        est = base / lam
    else:
        est = base.copy()
    return P4AResult(trace, est, lam, g)
