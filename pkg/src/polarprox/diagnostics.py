"""Numerical audits of the operator inequalities and fixed-point structure.

Every auditor returns a :class:`PropertyReport`.  Auditors that take a fixed
point re-verify it (``||P_S T p - p|| <= FIXED_POINT_TOL``) instead of
trusting the caller.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .gauges import ConvexFunctionSpec, FundamentalSetDescriptor, GaugeOracle, make_perspective_gauge
from .geometry import ITERATIVE, ProjectionSettings, project_S
from .polar import CaseTag, polar_prox
from .solver import SolverTrace

__all__ = [
    "Verdict",
    "PropertyReport",
    "FacialReport",
    "InvalidFixedPoint",
    "MissingGroundTruth",
    "InconclusiveEstimate",
    "UNBOUNDED",
    "FIXED_POINT_TOL",
    "verify_fixed_point",
    "audit_T_fqne",
    "audit_composite_contraction",
    "e_gap",
    "audit_fejer",
    "estimate_lambda_prime",
    "verify_facial_characterization",
    "search_fqne_violation",
    "check_shadow_limit",
]

FIXED_POINT_TOL = 1e-7


class Verdict(enum.Enum):
    Holds = "Holds"
    Violated = "Violated"
    Inconclusive = "Inconclusive"

    def __str__(self):
        return self.value


class InvalidFixedPoint(ValueError):
    pass


class MissingGroundTruth(ValueError):
    pass


class InconclusiveEstimate(RuntimeError):
    """Alternating projections neither converged nor certified a gap."""


class _Unbounded:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "Unbounded"

    __str__ = __repr__


UNBOUNDED = _Unbounded()


@dataclass
class PropertyReport:
    property_name: str
    samples_tested: int
    worst_violation: float
    witnesses: list
    verdict: Verdict
    slack: float
    details: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.Holds

    def to_dict(self) -> dict:
        return {
            "property_name": self.property_name,
            "samples_tested": int(self.samples_tested),
            "worst_violation": _jsonable(self.worst_violation),
            "slack": self.slack,
            "verdict": str(self.verdict),
            "witnesses": _jsonable(self.witnesses),
            "details": _jsonable(self.details),
        }


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, enum.Enum):
        return v.value
    if v is UNBOUNDED:
        return "Unbounded"
    return v


def _report(name, violations, witnesses, slack, details=None, n=None) -> PropertyReport:
    worst = float(np.max(violations)) if len(violations) else 0.0
    verdict = Verdict.Holds if worst <= slack else Verdict.Violated
    return PropertyReport(name, len(violations) if n is None else n, worst, witnesses, verdict, slack,
                          details or {})


def _T(g, alpha, y):
    return polar_prox(g, alpha, y).prox_point


def verify_fixed_point(g: GaugeOracle, p, alpha: float = 1.0, tol: float = FIXED_POINT_TOL) -> float:
    """Return ``||P_S T p - p||`` or raise :class:`InvalidFixedPoint`."""
    p = np.asarray(p, dtype=float)
    if p[-1] != 1.0:
        raise InvalidFixedPoint(f"fixed points live on the slice, got height {p[-1]}")
    gap = float(np.linalg.norm(project_S(_T(g, alpha, p)) - p))
    if gap > tol:
        raise InvalidFixedPoint(f"||P_S T p - p|| = {gap:.3e} > {tol:g} at {p.tolist()}")
    return gap


def audit_T_fqne(g: GaugeOracle, zero_points: Sequence, probes: Sequence, *, alpha: float = 1.0,
                 slack: float = 1e-6, zero_tol: float = 1e-9) -> PropertyReport:
    """Check ``||Ty - x||^2 + ||Ty - y||^2 <= ||y - x||^2`` for zeros ``x`` of the gauge."""
    zs = [np.asarray(x, dtype=float) for x in zero_points]
    for x in zs:
        if g.eval(x) > zero_tol:
            raise InvalidFixedPoint(f"{x.tolist()} is not a zero of {g.name}")
    viol, wit = [], []
    for j, y in enumerate(probes):
        y = np.asarray(y, dtype=float)
        Ty = _T(g, alpha, y)
        for i, x in enumerate(zs):
            v = (np.sum((Ty - x) ** 2) + np.sum((Ty - y) ** 2)) - np.sum((y - x) ** 2)
            viol.append(float(v))
            if v > slack:
                wit.append({"probe": y, "zero_point": x, "excess": float(v)})
    return _report("T firmly quasinonexpansive", viol, wit, slack)


def e_gap(g: GaugeOracle, alpha: float, x, y, *, verify: bool = True) -> float:
    """``||Ty - y||^2 - ||Tx - x||^2`` for a fixed point ``x`` of ``P_S T``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if verify:
        verify_fixed_point(g, x, alpha)
    if y[-1] != 1.0:
        raise ValueError("probe must lie on the slice")
    return float(np.sum((_T(g, alpha, y) - y) ** 2) - np.sum((_T(g, alpha, x) - x) ** 2))


def audit_composite_contraction(g: GaugeOracle, fixed_point, probes: Sequence, *, alpha: float = 1.0,
                                slack: float = 1e-6) -> PropertyReport:
    """Check ``||P_S T y - x||^2 <= ||y - x||^2 - E(x, y)`` over probes on the slice."""
    x = np.asarray(fixed_point, dtype=float)
    verify_fixed_point(g, x, alpha)
    Tx = _T(g, alpha, x)
    base_res = float(np.sum((Tx - x) ** 2))
    viol, wit, egaps = [], [], []
    for y in probes:
        y = np.asarray(y, dtype=float)
        Ty = _T(g, alpha, y)
        E = float(np.sum((Ty - y) ** 2)) - base_res
        v = float(np.sum((project_S(Ty) - x) ** 2) - np.sum((y - x) ** 2) + E)
        viol.append(v)
        egaps.append(E)
        if v > slack:
            wit.append({"probe": y, "excess": v, "E": E})
    return _report("composite contraction", viol, wit, slack,
                   {"min_E": min(egaps) if egaps else 0.0})


def audit_fejer(trace: SolverTrace, reference, *, slack: float = 1e-9) -> PropertyReport:
    """Per-step check ``||y_{n+1} - ref|| <= ||y_n - ref||``; witnesses are step indices."""
    ref = np.asarray(reference, dtype=float)
    d = np.linalg.norm(np.asarray(trace.iterates) - ref, axis=1)
    inc = np.diff(d)
    wit = [int(trace.indices[i + 1]) for i in np.nonzero(inc > slack)[0]]
    return _report("Fejer monotone", inc.tolist(), wit, slack, {"reference": ref})


# ---------------------------------------------------------------------------
# lambda prime


def _slice_feasible(D, lam, start, tol, budget, window=100):
    """Decide whether ``D`` meets the slice ``X x {lam}`` by alternating projections.

    Returns True (gap below ``tol``), False (gap stagnated above ``tol``) or
    None when the budget runs out.
    """
    z = np.array(start, dtype=float)
    z[-1] = lam
    history = []
    for k in range(budget):
        w = D.project(z)
        gap = float(np.linalg.norm(w - z))
        if gap <= tol:
            return True
        history.append(gap)
        if k >= window:
            old = history[k - window]
            if old - gap <= 1e-6 * gap:
                return False
        z = w.copy()
        z[-1] = lam
    return None


def estimate_lambda_prime(D: FundamentalSetDescriptor, settings: ProjectionSettings = ITERATIVE, *,
                          dim: Optional[int] = None, height_cap: float = 1e6, tol: float = 1e-7):
    """Largest height reached by ``D``, or ``UNBOUNDED`` when it exceeds ``height_cap``.

    Projections of the far points ``(0, T)`` have nondecreasing heights that
    are certified lower bounds and approach the supremum like ``1/T``.  ``T``
    grows by 1e3 until the height settles (or passes the cap).  The bracket
    above that bound is then refined by bisection with an alternating
    projection test for ``D`` meeting the slice ``X x {lam}``.
    """
    S = D.set
    n = dim if dim is not None else (D.dim if D.dim is not None else _dim_of(S))
    budget = settings.max_inner_iterations
    feas_tol = max(settings.tolerance, 1e-9)

    T, h_prev, a = height_cap, None, None
    for _ in range(8):
        far = np.zeros(n)
        far[-1] = T
        a_new = S.project(far)
        h = float(a_new[-1])
        if h > height_cap:
            return UNBOUNDED
        if a is not None and h - h_prev <= tol * max(1.0, abs(h)):
            a = a_new
            break
        a, h_prev = a_new, h
        T *= 1e3
    else:
        raise InconclusiveEstimate("heights of far projections did not settle")
    h = float(a[-1])

    def feasible(lam):
        if lam <= h:
            return True
        res = _slice_feasible(S, lam, a, feas_tol, budget)
        if res is None:
            raise InconclusiveEstimate(f"slice at height {lam:g} undecided after {budget} cycles")
        return res

    lo = max(h, 0.0)
    step = max(1e-3, 1e-3 * lo)
    hi = lo + step
    while feasible(hi):
        lo, step = hi, 2.0 * step
        hi = lo + step
        if hi > height_cap:
            return UNBOUNDED
    while hi - lo > tol * max(1.0, lo):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _dim_of(S):
    from .gauges import _probe_dim

    return _probe_dim(S)


# ---------------------------------------------------------------------------
# facial structure


@dataclass
class FacialReport:
    lambda_prime: float
    theta_prime: float
    r_prime: float
    face_samples: list
    consistency_errors: dict
    degenerate: bool = False
    tolerance: float = 1e-4

    def __post_init__(self):
        if not self.degenerate:
            tp = self.lambda_prime / (1.0 + self.lambda_prime)
            if abs(tp - self.theta_prime) > 1e-15 * max(1.0, tp) or not 0.0 <= self.theta_prime < 1.0:
                raise ValueError("theta_prime must equal lambda_prime / (1 + lambda_prime) and lie in [0, 1)")

    @property
    def holds(self) -> bool:
        return all(v <= self.tolerance for v in self.consistency_errors.values())

    def to_dict(self):
        return _jsonable({
            "lambda_prime": self.lambda_prime,
            "theta_prime": self.theta_prime,
            "r_prime": self.r_prime,
            "face_samples": self.face_samples,
            "consistency_errors": self.consistency_errors,
            "degenerate": self.degenerate,
            "verdict": "Holds" if self.holds else "Violated",
        })


def verify_facial_characterization(f: ConvexFunctionSpec, trace: SolverTrace, *, alpha: float = 1.0,
                                   gauge: Optional[GaugeOracle] = None, tol: float = 1e-4) -> FacialReport:
    """Compare a converged perspective run with the closed-form facial description.

    ``lambda_prime`` is read off the limiting shadow height ``theta`` as
    ``theta / (1 - theta)``.  Residuals reported:

    * ``lambda_prime``: ``|lambda_prime - 1/min f|``
    * ``recovered_minimizer``: ``f((1 + l)/l * y) - min f`` for the limit base ``y``
    * ``fixed_point``: ``||P_S T p - p||`` at ``p = (l/(1+l) x_min, 1)``
    * ``shadow_base``: ``||base(T y) - y||`` at the limit

    With ``min f = 0`` the face is at infinite height; the report is marked
    degenerate and checks that the limit is a zero of ``f`` instead.
    """
    if f.known_min is None:
        raise MissingGroundTruth(f"{f.name} has no known minimum")
    if len(trace.shadows) == 0:
        raise ValueError("trace has no shadow points")
    g = gauge if gauge is not None else make_perspective_gauge(f)
    fmin, xmin = f.min_value, f.minimizer
    y = trace.final_point[:-1]
    theta = float(trace.shadows[-1, -1])
    r_prime = trace.final_residual
    shadow_base = float(np.linalg.norm(trace.shadows[-1, :-1] - y))
    if fmin <= 0.0:
        errs = {"zero_of_f": abs(float(f.eval(y))), "shadow_height": abs(1.0 - theta),
                "shadow_base": shadow_base}
        return FacialReport(math.inf, 1.0, r_prime, [np.append(y, 1.0)], errs, True, tol)
    lam = theta / (1.0 - theta)
    th = lam / (1.0 + lam)
    p = np.append(th * xmin, 1.0)
    fp_res = float(np.linalg.norm(project_S(_T(g, alpha, p)) - p))
    errs = {
        "lambda_prime": abs(lam - 1.0 / fmin),
        "recovered_minimizer": float(f.eval((1.0 + lam) / lam * y)) - fmin,
        "fixed_point": fp_res,
        "shadow_base": shadow_base,
    }
    face = [np.append(xmin / fmin, 1.0 / fmin)]
    return FacialReport(lam, th, 1.0 - th, face, errs, False, tol)


# ---------------------------------------------------------------------------
# cutter search


def _inner(g, alpha, x, y):
    Ty = _T(g, alpha, y)
    PTy = project_S(Ty)
    return float((x - PTy) @ (y - PTy)), Ty


def search_fqne_violation(g: GaugeOracle, fixed_point, probe_budget: int = 1000, *, alpha: float = 1.0,
                          radius: float = 4.0, ascent_steps: int = 50, seed: int = 0,
                          slack: float = 1e-8) -> PropertyReport:
    """Look for ``y`` on the slice with ``<x - P_S T y, y - P_S T y> > 0``.

    Uniform probes in a box of half-width ``radius`` around the fixed point,
    followed by coordinate ascent from the best probe.  A positive inner
    product certifies that ``P_S T`` is not firmly quasinonexpansive.  Each
    witness records the shadow heights ``lam`` (at the fixed point) and ``mu``
    (at the witness) so the necessary condition ``lam < mu < 1`` can be read off.
    """
    x = np.asarray(fixed_point, dtype=float)
    verify_fixed_point(g, x, alpha)
    res_x = polar_prox(g, alpha, x)
    lam = res_x.height
    rng = np.random.default_rng(seed)
    d = x.size - 1
    vals, pts = [], []
    for _ in range(int(probe_budget)):
        y = x.copy()
        y[:-1] += rng.uniform(-radius, radius, size=d)
        v, _ = _inner(g, alpha, x, y)
        vals.append(v)
        pts.append(y)
    best_i = int(np.argmax(vals)) if vals else 0
    best_y = pts[best_i] if pts else x.copy()
    best_v = vals[best_i] if vals else 0.0
    step = 0.5 * radius
    for _ in range(int(ascent_steps)):
        moved = False
        for j in range(d):
            for sgn in (1.0, -1.0):
                y = best_y.copy()
                y[j] += sgn * step
                v, _ = _inner(g, alpha, x, y)
                if v > best_v:
                    best_v, best_y, moved = v, y, True
        if not moved:
            step *= 0.5
    vals.append(best_v)
    witnesses = []
    if best_v > slack:
        _, Ty = _inner(g, alpha, x, best_y)
        mu = float(Ty[-1])
        witnesses.append({
            "probe": best_y, "inner_product": best_v, "shadow": Ty,
            "lambda": lam, "mu": mu, "lambda_lt_mu_lt_1": bool(lam < mu < 1.0),
        })
    rep = _report("P_S T firmly quasinonexpansive", vals, witnesses, slack,
                  {"fixed_point_case": str(res_x.case_tag),
                   "fixed_point_shadow_height": lam,
                   "level_set_case_at_fixed_point": res_x.case_tag is CaseTag.LevelSetBalance})
    if rep.verdict is Verdict.Holds:
        # absence of a witness is not a proof
        rep.verdict = Verdict.Inconclusive
    return rep


def check_shadow_limit(trace: SolverTrace, *, tol: float = 1e-4, noise: float = 1e-7) -> PropertyReport:
    """Check that the last shadow height equals ``1 - r'`` and that heights settle monotonically."""
    if len(trace.shadows) == 0:
        return PropertyReport("shadow height limit", 0, math.nan, [], Verdict.Inconclusive, tol)
    lam = float(trace.shadows[-1, -1])
    r_prime = trace.final_residual
    err = abs(lam - (1.0 - r_prime))
    h = trace.shadow_heights
    tail = np.diff(h[len(h) // 2:])
    monotone = bool(np.all(tail <= noise) or np.all(tail >= -noise))
    rep = _report("shadow height limit", [err], [] if err <= tol else [{"height": lam, "r_prime": r_prime}],
                  tol, {"final_height": lam, "r_prime": r_prime, "eventually_monotone": monotone},
                  n=len(h))
    if rep.verdict is Verdict.Holds and not monotone:
        rep.verdict = Verdict.Inconclusive
    return rep
