"""Polar envelope and polar proximal map of a closed gauge.

For ``alpha > 0`` the envelope is ``inf_u max{kappa(u), ||x - u|| / alpha}``
and the prox is the minimizing ``u``.  Both are computed at ``alpha = 1`` for
the rescaled gauge ``alpha * kappa`` and reported back in the original units.

The minimizer is one of two candidates:

* the projection of ``x`` onto the closed domain, or
* the projection onto the sublevel set ``{kappa <= r}`` whose radius balances
  ``||x - P_r x|| = r``.

Both are computed and the one with the smaller objective wins.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .gauges import GaugeOracle, rescale_gauge

__all__ = [
    "CaseTag",
    "PolarProxResult",
    "BisectionFailure",
    "polar_prox",
    "polar_envelope",
    "radius_gap",
    "ZERO_TOL",
]

ZERO_TOL = 1e-12
MAX_GROWTH = 60
MAX_BISECTION = 200


class CaseTag(enum.Enum):
    AlreadyZero = "AlreadyZero"
    DomainProjection = "DomainProjection"
    LevelSetBalance = "LevelSetBalance"

    def __str__(self):
        return self.value


class BisectionFailure(RuntimeError):
    """No sign change of the radius gap was found in the bracket."""


@dataclass(frozen=True)
class PolarProxResult:
    """Outcome of one polar prox evaluation.

    ``radius`` is ``kappa(prox_point)``; in the level-set case it also equals
    ``||x - prox_point|| / alpha``.  ``residual`` is ``|dist - alpha*r|`` at
    the returned radius (0 outside the level-set case).
    """

    prox_point: np.ndarray
    envelope_value: float
    radius: float
    case_tag: CaseTag
    bisection_iters: int = 0
    residual: float = 0.0

    @property
    def height(self) -> float:
        return float(self.prox_point[-1])


def _objective(k: GaugeOracle, x, u):
    return max(k.eval(u), float(np.linalg.norm(x - u)))


def radius_gap(g: GaugeOracle, alpha: float, x, r: float) -> float:
    """``||x - P_{g <= r} x|| - alpha * r``; nonincreasing in ``r``."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    x = np.asarray(x, dtype=float)
    return float(np.linalg.norm(x - g.sublevel_project(r, x))) - alpha * r


def _balance_radius(k: GaugeOracle, x, kx: float):
    """Root of ``h(r) = ||x - P_r x|| - r`` for the (alpha = 1) gauge ``k``."""

    def h(r):
        return float(np.linalg.norm(x - k.sublevel_project(r, x))) - r

    iters = 0
    hi = max(1.0, kx) if math.isfinite(kx) else max(1.0, float(np.linalg.norm(x)))
    h_hi = h(hi)
    while h_hi >= 0.0:
        if h_hi == 0.0:
            return hi, iters, 0.0
        iters += 1
        if iters > MAX_GROWTH:
            return None, iters, math.nan
        hi *= 2.0
        h_hi = h(hi)
    # h > 0 just above 0 because x is not a zero of the gauge
    lo = 0.0
    while lo == 0.0:
        iters += 1
        if iters > MAX_BISECTION:
            return hi, iters, abs(h_hi)
        mid = 0.5 * hi
        h_mid = h(mid)
        if h_mid > 0.0:
            lo = mid
        elif h_mid == 0.0:
            return mid, iters, 0.0
        else:
            hi, h_hi = mid, h_mid
    r, info = brentq(h, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=MAX_BISECTION,
                     full_output=True, disp=False)
    iters += info.function_calls
    return r, iters, abs(h(r))


def polar_prox(g: GaugeOracle, alpha: float, x, *, zero_tol: float = ZERO_TOL) -> PolarProxResult:
    """Polar proximal point of ``x`` for the gauge ``g`` and parameter ``alpha``."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    x = np.array(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("polar_prox needs a finite point")
    k = rescale_gauge(g, alpha)
    kx = k.eval(x)
    if kx <= zero_tol:
        return PolarProxResult(x, 0.0, 0.0, CaseTag.AlreadyZero)

    u_dom = k.domain_project(x)
    obj_dom = _objective(k, x, u_dom)

    r, iters, resid = _balance_radius(k, x, kx)
    if r is None:
        if not math.isfinite(obj_dom):
            raise BisectionFailure(
                f"radius gap stayed nonnegative up to r={2.0 ** MAX_GROWTH:g} at x={x.tolist()}"
            )
        obj_lev, u_lev = math.inf, None
    else:
        u_lev = k.sublevel_project(r, x)
        obj_lev = _objective(k, x, u_lev)

    slack = 1e-12 * (1.0 + min(obj_lev, obj_dom))
    if obj_dom < obj_lev - slack:
        use_dom = True
    elif obj_lev < obj_dom - slack:
        use_dom = False
    else:
        # tie: the domain projection is the minimizer when its gauge value
        # does not exceed its distance
        use_dom = k.eval(u_dom) <= float(np.linalg.norm(x - u_dom)) + slack
    if use_dom:
        return PolarProxResult(u_dom, obj_dom / alpha, k.eval(u_dom) / alpha, CaseTag.DomainProjection,
                               iters, 0.0)
    return PolarProxResult(u_lev, obj_lev / alpha, r / alpha, CaseTag.LevelSetBalance, iters, resid)


def polar_envelope(g: GaugeOracle, alpha: float, x) -> float:
    return polar_prox(g, alpha, x).envelope_value
