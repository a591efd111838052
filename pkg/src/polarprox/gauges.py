"""Closed gauges on the lifted space and the oracles the polar prox needs.

A gauge here is any object implementing :class:`GaugeOracle`: evaluation,
projection onto a sublevel set ``{kappa <= r}`` and projection onto the
closure of the domain.  Concrete gauges:

* :class:`NormGauge`        weighted l1 / l2 / linf norm (optionally of the base only)
* :class:`MinkowskiGauge`   gauge of a closed convex set containing the origin
* :class:`GaugePlusIndicator` ``g + indicator(C)``
* :class:`PerspectiveGauge` closed perspective of a convex function
* :class:`RescaledGauge`    ``alpha * g``
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq, linprog

from .geometry import (
    ITERATIVE,
    CallableSet,
    ConvexFunction,
    ConvexSetOracle,
    Halfspace,
    Intersection,
    NonConvergence,
    ParabolaRegion,
    Polyhedron,
    ProjectionSettings,
    ScaledSet,
    project_ball,
    project_polyhedron,
    project_sublevel_subgrad,
)

__all__ = [
    "MissingRecession",
    "UnboundedEvaluation",
    "GaugeOracle",
    "NormGauge",
    "MinkowskiGauge",
    "GaugePlusIndicator",
    "PerspectiveGauge",
    "RescaledGauge",
    "FundamentalSetDescriptor",
    "ConvexFunctionSpec",
    "make_norm_gauge",
    "make_minkowski_gauge",
    "make_gauge_plus_indicator",
    "make_perspective_gauge",
    "rescale_gauge",
    "fundamental_set",
    "parabola_descriptor",
    "abs_shift",
    "shifted_quadratic",
    "piecewise_linear",
    "constant",
    "dead_zone",
    "FUNCTION_FAMILIES",
]

_NORM_ORDER = {"l1": 1, "l2": 2, "linf": np.inf}


class MissingRecession(ValueError):
    """A perspective was queried at height 0 without a recession function."""


class UnboundedEvaluation(ArithmeticError):
    """Minkowski bracket growth passed the cap: the point is outside cl cone D."""


class GaugeOracle(abc.ABC):
    """Evaluation and projection contract of a closed gauge."""

    name: str = "gauge"

    @abc.abstractmethod
    def eval(self, p) -> float: ...

    def __call__(self, p) -> float:
        return self.eval(p)

    @abc.abstractmethod
    def sublevel_project(self, r: float, p) -> np.ndarray: ...

    def domain_project(self, p) -> np.ndarray:
        dom = self.domain_set()
        return np.array(p, dtype=float) if dom is None else dom.project(p)

    def domain_set(self) -> Optional[ConvexSetOracle]:
        """cl dom as a set oracle, or None when the domain is everything."""
        return None

    def sublevel_set(self, r: float) -> ConvexSetOracle:
        if r < 0:
            raise ValueError("sublevel radius must be nonnegative")
        return CallableSet(
            lambda q: self.sublevel_project(r, q),
            lambda q, tol: self.eval(q) <= r + tol,
            f"lev<={r}({self.name})",
        )

    def subgradient(self, p) -> np.ndarray:
        raise NotImplementedError(f"{self.name} has no subgradient oracle")

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


# ---------------------------------------------------------------------------
# norms


class NormGauge(GaugeOracle):
    """``weight * ||p||_kind``; with ``base_only`` the height is ignored."""

    def __init__(self, kind: str = "linf", weight: float = 1.0, base_only: bool = False):
        if kind not in _NORM_ORDER:
            raise ValueError(f"unknown norm kind {kind!r}")
        if not weight > 0:
            raise ValueError(f"norm weight must be positive, got {weight}")
        self.kind = kind
        self.weight = float(weight)
        self.base_only = bool(base_only)
        part = "base " if base_only else ""
        self.name = f"{self.weight:g}*||{part}.||_{kind}"

    def eval(self, p):
        p = np.asarray(p, dtype=float)
        v = p[:-1] if self.base_only else p
        return self.weight * float(np.linalg.norm(v, _NORM_ORDER[self.kind]))

    def sublevel_project(self, r, p):
        if r < 0:
            raise ValueError("sublevel radius must be nonnegative")
        p = np.asarray(p, dtype=float)
        rad = r / self.weight
        if not self.base_only:
            return project_ball(np.zeros_like(p), rad, self.kind, p)
        q = p.copy()
        q[:-1] = project_ball(np.zeros(p.size - 1), rad, self.kind, p[:-1])
        return q

    def sublevel_set(self, r):
        if self.kind == "linf" and not self.base_only:
            return _LinfLevel(r / self.weight)
        return super().sublevel_set(r)

    def subgradient(self, p):
        p = np.asarray(p, dtype=float)
        v = p[:-1] if self.base_only else p
        if self.kind == "l2":
            n = np.linalg.norm(v)
            s = v / n if n > 0 else np.zeros_like(v)
        elif self.kind == "l1":
            s = np.sign(v)
        else:
            s = np.zeros_like(v)
            if np.any(v):
                i = int(np.argmax(np.abs(v)))
                s[i] = np.sign(v[i])
        s = self.weight * s
        return np.append(s, 0.0) if self.base_only else s


class _LinfLevel(ConvexSetOracle):
    """The box ``[-rad, rad]^n`` in any dimension."""

    def __init__(self, rad):
        self.rad = float(rad)
        self.name = f"linf-ball({self.rad})"

    def project(self, p):
        return np.clip(np.asarray(p, dtype=float), -self.rad, self.rad)

    def contains(self, p, tol=1e-9):
        return float(np.max(np.abs(np.asarray(p, dtype=float)))) <= self.rad + tol

    def halfspaces(self, dim=None):
        if dim is None:
            return None
        eye = np.eye(dim)
        return np.vstack([eye, -eye]), np.full(2 * dim, self.rad)


def make_norm_gauge(kind: str = "linf", weight: float = 1.0, *, base_only: bool = False) -> NormGauge:
    return NormGauge(kind, weight, base_only)


# ---------------------------------------------------------------------------
# Minkowski gauges


@dataclass(frozen=True)
class FundamentalSetDescriptor:
    """The unit sublevel set D of a gauge, with optional helpers.

    Attributes
    ----------
    set : ConvexSetOracle
        Closed convex D with 0 in D.
    scaling_hint : float, optional
        Known supremum height of D, if any (used only for reporting).
    bounded : bool
        Whether D is bounded.
    cone : ConvexSetOracle, optional
        Oracle for cl cone D.  Without it the cone projection is approximated
        by projecting onto growing dilates of D.
    zero_set : ConvexSetOracle, optional
        Oracle for the recession cone of D (the zero set of the gauge).
    dim : int, optional
        Dimension of the lifted space, when the set does not reveal it.
    """

    set: ConvexSetOracle
    scaling_hint: Optional[float] = None
    bounded: bool = False
    cone: Optional[ConvexSetOracle] = None
    zero_set: Optional[ConvexSetOracle] = None
    dim: Optional[int] = None

    def __post_init__(self):
        if not isinstance(self.set, ConvexSetOracle):
            raise TypeError("descriptor set must be a ConvexSetOracle")


def parabola_descriptor(curvature: float = 1.0) -> FundamentalSetDescriptor:
    """``D = {(y, lam) : y >= curvature * lam^2}`` with its cone and zero set."""
    cone = Halfspace(np.array([-1.0, 0.0]), 0.0)
    zeros = Polyhedron(np.array([[-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]), np.zeros(3), "ray y>=0, lam=0")
    return FundamentalSetDescriptor(ParabolaRegion(curvature), None, False, cone, zeros, 2)


class MinkowskiGauge(GaugeOracle):
    """``kappa(p) = inf {mu >= 0 : p in mu D}`` evaluated by membership bisection."""

    GROWTH_CAP = 1e30
    HALVINGS = 60

    def __init__(self, descriptor: FundamentalSetDescriptor, settings: ProjectionSettings = ITERATIVE):
        self.descriptor = descriptor
        self.settings = settings
        self.name = f"minkowski[{descriptor.set.name}]"

    def _inside(self, p, mu):
        return self.descriptor.set.contains(p / mu, 0.0)

    def eval_strict(self, p) -> float:
        """Like :meth:`eval` but raises :class:`UnboundedEvaluation` instead of returning inf."""
        p = np.asarray(p, dtype=float)
        if not np.any(p):
            return 0.0
        if self._inside(p, 1.0):
            hi = 1.0
            while self._inside(p, 0.5 * hi):
                hi *= 0.5
                if hi < 1.0 / self.GROWTH_CAP:
                    return 0.0
            lo = 0.5 * hi
        else:
            lo = 1.0
            while not self._inside(p, 2.0 * lo):
                lo *= 2.0
                if lo > self.GROWTH_CAP:
                    raise UnboundedEvaluation(f"{p} is outside cl cone D")
            hi = 2.0 * lo
        for _ in range(self.HALVINGS):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if self._inside(p, mid):
                hi = mid
            else:
                lo = mid
        return hi

    def eval(self, p):
        try:
            return self.eval_strict(p)
        except UnboundedEvaluation:
            return math.inf

    def _zero_project(self, p):
        if self.descriptor.zero_set is not None:
            return self.descriptor.zero_set.project(p)
        # the zero set is the limit of r*D as r -> 0
        r = 1e-12
        return r * self.descriptor.set.project(np.asarray(p, dtype=float) / r)

    def sublevel_project(self, r, p):
        if r < 0:
            raise ValueError("sublevel radius must be nonnegative")
        p = np.asarray(p, dtype=float)
        if r == 0:
            return self._zero_project(p)
        return r * self.descriptor.set.project(p / r)

    def sublevel_set(self, r):
        if r > 0:
            return ScaledSet(self.descriptor.set, r)
        return super().sublevel_set(r)

    def domain_set(self):
        return self.descriptor.cone

    def domain_project(self, p):
        p = np.asarray(p, dtype=float)
        if self.descriptor.cone is not None:
            return self.descriptor.cone.project(p)
        if math.isfinite(self.eval(p)):
            return p.copy()
        tol = self.settings.tolerance
        R = 1.0
        q = R * self.descriptor.set.project(p / R)
        for _ in range(200):
            R *= 2.0
            q_new = R * self.descriptor.set.project(p / R)
            if np.linalg.norm(q_new - q) <= tol * (1.0 + np.linalg.norm(q_new)):
                return q_new
            q = q_new
        raise NonConvergence("cone projection by dilation did not stabilise")


def make_minkowski_gauge(
    D: FundamentalSetDescriptor, settings: ProjectionSettings = ITERATIVE
) -> MinkowskiGauge:
    if not D.set.contains(np.zeros(_probe_dim(D.set)), 1e-12):
        raise ValueError("fundamental set must contain the origin")
    return MinkowskiGauge(D, settings)


def _probe_dim(s: ConvexSetOracle) -> int:
    if getattr(s, "dim", None):
        return int(s.dim)
    for attr in ("lower", "center", "normal"):
        v = getattr(s, attr, None)
        if v is not None and np.ndim(v) == 1 and np.size(v) > 0:
            return int(np.size(v))
    A = getattr(s, "A", None)
    if A is not None:
        return int(np.shape(A)[1])
    if isinstance(s, ScaledSet):
        return _probe_dim(s.base_set)
    if isinstance(s, Intersection):
        return _probe_dim(s.sets[0])
    return 2


# ---------------------------------------------------------------------------
# gauge + indicator


class GaugePlusIndicator(GaugeOracle):
    """``g + indicator(C)`` for a closed convex C containing the origin."""

    def __init__(self, g: GaugeOracle, C: ConvexSetOracle, settings: ProjectionSettings = ITERATIVE,
                 membership_tol: float = 1e-9):
        self.g = g
        self.C = C
        self.settings = settings
        self.membership_tol = membership_tol
        self.name = f"{g.name} + i[{C.name}]"

    def eval(self, p):
        if not self.C.contains(p, self.membership_tol):
            return math.inf
        return self.g.eval(p)

    def sublevel_set(self, r):
        return Intersection((self.g.sublevel_set(r), self.C), self.settings)

    def sublevel_project(self, r, p):
        if r < 0:
            raise ValueError("sublevel radius must be nonnegative")
        p = np.asarray(p, dtype=float)
        if self.eval(p) <= r:
            return p.copy()
        return self.sublevel_set(r).project(p)

    def domain_set(self):
        inner = self.g.domain_set()
        if inner is None:
            return self.C
        return Intersection((inner, self.C), self.settings)


def make_gauge_plus_indicator(
    g: GaugeOracle, C: ConvexSetOracle, settings: ProjectionSettings = ITERATIVE
) -> GaugePlusIndicator:
    return GaugePlusIndicator(g, C, settings)


# ---------------------------------------------------------------------------
# convex functions and their perspectives


@dataclass(frozen=True)
class ConvexFunctionSpec:
    """A convex function on X together with the data its perspective needs.

    ``perspective_projector(r, p)``, when present, is an exact projection onto
    ``{f^pi <= r}`` used instead of the generic cutting-plane fallback.
    ``perspective_level(r)`` may return a set oracle for the same set.
    """

    eval: Callable[[np.ndarray], float]
    subgradient: Callable[[np.ndarray], np.ndarray]
    dim: int = 1
    recession_eval: Optional[Callable[[np.ndarray], float]] = None
    known_min: Optional[tuple] = None
    name: str = "f"
    perspective_projector: Optional[Callable[[float, np.ndarray], np.ndarray]] = None
    perspective_level: Optional[Callable[[float], ConvexSetOracle]] = None
    params: dict = field(default_factory=dict)

    def __call__(self, x):
        return self.eval(np.atleast_1d(np.asarray(x, dtype=float)))

    @property
    def min_value(self) -> Optional[float]:
        return None if self.known_min is None else float(self.known_min[0])

    @property
    def minimizer(self) -> Optional[np.ndarray]:
        return None if self.known_min is None else np.atleast_1d(np.asarray(self.known_min[1], float))


def _polyhedral_level(A_lift: np.ndarray, r: float) -> Polyhedron:
    """``{q : A_lift q <= r, height >= 0}``."""
    n = A_lift.shape[1]
    floor = np.zeros(n)
    floor[-1] = -1.0
    A = np.vstack([A_lift, floor])
    b = np.append(np.full(A_lift.shape[0], float(r)), 0.0)
    return Polyhedron(A, b, f"polyhedral level {r}")


def piecewise_linear(slopes, intercepts, name: str = None, known_min=None) -> ConvexFunctionSpec:
    """``f(x) = max_i <a_i, x> + b_i`` (must be bounded below by 0).

    Its perspective is ``max_i <a_i, x> + b_i lam`` on ``lam >= 0``, so every
    sublevel set is a polyhedron and is projected onto exactly.
    """
    a = np.atleast_2d(np.asarray(slopes, dtype=float))
    if a.shape[0] == 1 and np.ndim(slopes) == 1:
        a = a.T  # one-dimensional X: a list of scalar slopes
    b = np.asarray(intercepts, dtype=float).ravel()
    if a.shape[0] != b.size:
        raise ValueError("need one intercept per slope")
    dim = a.shape[1]
    A_lift = np.hstack([a, b[:, None]])

    def f(x):
        return float(np.max(a @ np.atleast_1d(x) + b))

    def sub(x):
        i = int(np.argmax(a @ np.atleast_1d(x) + b))
        return a[i].copy()

    def rec(x):
        return float(np.max(a @ np.atleast_1d(x)))

    if known_min is None:
        # min t  s.t.  a_i x + b_i <= t
        c = np.zeros(dim + 1)
        c[-1] = 1.0
        res = linprog(c, A_ub=np.hstack([a, -np.ones((a.shape[0], 1))]), b_ub=-b,
                      bounds=[(None, None)] * (dim + 1), method="highs")
        if res.status != 0:
            raise ValueError("piecewise-linear function is unbounded below")
        known_min = (float(res.x[-1]), res.x[:-1])
    if known_min[0] < -1e-12:
        raise ValueError("perspective gauges need f >= 0")

    return ConvexFunctionSpec(
        f, sub, dim, rec, known_min, name or f"max of {b.size} affine pieces",
        perspective_projector=lambda r, p: project_polyhedron(p, *_polyhedral_level(A_lift, r).halfspaces()),
        perspective_level=lambda r: _polyhedral_level(A_lift, r),
        params={"slopes": a.tolist(), "intercepts": b.tolist()},
    )


def abs_shift(shift: float = 1.0, offset: float = 1.0, weight: float = 1.0) -> ConvexFunctionSpec:
    """``f(x) = weight*|x - shift| + offset`` on the real line."""
    if weight <= 0 or offset < 0:
        raise ValueError("abs_shift needs weight > 0 and offset >= 0")
    spec = piecewise_linear(
        [weight, -weight], [offset - weight * shift, offset + weight * shift],
        name=f"{weight:g}|x-{shift:g}|+{offset:g}", known_min=(offset, np.array([shift])),
    )
    return _with_params(spec, shift=shift, offset=offset, weight=weight)


def dead_zone(width: float = 1.0, offset: float = 1.0) -> ConvexFunctionSpec:
    """``f(x) = max(|x| - width, 0) + offset``; every point of [-width, width] is a minimizer."""
    if width < 0 or offset < 0:
        raise ValueError("dead_zone needs width >= 0 and offset >= 0")
    spec = piecewise_linear(
        [1.0, -1.0, 0.0], [offset - width, offset - width, offset],
        name=f"max(|x|-{width:g},0)+{offset:g}", known_min=(offset, np.array([0.0])),
    )
    return _with_params(spec, width=width, offset=offset)


def constant(value: float = 1.0, dim: int = 1) -> ConvexFunctionSpec:
    if value < 0:
        raise ValueError("constant must be nonnegative")
    spec = piecewise_linear(np.zeros((1, dim)), [value], name=f"const {value:g}",
                            known_min=(value, np.zeros(dim)))
    return _with_params(spec, value=value, dim=dim)


def _with_params(spec: ConvexFunctionSpec, **params) -> ConvexFunctionSpec:
    return ConvexFunctionSpec(**{**spec.__dict__, "params": dict(params)})


class _EllipsoidLevel(ConvexSetOracle):
    """``{q : q^T M q - r * q_height <= 0}`` for symmetric PSD M."""

    def __init__(self, M, r, w, V):
        self.M = M
        self.r = float(r)
        self.w = w
        self.V = V
        self.dim = M.shape[0]
        self.name = f"ellipsoid level {r}"

    def value(self, q):
        return float(q @ self.M @ q) - self.r * q[-1]

    def contains(self, p, tol=1e-9):
        p = np.asarray(p, dtype=float)
        if p[-1] < -tol:
            return False
        return self.value(p) <= tol

    def project(self, p):
        p = np.asarray(p, dtype=float)
        r, w, V = self.r, self.w, self.V
        if self.value(p) <= 0.0 and p[-1] >= 0.0:
            return p.copy()
        if r == 0.0:
            null = np.abs(w) <= 1e-12 * max(1.0, float(np.max(np.abs(w))))
            if not np.any(null):
                return np.zeros_like(p)
            n = V[:, null][:, 0]
            if n[-1] < 0:
                n = -n
            return max(0.0, float(n @ p)) * n
        pt = V.T @ p
        et = V[-1, :].copy()  # V^T e_height

        def z(mu):
            return (pt + mu * r * et) / (1.0 + 2.0 * mu * w)

        def phi(mu):
            zz = z(mu)
            return float(np.sum(w * zz * zz) - r * np.sum(et * zz))

        if phi(0.0) <= 0.0:
            # inside up to rounding of the eigen-coordinates
            return p.copy()
        hi = 1.0
        while phi(hi) > 0.0:
            hi *= 2.0
            if hi > 1e300:
                raise NonConvergence("ellipsoid multiplier bracket failed")
        mu = brentq(phi, 0.0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
        return V @ z(mu)


def shifted_quadratic(center, beta: float) -> ConvexFunctionSpec:
    """``f(x) = ||x - center||^2 + beta``.

    The perspective ``||x - lam c||^2 / lam + beta lam`` has ellipsoidal
    sublevel sets ``{q : q^T M q <= r lam}``; projections onto them reduce to
    a monotone scalar equation in the multiplier.
    """
    c = np.atleast_1d(np.asarray(center, dtype=float))
    if beta < 0:
        raise ValueError("shifted_quadratic needs beta >= 0")
    d = c.size
    M = np.zeros((d + 1, d + 1))
    M[:d, :d] = np.eye(d)
    M[:d, d] = -c
    M[d, :d] = -c
    M[d, d] = float(c @ c) + beta
    w, V = np.linalg.eigh(M)
    w = np.maximum(w, 0.0)

    def f(x):
        x = np.atleast_1d(x)
        return float((x - c) @ (x - c)) + beta

    def sub(x):
        return 2.0 * (np.atleast_1d(x) - c)

    def rec(x):
        return 0.0 if not np.any(np.atleast_1d(x)) else math.inf

    def level(r):
        return _EllipsoidLevel(M, r, w, V)

    return ConvexFunctionSpec(
        f, sub, d, rec, (float(beta), c.copy()), f"||x-{c.tolist()}||^2+{beta:g}",
        perspective_projector=lambda r, p: level(r).project(p),
        perspective_level=level,
        params={"center": c.tolist(), "beta": float(beta)},
    )


FUNCTION_FAMILIES = {
    "abs_shift": abs_shift,
    "shifted_quadratic": shifted_quadratic,
    "piecewise_linear": piecewise_linear,
    "constant": constant,
    "dead_zone": dead_zone,
}


class PerspectiveGauge(GaugeOracle):
    """Closed perspective ``f^pi(x, lam)`` of a nonnegative convex ``f``."""

    def __init__(self, f: ConvexFunctionSpec, settings: ProjectionSettings = ITERATIVE):
        self.f = f
        self.settings = settings
        self.name = f"persp[{f.name}]"
        self._domain = Halfspace(np.append(np.zeros(f.dim), -1.0), 0.0)

    def eval(self, p):
        p = np.asarray(p, dtype=float)
        x, lam = p[:-1], float(p[-1])
        if lam > 0:
            with np.errstate(over="ignore"):
                u = x / lam
            if np.all(np.isfinite(u)) or self.f.recession_eval is None:
                return lam * float(self.f.eval(u))
            # lam is below |x| / 1e308: lam * f(x / lam) equals its limit f_inf(x)
            # to within rounding
            return float(self.f.recession_eval(x))
        if lam < 0:
            return math.inf
        if self.f.recession_eval is None:
            raise MissingRecession(f"{self.f.name} has no recession function")
        return float(self.f.recession_eval(x))

    def subgradient(self, p):
        p = np.asarray(p, dtype=float)
        x, lam = p[:-1], float(p[-1])
        if lam <= 0:
            # limit of subgradients from inside the domain
            lam = 1e-12 * max(1.0, float(np.linalg.norm(x)))
        u = x / lam
        g = np.atleast_1d(np.asarray(self.f.subgradient(u), dtype=float))
        return np.append(g, float(self.f.eval(u)) - float(g @ u))

    def domain_set(self):
        return self._domain

    def sublevel_set(self, r):
        if r < 0:
            raise ValueError("sublevel radius must be nonnegative")
        if self.f.perspective_level is not None:
            return self.f.perspective_level(r)
        return super().sublevel_set(r)

    def sublevel_project(self, r, p):
        if r < 0:
            raise ValueError("sublevel radius must be nonnegative")
        p = np.asarray(p, dtype=float)
        if self.f.perspective_projector is not None:
            q = np.array(self.f.perspective_projector(r, p), dtype=float)
            # structured projectors may leave the height a rounding error below 0
            q[-1] = max(q[-1], 0.0)
            return q
        anchor = None
        if self.f.known_min is not None and r > 0:
            fmin, xmin = self.f.min_value, self.f.minimizer
            lam = r / (2.0 * fmin) if fmin > 0 else 1.0
            anchor = np.append(lam * xmin, lam)
        A0 = self._domain.normal[None, :]
        return project_sublevel_subgrad(
            ConvexFunction(self.eval, self.subgradient), r, p, self.settings,
            anchor=anchor, cuts=(A0, np.zeros(1)), homogeneous=True,
        )


def make_perspective_gauge(f: ConvexFunctionSpec, settings: ProjectionSettings = ITERATIVE) -> PerspectiveGauge:
    return PerspectiveGauge(f, settings)


# ---------------------------------------------------------------------------
# rescaling


class RescaledGauge(GaugeOracle):
    """``alpha * g``."""

    def __init__(self, g: GaugeOracle, alpha: float):
        if not alpha > 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        self.g = g
        self.alpha = float(alpha)
        self.name = f"{self.alpha:g}*({g.name})"

    def eval(self, p):
        return self.alpha * self.g.eval(p)

    def sublevel_project(self, r, p):
        return self.g.sublevel_project(r / self.alpha, p)

    def sublevel_set(self, r):
        return self.g.sublevel_set(r / self.alpha)

    def domain_set(self):
        return self.g.domain_set()

    def domain_project(self, p):
        return self.g.domain_project(p)

    def subgradient(self, p):
        return self.alpha * self.g.subgradient(p)


def rescale_gauge(g: GaugeOracle, alpha: float) -> GaugeOracle:
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if alpha == 1.0:
        return g
    return RescaledGauge(g, alpha)


def fundamental_set(g: GaugeOracle, dim: Optional[int] = None) -> FundamentalSetDescriptor:
    """Descriptor of ``D = {g <= 1}`` built from the gauge's own oracles."""
    if isinstance(g, MinkowskiGauge):
        return g.descriptor
    if dim is None and isinstance(g, PerspectiveGauge):
        dim = g.f.dim + 1
    return FundamentalSetDescriptor(g.sublevel_set(1.0), None, False, g.domain_set(), None, dim)
