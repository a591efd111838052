"""Lifted-space points and projections onto the convex sets used by the solver.

Points of the lifted space X x R are stored as flat float arrays whose last
entry is the height.  Every projection in this module takes and returns such
arrays; :class:`LiftedPoint` is a validated constructor for them.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "NonConvergence",
    "InfeasibleLevel",
    "ProjectionSettings",
    "CLOSED_FORM",
    "ITERATIVE",
    "LiftedPoint",
    "lift",
    "as_vector",
    "project_S",
    "project_box",
    "project_halfspace",
    "project_ball",
    "project_polyhedron",
    "project_intersection_dykstra",
    "project_sublevel_subgrad",
    "ConvexFunction",
    "ConvexSetOracle",
    "WholeSpace",
    "Box",
    "Halfspace",
    "Ball",
    "Polyhedron",
    "ParabolaRegion",
    "HeightSlice",
    "Intersection",
    "ScaledSet",
    "CallableSet",
]


class NonConvergence(RuntimeError):
    """An inner iterative projection ran out of iterations."""


class InfeasibleLevel(ValueError):
    """The set to project onto was detected to be empty."""


@dataclass(frozen=True)
class ProjectionSettings:
    tolerance: float = 1e-10
    max_inner_iterations: int = 100_000

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if int(self.max_inner_iterations) < 1:
            raise ValueError("max_inner_iterations must be >= 1")


CLOSED_FORM = ProjectionSettings(1e-10, 100_000)
ITERATIVE = ProjectionSettings(1e-8, 100_000)


@dataclass(frozen=True, eq=False)
class LiftedPoint:
    """A point ``(base, height)`` of X x R."""

    base: np.ndarray
    height: float = 1.0

    def __post_init__(self):
        base = np.atleast_1d(np.asarray(self.base, dtype=float)).ravel()
        if base.size < 1:
            raise ValueError("base dimension must be at least 1")
        height = float(self.height)
        if not (np.all(np.isfinite(base)) and math.isfinite(height)):
            raise ValueError("lifted point coordinates must be finite")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "height", height)

    @property
    def dim(self) -> int:
        return self.base.size

    @property
    def vector(self) -> np.ndarray:
        return np.append(self.base, self.height)

    @classmethod
    def from_vector(cls, v) -> "LiftedPoint":
        v = np.asarray(v, dtype=float).ravel()
        return cls(v[:-1], v[-1])

    def __array__(self, dtype=None, copy=None):
        v = self.vector
        return v if dtype is None else v.astype(dtype)

    def __repr__(self):
        return f"LiftedPoint(base={self.base.tolist()}, height={self.height!r})"


def lift(base, height: float = 1.0) -> np.ndarray:
    """Return the flat vector of ``(base, height)``."""
    return np.append(np.atleast_1d(np.asarray(base, dtype=float)).ravel(), float(height))


def as_vector(p) -> np.ndarray:
    v = np.asarray(p, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise ValueError(f"expected a flat lifted vector of length >= 2, got shape {v.shape}")
    return v


# ---------------------------------------------------------------------------
# closed-form projections


def project_S(p) -> np.ndarray:
    """Projection onto the slice ``S = X x {1}``: ``(y, lam) -> (y, 1)``."""
    q = np.array(p, dtype=float)
    q[-1] = 1.0
    return q


def project_box(lower, upper, p) -> np.ndarray:
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if np.any(lower > upper):
        raise ValueError("box requires lower <= upper componentwise")
    return np.clip(np.asarray(p, dtype=float), lower, upper)


def project_halfspace(normal, offset: float, p) -> np.ndarray:
    """Projection onto ``{q : <normal, q> <= offset}``."""
    n = np.asarray(normal, dtype=float)
    nn = float(n @ n)
    if nn == 0.0:
        raise ValueError("halfspace normal must be nonzero")
    p = np.asarray(p, dtype=float)
    excess = float(n @ p) - offset
    if excess <= 0.0:
        return p.copy()
    return p - (excess / nn) * n


def _project_l1_ball(v: np.ndarray, radius: float) -> np.ndarray:
    if np.abs(v).sum() <= radius:
        return v.copy()
    if radius == 0.0:
        return np.zeros_like(v)
    # sort-and-threshold projection onto the simplex of |v|
    u = np.sort(np.abs(v))[::-1]
    css = np.cumsum(u)
    k = np.arange(1, u.size + 1)
    rho = np.nonzero(u * k > css - radius)[0][-1]
    theta = (css[rho] - radius) / (rho + 1.0)
    return np.sign(v) * np.maximum(np.abs(v) - theta, 0.0)


def project_ball(center, radius: float, norm_kind: str, p) -> np.ndarray:
    """Euclidean projection onto ``{q : ||q - center||_kind <= radius}``."""
    if radius < 0:
        raise ValueError(f"ball radius must be nonnegative, got {radius}")
    p = np.asarray(p, dtype=float)
    c = np.broadcast_to(np.asarray(center, dtype=float), p.shape)
    v = p - c
    if norm_kind == "l2":
        nv = float(np.linalg.norm(v))
        if nv <= radius:
            return p.copy()
        return c + (radius / nv) * v
    if norm_kind == "linf":
        return c + np.clip(v, -radius, radius)
    if norm_kind == "l1":
        return c + _project_l1_ball(v, radius)
    raise ValueError(f"unknown norm kind {norm_kind!r}")


def project_polyhedron(p, A, b, eps: float = 1e-13, max_iter: int = 10_000) -> np.ndarray:
    """Exact projection onto ``{q : A q <= b}``.

    Dual active-set method of Goldfarb and Idnani specialised to the identity
    Hessian; finite termination, intended for a handful of dimensions.
    """
    x = np.array(p, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if A.shape[0] == 0:
        return x
    norms = np.linalg.norm(A, axis=1)
    zero = norms == 0.0
    if np.any(b[zero] < 0):
        raise InfeasibleLevel("polyhedron has a violated zero row")
    A = A[~zero] / norms[~zero, None]
    b = b[~zero] / norms[~zero]

    active: list[int] = []
    u = np.zeros(0)
    for _ in range(max_iter):
        viol = A @ x - b
        q = int(np.argmax(viol))
        if viol[q] <= eps * (1.0 + abs(b[q])):
            return x
        nq = -A[q]
        uplus = np.append(u, 0.0)
        while True:
            if active:
                N = -A[active].T
                r = np.linalg.lstsq(N, nq, rcond=None)[0]
                z = nq - N @ r
            else:
                r = np.zeros(0)
                z = nq.copy()
            t1, drop = math.inf, -1
            for j, rj in enumerate(r):
                if rj > 1e-14:
                    tj = uplus[j] / rj
                    if tj < t1:
                        t1, drop = tj, j
            slack = float(nq @ x + b[q])
            zz = float(z @ nq)
            t2 = -slack / zz if zz > 1e-14 else math.inf
            t = min(t1, t2)
            if not math.isfinite(t):
                raise InfeasibleLevel("polyhedron is empty")
            if math.isfinite(t2):
                x = x + t * z
            uplus = uplus + t * np.append(-r, 1.0)
            if t == t2:
                active.append(q)
                u = uplus
                break
            del active[drop]
            uplus = np.delete(uplus, drop)
    raise NonConvergence("polyhedral projection did not terminate")


# ---------------------------------------------------------------------------
# set oracles


class ConvexSetOracle(abc.ABC):
    """A closed convex set known through membership and projection."""

    name: str = "set"

    @abc.abstractmethod
    def project(self, p) -> np.ndarray: ...

    @abc.abstractmethod
    def contains(self, p, tol: float = 1e-9) -> bool: ...

    def halfspaces(self, dim=None):
        """``(A, b)`` with the set equal to ``{A q <= b}``, or None."""
        return None

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class WholeSpace(ConvexSetOracle):
    name = "whole-space"

    def project(self, p):
        return np.array(p, dtype=float)

    def contains(self, p, tol=1e-9):
        return True

    def halfspaces(self, dim=None):
        return np.zeros((0, dim or 0)), np.zeros(0)


@dataclass(frozen=True, repr=False)
class Box(ConvexSetOracle):
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.shape != hi.shape:
            raise ValueError("box bounds must have equal shape")
        if np.any(lo > hi):
            raise ValueError("box requires lower <= upper componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def name(self):
        return f"box[{self.lower.tolist()}, {self.upper.tolist()}]"

    def project(self, p):
        return np.clip(np.asarray(p, dtype=float), self.lower, self.upper)

    def contains(self, p, tol=1e-9):
        p = np.asarray(p, dtype=float)
        return bool(np.all(p >= self.lower - tol) and np.all(p <= self.upper + tol))

    def halfspaces(self, dim=None):
        n = self.lower.size
        eye = np.eye(n)
        up = np.isfinite(self.upper)
        lo = np.isfinite(self.lower)
        A = np.vstack([eye[up], -eye[lo]])
        b = np.concatenate([self.upper[up], -self.lower[lo]])
        return A, b


@dataclass(frozen=True, repr=False)
class Halfspace(ConvexSetOracle):
    """``{q : <normal, q> <= offset}``."""

    normal: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        if not np.any(n):
            raise ValueError("halfspace normal must be nonzero")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def name(self):
        return f"halfspace({self.normal.tolist()} <= {self.offset})"

    def project(self, p):
        return project_halfspace(self.normal, self.offset, p)

    def contains(self, p, tol=1e-9):
        return float(self.normal @ np.asarray(p, dtype=float)) <= self.offset + tol

    def halfspaces(self, dim=None):
        return self.normal[None, :], np.array([self.offset])


@dataclass(frozen=True, repr=False)
class Ball(ConvexSetOracle):
    center: np.ndarray
    radius: float
    kind: str = "l2"

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("ball radius must be nonnegative")
        if self.kind not in ("l1", "l2", "linf"):
            raise ValueError(f"unknown norm kind {self.kind!r}")
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))

    @property
    def name(self):
        return f"{self.kind}-ball(center={self.center.tolist()}, r={self.radius})"

    def project(self, p):
        return project_ball(self.center, self.radius, self.kind, p)

    def contains(self, p, tol=1e-9):
        v = np.asarray(p, dtype=float) - self.center
        order = {"l1": 1, "l2": 2, "linf": np.inf}[self.kind]
        return float(np.linalg.norm(v, order)) <= self.radius + tol

    def halfspaces(self, dim=None):
        if self.kind != "linf":
            return None
        return Box(self.center - self.radius, self.center + self.radius).halfspaces()


@dataclass(frozen=True, repr=False)
class Polyhedron(ConvexSetOracle):
    A: np.ndarray
    b: np.ndarray
    label: str = "polyhedron"

    def __post_init__(self):
        object.__setattr__(self, "A", np.atleast_2d(np.asarray(self.A, dtype=float)))
        object.__setattr__(self, "b", np.atleast_1d(np.asarray(self.b, dtype=float)))

    @property
    def name(self):
        return self.label

    def project(self, p):
        return project_polyhedron(p, self.A, self.b)

    def contains(self, p, tol=1e-9):
        return bool(np.all(self.A @ np.asarray(p, dtype=float) <= self.b + tol))

    def halfspaces(self, dim=None):
        return self.A, self.b


@dataclass(frozen=True, repr=False)
class ParabolaRegion(ConvexSetOracle):
    """``{(y, lam) in R x R : y >= curvature * lam**2}``."""

    curvature: float = 1.0

    def __post_init__(self):
        if not self.curvature > 0:
            raise ValueError("curvature must be positive")

    @property
    def name(self):
        return f"parabola(y >= {self.curvature} lam^2)"

    def contains(self, p, tol=1e-9):
        y, lam = np.asarray(p, dtype=float)
        return y - self.curvature * lam * lam >= -tol

    def project(self, p):
        p = np.asarray(p, dtype=float)
        if p.size != 2:
            raise ValueError("parabola region lives in R x R")
        y, lam = p
        a = self.curvature
        if y >= a * lam * lam:
            return p.copy()
        # stationarity of (a t^2 - y)^2 + (t - lam)^2 in t
        roots = np.roots([2.0 * a * a, 0.0, 1.0 - 2.0 * a * y, -lam])
        ts = roots[np.abs(roots.imag) < 1e-9].real
        cands = np.stack([a * ts * ts, ts], axis=1)
        best = cands[np.argmin(np.sum((cands - p) ** 2, axis=1))]
        # one Newton polish on the cubic
        t = best[1]
        for _ in range(2):
            g = 2 * a * a * t**3 + (1 - 2 * a * y) * t - lam
            dg = 6 * a * a * t * t + (1 - 2 * a * y)
            if dg > 0:
                t -= g / dg
        return np.array([a * t * t, t])


@dataclass(frozen=True, repr=False)
class HeightSlice(ConvexSetOracle):
    """The horizontal hyperplane ``X x {level}``."""

    level: float = 1.0

    @property
    def name(self):
        return f"slice(height={self.level})"

    def project(self, p):
        q = np.array(p, dtype=float)
        q[-1] = self.level
        return q

    def contains(self, p, tol=1e-9):
        return abs(float(np.asarray(p, dtype=float)[-1]) - self.level) <= tol


@dataclass(frozen=True, repr=False)
class ScaledSet(ConvexSetOracle):
    """``scale * base_set`` for ``scale > 0``."""

    base_set: ConvexSetOracle
    scale: float

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    @property
    def name(self):
        return f"{self.scale}*{self.base_set.name}"

    def project(self, p):
        return self.scale * self.base_set.project(np.asarray(p, dtype=float) / self.scale)

    def contains(self, p, tol=1e-9):
        return self.base_set.contains(np.asarray(p, dtype=float) / self.scale, tol / self.scale)

    def halfspaces(self, dim=None):
        hs = self.base_set.halfspaces(dim)
        if hs is None:
            return None
        A, b = hs
        return A, self.scale * b


@dataclass(frozen=True, repr=False)
class CallableSet(ConvexSetOracle):
    """Adapter around a user supplied projection and membership test."""

    project_fn: Callable[[np.ndarray], np.ndarray]
    contains_fn: Callable[[np.ndarray, float], bool]
    label: str = "callable-set"

    @property
    def name(self):
        return self.label

    def project(self, p):
        return np.asarray(self.project_fn(np.asarray(p, dtype=float)), dtype=float)

    def contains(self, p, tol=1e-9):
        return bool(self.contains_fn(np.asarray(p, dtype=float), tol))


def _stack_halfspaces(sets: Sequence[ConvexSetOracle], dim=None):
    rows, rhs = [], []
    for s in sets:
        hs = s.halfspaces(dim)
        if hs is None:
            return None
        A, b = hs
        if A.size:
            rows.append(A)
            rhs.append(b)
    if not rows:
        return None
    return np.vstack(rows), np.concatenate(rhs)


@dataclass(frozen=True, repr=False)
class Intersection(ConvexSetOracle):
    """Intersection of convex sets.

    Polyhedral members are projected onto exactly; anything else goes through
    Dykstra's algorithm.
    """

    sets: tuple
    settings: ProjectionSettings = ITERATIVE
    exact_polyhedral: bool = True

    def __post_init__(self):
        if len(self.sets) == 0:
            raise ValueError("intersection of no sets")
        object.__setattr__(self, "sets", tuple(self.sets))

    @property
    def name(self):
        return " & ".join(s.name for s in self.sets)

    def project(self, p):
        if self.exact_polyhedral:
            hs = _stack_halfspaces(self.sets, np.size(p))
            if hs is not None:
                return project_polyhedron(p, *hs)
        return project_intersection_dykstra(self.sets, p, self.settings)

    def contains(self, p, tol=1e-9):
        return all(s.contains(p, tol) for s in self.sets)

    def halfspaces(self, dim=None):
        return _stack_halfspaces(self.sets, dim)


# ---------------------------------------------------------------------------
# iterative projections


def project_intersection_dykstra(
    sets: Sequence[ConvexSetOracle], p, settings: ProjectionSettings = ITERATIVE
) -> np.ndarray:
    """Dykstra's cyclic projection onto the intersection of ``sets``."""
    x = np.array(p, dtype=float)
    if len(sets) == 1:
        return sets[0].project(x)
    if all(s.contains(x, 0.0) for s in sets):
        return x
    tol = settings.tolerance
    incr = [np.zeros_like(x) for _ in sets]
    for _ in range(settings.max_inner_iterations):
        x_prev = x
        for i, s in enumerate(sets):
            y = x + incr[i]
            x = s.project(y)
            incr[i] = y - x
        if np.linalg.norm(x - x_prev) < tol and all(s.contains(x, tol) for s in sets):
            return x
    raise NonConvergence(
        f"Dykstra did not stabilise in {settings.max_inner_iterations} cycles "
        "(empty or degenerate intersection?)"
    )


@dataclass(frozen=True)
class ConvexFunction:
    """A convex function given by value and one subgradient per point."""

    value: Callable[[np.ndarray], float]
    subgradient: Callable[[np.ndarray], np.ndarray]

    def __call__(self, q):
        return self.value(q)


def project_sublevel_subgrad(
    g: ConvexFunction,
    r: float,
    p,
    settings: ProjectionSettings = ITERATIVE,
    *,
    anchor=None,
    cuts=None,
    homogeneous: bool = False,
) -> np.ndarray:
    """Projection of ``p`` onto ``{q : g(q) <= r}`` from subgradient cuts.

    Each iterate ``z`` is the exact projection of ``p`` onto the polyhedron of
    the cuts gathered so far, which contains the level set, so ``||p - z||``
    bounds the optimal distance from below.  Cuts are taken at the point where
    the segment from a feasible ``anchor`` to the iterate leaves the level set
    (radial rescaling when ``g`` is positively homogeneous and anchored at
    the origin); these boundary points are feasible.  For the best feasible
    point ``y`` found so far, strong convexity of the squared distance gives
    ``||y - x*||^2 <= ||p - y||^2 - ||p - z||^2``, and the loop stops once
    this certificate drops below ``tolerance**2``.

    Parameters
    ----------
    anchor : array_like, optional
        A point with ``g(anchor) < r``.  Needed when ``g`` can be infinite.
    cuts : (A, b), optional
        Halfspaces known to contain the level set (e.g. the closed domain).
    homogeneous : bool
        ``g`` is a gauge; boundary points are found by scaling toward 0.
    """
    p = np.array(p, dtype=float)
    tol = settings.tolerance
    if g(p) <= r:
        return p
    if cuts is not None:
        A0, b0 = cuts
        A = [np.asarray(a, dtype=float) for a in np.atleast_2d(A0)]
        b = [float(v) for v in np.atleast_1d(b0)]
    else:
        A, b = [], []
    anchor = None if anchor is None else np.asarray(anchor, dtype=float)
    best, best_d2 = None, math.inf
    z = p
    for _ in range(settings.max_inner_iterations):
        if A:
            try:
                z = project_polyhedron(p, np.array(A), np.array(b), eps=1e-15)
            except InfeasibleLevel as exc:
                raise InfeasibleLevel(f"level {r} of {g} is empty") from exc
        gz = g(z)
        if gz <= r:
            return z
        boundaries = []
        if homogeneous and r > 0 and math.isfinite(gz):
            radial = (r / gz) * z
            if g(radial) <= r:
                boundaries.append(radial)
        if anchor is not None:
            lo, hi = 0.0, 1.0
            d = z - anchor
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if g(anchor + mid * d) <= r:
                    lo = mid
                else:
                    hi = mid
            boundaries.append(anchor + lo * d)
        for y in boundaries:
            d2 = float(np.sum((p - y) ** 2))
            if d2 < best_d2:
                best, best_d2 = y, d2
        # ||p - y||^2 - ||p - z||^2 without cancellation
        if best is not None and float((best - z) @ ((best - p) + (z - p))) <= tol * tol:
            return best
        if not boundaries:
            if not math.isfinite(gz):
                raise InfeasibleLevel("iterate left the domain and no anchor was given")
            if gz <= r + tol:
                return z
            boundaries = [None]
        added = 0
        for y in boundaries:
            if y is None:
                s = np.asarray(g.subgradient(z), dtype=float)
                rhs = float(s @ z) + r - gz
            else:
                s = np.asarray(g.subgradient(y), dtype=float)
                rhs = float(s @ y) + r - g(y)
            if not np.any(s):
                continue
            if any(np.allclose(s, a, rtol=1e-14, atol=0.0) and abs(rhs - c) <= 1e-14 * (1 + abs(rhs))
                   for a, c in zip(A[-4:], b[-4:])):
                continue
            A.append(s)
            b.append(rhs)
            added += 1
        if not added:
            # every candidate cut is already present: no further progress possible
            if best is not None:
                return best
            if not np.any(s):
                raise InfeasibleLevel(f"zero subgradient outside level {r}: level set empty")
            raise NonConvergence("subgradient cuts stalled")
    raise NonConvergence(f"sublevel projection did not converge in {settings.max_inner_iterations} cuts")
