import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from polarprox.geometry import (
    Ball,
    Box,
    ConvexFunction,
    Halfspace,
    HeightSlice,
    InfeasibleLevel,
    Intersection,
    LiftedPoint,
    NonConvergence,
    ParabolaRegion,
    Polyhedron,
    ProjectionSettings,
    ScaledSet,
    lift,
    project_ball,
    project_box,
    project_halfspace,
    project_intersection_dykstra,
    project_polyhedron,
    project_S,
    project_sublevel_subgrad,
)

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)
vec2 = arrays(np.float64, 2, elements=finite)
vec3 = arrays(np.float64, 3, elements=finite)


# --- points and the slice ---------------------------------------------------


def test_lifted_point_roundtrip():
    p = LiftedPoint([1.0, 2.0], 0.5)
    assert p.dim == 2
    assert np.array_equal(p.vector, [1.0, 2.0, 0.5])
    q = LiftedPoint.from_vector(p.vector)
    assert np.array_equal(q.base, p.base) and q.height == p.height
    assert np.array_equal(np.asarray(p), p.vector)


def test_lifted_point_rejects_nonfinite():
    with pytest.raises(ValueError):
        LiftedPoint([np.nan], 1.0)
    with pytest.raises(ValueError):
        LiftedPoint([0.0], np.inf)


def test_lift_appends_height():
    assert np.array_equal(lift([3.0]), [3.0, 1.0])
    assert np.array_equal(lift(2.0, 0.0), [2.0, 0.0])


@pytest.mark.parametrize("p, expected", [([3.0, 0.2], [3.0, 1.0]), ([0.0, 1.0], [0.0, 1.0])])
def test_project_S_examples(p, expected):
    assert np.array_equal(project_S(p), expected)


@given(vec3, vec3)
def test_project_S_pythagorean(u, w):
    v = project_S(w)  # any point of S
    Pu = project_S(u)
    lhs = np.sum((u - v) ** 2)
    rhs = np.sum((Pu - v) ** 2) + np.sum((u - Pu) ** 2)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, lhs)
    assert np.array_equal(project_S(Pu), Pu)
    assert np.linalg.norm(project_S(u) - project_S(w)) <= np.linalg.norm(u - w) + 1e-12


# --- closed-form sets --------------------------------------------------------


def test_project_box_examples():
    assert np.array_equal(project_box([-1, -1], [1, 1], [2.0, 0.0]), [1.0, 0.0])
    assert np.array_equal(project_box([-1, -1], [1, 1], [0.3, -0.2]), [0.3, -0.2])
    assert np.allclose(project_box([-0.05, -0.05], [0.05, 0.05], [1.0, -0.05]), [0.05, -0.05])
    with pytest.raises(ValueError):
        project_box([1.0, 0.0], [0.0, 1.0], [0.0, 0.0])


def test_project_halfspace_examples():
    assert np.array_equal(project_halfspace([1.0, 0.0], 0.0, [1.0, 0.0]), [0.0, 0.0])
    assert np.array_equal(project_halfspace([1.0, 0.0], 0.0, [-1.0, 3.0]), [-1.0, 3.0])
    assert np.allclose(project_halfspace([1.0, 0.25], 0.0, [2.0, 1.0]), [-2 / 17, 8 / 17], atol=1e-15)
    with pytest.raises(ValueError):
        project_halfspace([0.0, 0.0], 1.0, [1.0, 1.0])


def test_project_ball_examples():
    assert np.allclose(project_ball([0, 0], 1.0, "l2", [2.0, 0.0]), [1.0, 0.0])
    assert np.array_equal(project_ball([0, 0], 1.0, "l2", [0.1, 0.2]), [0.1, 0.2])
    assert np.allclose(project_ball([0, 0], 1.0, "l1", [1.0, 1.0]), [0.5, 0.5])
    assert np.allclose(project_ball([0, 0], 1.0, "linf", [3.0, -0.5]), [1.0, -0.5])
    with pytest.raises(ValueError):
        project_ball([0, 0], -1.0, "l2", [0.0, 0.0])
    with pytest.raises(ValueError):
        project_ball([0, 0], 1.0, "l3", [0.0, 0.0])


@given(arrays(np.float64, 4, elements=st.floats(-5, 5)), st.floats(0.1, 5))
def test_l1_projection_matches_threshold_scan(v, radius):
    got = project_ball(np.zeros(4), radius, "l1", v)
    ref = oracles.simplex_threshold_l1(v, radius)
    assert np.max(np.abs(got - ref)) <= 1e-9
    assert np.abs(got).sum() <= radius + 1e-9


def test_polyhedron_matches_cvxpy():
    cp = pytest.importorskip("cvxpy")
    rng = np.random.default_rng(3)
    for _ in range(20):
        A = rng.normal(size=(6, 3))
        b = rng.uniform(0.1, 1.0, size=6)  # origin strictly feasible
        p = rng.normal(scale=4, size=3)
        x = cp.Variable(3)
        cp.Problem(cp.Minimize(cp.sum_squares(x - p)), [A @ x <= b]).solve()
        got = project_polyhedron(p, A, b)
        assert np.allclose(got, x.value, atol=1e-5)
        assert np.all(A @ got <= b + 1e-10)


def test_polyhedron_empty_is_reported():
    A = np.array([[1.0, 0.0], [-1.0, 0.0]])
    b = np.array([-1.0, -1.0])  # x <= -1 and x >= 1
    with pytest.raises(InfeasibleLevel):
        project_polyhedron([0.0, 0.0], A, b)


def test_parabola_region_projection_matches_grid():
    D = ParabolaRegion()
    p = np.array([-1.0, 2.0])
    ref = oracles.grid_projection_zoom_2d(lambda y, lam: y >= lam ** 2, p, [1.0, 1.0], 3.0)
    got = D.project(p)
    # on a curved boundary the grid argmin is only accurate to ~sqrt(spacing)
    assert np.allclose(got, ref, atol=1e-2)
    assert np.linalg.norm(got - p) <= np.linalg.norm(ref - p) + 1e-12
    assert D.contains(got, 1e-14)


# --- intersections ----------------------------------------------------------


def test_dykstra_examples():
    box = Box([-1.0, -1.0], [1.0, 1.0])
    half = Halfspace([1.0, 1.0], 0.0)
    p = np.array([1.0, 1.0])
    assert np.array_equal(project_intersection_dykstra([box], p), box.project(p))
    inside = np.array([-0.5, 0.2])
    assert np.array_equal(project_intersection_dykstra([box, half], inside), inside)
    ref = oracles.grid_projection_zoom_2d(lambda a, b: (np.abs(a) <= 1) & (np.abs(b) <= 1) & (a + b <= 0),
                                          p, [0.0, 0.0], 1.5, n=801, levels=8)
    got = project_intersection_dykstra([box, half], p, ProjectionSettings(1e-12, 100_000))
    assert np.allclose(got, ref, atol=1e-6)
    assert np.allclose(got, [0.0, 0.0], atol=1e-9)


def test_dykstra_nonconvergence_on_empty_intersection():
    a = Ball(np.array([0.0, 0.0]), 1.0)
    b = Ball(np.array([5.0, 0.0]), 1.0)
    with pytest.raises(NonConvergence):
        project_intersection_dykstra([a, b], [2.5, 1.0], ProjectionSettings(1e-10, 200))


def test_intersection_uses_exact_path_for_polyhedra():
    box = Box([-1.0, -1.0], [1.0, 1.0])
    half = Halfspace([1.0, 1.0], 0.0)
    S = Intersection((box, half))
    assert S.halfspaces(2) is not None
    assert np.allclose(S.project([1.0, 1.0]), [0.0, 0.0], atol=1e-14)


def test_intersection_with_curved_member():
    S = Intersection((ParabolaRegion(), Halfspace([1.0, 0.0], 1.0)))
    p = np.array([3.0, 3.0])
    ref = oracles.grid_projection_zoom_2d(lambda y, lam: (y >= lam ** 2) & (y <= 1), p, [1.0, 1.0], 2.0)
    got = S.project(p)
    assert np.allclose(got, ref, atol=1e-2)
    assert np.linalg.norm(got - p) <= np.linalg.norm(ref - p) + 1e-9


# --- generic sublevel projection ---------------------------------------------


def _linf_fn():
    def sub(q):
        i = int(np.argmax(np.abs(q)))
        s = np.zeros_like(q)
        s[i] = np.sign(q[i])
        return s

    return ConvexFunction(lambda q: float(np.max(np.abs(q))), sub)


def test_subgrad_projection_examples():
    g = _linf_fn()
    assert np.allclose(project_sublevel_subgrad(g, 1.0, [2.0, 0.0], homogeneous=True), [1.0, 0.0], atol=1e-8)
    assert np.array_equal(project_sublevel_subgrad(g, 1.0, [0.2, 0.3]), [0.2, 0.3])


def test_subgrad_projection_parabola_gauge_vs_grid():
    # gauge of {y >= lam^2} is lam^2 / y on y > 0, gradient (-lam^2/y^2, 2 lam/y)
    def value(q):
        return float(oracles.parabola_minkowski(q[0], q[1]))

    def grad(q):
        y, lam = q
        return np.array([-lam * lam / (y * y), 2 * lam / y])

    fn = ConvexFunction(value, grad)
    p = np.array([-1.0, 2.0])
    # cut iterates leave the domain (y <= 0), so a strictly feasible anchor is given
    got = project_sublevel_subgrad(fn, 1.0, p, ProjectionSettings(1e-9, 100_000), anchor=np.array([0.5, 0.0]),
                                   cuts=(np.array([[-1.0, 0.0]]), np.zeros(1)))
    ref = oracles.grid_projection_zoom_2d(lambda y, lam: oracles.parabola_minkowski(y, lam) <= 1.0,
                                          p, [1.0, 1.0], 3.0)
    assert np.allclose(got, ref, atol=1e-2)
    assert np.linalg.norm(got - p) <= np.linalg.norm(ref - p) + 1e-8
    assert value(got) <= 1.0 + 1e-8
    # the level set {kappa <= 1} is the parabola region itself
    assert np.allclose(got, ParabolaRegion().project(p), atol=1e-3)


# --- oracle invariants ------------------------------------------------------

SETS = [
    Box([-1.0, -2.0], [1.0, 0.5]),
    Halfspace([1.0, 0.25], 0.0),
    Ball(np.array([0.5, 0.0]), 1.5, "l2"),
    Ball(np.array([0.0, 0.0]), 1.0, "l1"),
    Ball(np.array([0.0, 1.0]), 0.7, "linf"),
    Polyhedron(np.array([[1.0, 1.0], [-1.0, 2.0], [0.0, -1.0]]), np.array([1.0, 2.0, 1.0])),
    ParabolaRegion(2.0),
    HeightSlice(1.0),
    ScaledSet(Box([-1.0, -1.0], [1.0, 1.0]), 3.0),
    Intersection((Box([-1.0, -1.0], [1.0, 1.0]), Halfspace([1.0, 1.0], 0.0))),
]


@pytest.mark.parametrize("S", SETS, ids=lambda s: s.name)
@given(p=vec2, w=vec2)
def test_projection_is_firmly_nonexpansive(S, p, w):
    Pp = S.project(p)
    q = S.project(w)
    assert S.contains(Pp, 1e-7)
    assert float((q - Pp) @ (p - Pp)) <= 1e-8 * max(1.0, np.linalg.norm(p) ** 2)
    assert np.linalg.norm(S.project(Pp) - Pp) <= 2e-10 * max(1.0, np.linalg.norm(p))
    if S.contains(p, 0.0):
        assert np.allclose(Pp, p)


def test_settings_validation():
    with pytest.raises(ValueError):
        ProjectionSettings(0.0, 10)
    with pytest.raises(ValueError):
        ProjectionSettings(1e-8, 0)
