import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from polarprox import (
    FundamentalSetDescriptor,
    abs_shift,
    constant,
    dead_zone,
    fundamental_set,
    make_gauge_plus_indicator,
    make_minkowski_gauge,
    make_norm_gauge,
    make_perspective_gauge,
    parabola_descriptor,
    piecewise_linear,
    rescale_gauge,
    shifted_quadratic,
)
from polarprox.gauges import MissingRecession, UnboundedEvaluation
from polarprox.geometry import Ball, Box, Halfspace, WholeSpace

coord = st.floats(-20, 20, allow_nan=False, allow_infinity=False)
vec2 = arrays(np.float64, 2, elements=coord)
vec3 = arrays(np.float64, 3, elements=coord)

CUTTER = make_gauge_plus_indicator(make_norm_gauge("linf", 4.0), Halfspace([1.0, 0.25], 0.0))
LINF_BALL = FundamentalSetDescriptor(Box([-1.0, -1.0], [1.0, 1.0]), bounded=True)


def gauges_2d():
    return {
        "linf": make_norm_gauge("linf", 1.0),
        "l1w3": make_norm_gauge("l1", 3.0),
        "l2": make_norm_gauge("l2", 0.5),
        "base-l1": make_norm_gauge("l1", 1.0, base_only=True),
        "minkowski-box": make_minkowski_gauge(LINF_BALL),
        "parabola": make_minkowski_gauge(parabola_descriptor()),
        "cutter": CUTTER,
        "persp-abs": make_perspective_gauge(abs_shift()),
        "persp-deadzone": make_perspective_gauge(dead_zone(1.0, 0.5)),
        "rescaled": rescale_gauge(make_norm_gauge("linf", 1.0), 4.0),
    }


GAUGES = gauges_2d()


# --- examples ---------------------------------------------------------------


def test_norm_gauge_examples():
    assert make_norm_gauge("linf", 1.0).eval([3.0, -4.0]) == 4.0
    assert make_norm_gauge("linf", 4.0).eval([1 / 5, -1 / 20]) == pytest.approx(4 / 5, abs=1e-15)
    for kind in ("l1", "l2", "linf"):
        assert make_norm_gauge(kind, 2.0).eval([0.0, 0.0]) == 0.0
    with pytest.raises(ValueError):
        make_norm_gauge("linf", 0.0)
    with pytest.raises(ValueError):
        make_norm_gauge("l7", 1.0)


def test_norm_gauge_sublevel_projection_is_ball_projection():
    g = make_norm_gauge("l2", 2.0)
    assert np.allclose(g.sublevel_project(1.0, [3.0, 4.0]), [0.3, 0.4])
    assert np.array_equal(g.domain_project([5.0, -7.0]), [5.0, -7.0])


def test_minkowski_examples():
    box = make_minkowski_gauge(LINF_BALL)
    assert box.eval([3.0, -4.0]) == pytest.approx(4.0, abs=1e-12)
    assert box.eval([0.0, 0.0]) == 0.0
    par = make_minkowski_gauge(parabola_descriptor())
    assert par.eval([1.0, 1.0]) == pytest.approx(1.0, abs=1e-12)
    assert par.eval([0.0, 0.0]) == 0.0
    # outside the closed cone {y >= 0} and on its boundary off the ray
    assert math.isinf(par.eval([-1.0, 0.5]))
    with pytest.raises(UnboundedEvaluation):
        par.eval_strict([-1.0, 0.5])


def test_minkowski_rejects_set_without_origin():
    with pytest.raises(ValueError):
        make_minkowski_gauge(FundamentalSetDescriptor(Ball(np.array([5.0, 0.0]), 1.0), bounded=True))


def test_gauge_plus_indicator_examples():
    g = make_norm_gauge("l2", 1.0)
    free = make_gauge_plus_indicator(g, WholeSpace())
    for p in ([1.0, 2.0], [-3.0, 0.5]):
        assert free.eval(p) == g.eval(p)
        assert np.allclose(free.sublevel_project(1.0, p), g.sublevel_project(1.0, p))
    # (base, height) = (2, 1): 2 + 1/4 > 0, outside C
    assert math.isinf(CUTTER.eval([2.0, 1.0]))
    assert CUTTER.eval([0.0, 0.0]) == 0.0
    assert CUTTER.eval([-1 / 20, 1 / 5]) == pytest.approx(4 / 5, abs=1e-15)
    assert np.allclose(CUTTER.domain_project([2.0, 1.0]), [-2 / 17, 8 / 17], atol=1e-14)


def test_perspective_examples():
    g = make_perspective_gauge(abs_shift())
    assert g.eval([1.0, 1.0]) == 1.0
    assert g.eval([2.0, 2.0]) == 2.0
    assert g.eval([3.0, 0.0]) == 3.0
    assert g.eval([3.0, 1e-8]) == pytest.approx(3.0, abs=1e-7)
    assert math.isinf(g.eval([3.0, -0.1]))
    assert np.allclose(g.domain_project([1.0, -2.0]), [1.0, 0.0])


def test_perspective_matches_brute_force():
    g = make_perspective_gauge(abs_shift())
    rng = np.random.default_rng(1)
    for p in rng.uniform(-3, 3, size=(50, 2)):
        assert g.eval(p) == pytest.approx(float(oracles.abs_shift_perspective(p[0], p[1])), abs=1e-12)


def test_perspective_missing_recession():
    base = abs_shift()
    from polarprox.gauges import ConvexFunctionSpec

    f = ConvexFunctionSpec(base.eval, base.subgradient, 1, None, base.known_min, "no-rec")
    with pytest.raises(MissingRecession):
        make_perspective_gauge(f).eval([1.0, 0.0])


def _ellipsoid_kkt_residual(p, a, r):
    """Normal-cone residual of ``a`` as the projection of ``p`` onto {q^T M q <= r lam}."""
    c = np.array([1.0, -1.0])
    M = np.zeros((3, 3))
    M[:2, :2] = np.eye(2)
    M[:2, 2] = M[2, :2] = -c
    M[2, 2] = 4.0
    grad = 2 * M @ a - r * np.array([0.0, 0.0, 1.0])
    d = p - a
    mu = float(d @ grad) / float(grad @ grad)
    return abs(float(a @ M @ a) - r * a[2]), mu, np.linalg.norm(d - mu * grad)


def test_quadratic_perspective_level_matches_generic_fallback():
    from polarprox.gauges import ConvexFunctionSpec

    q = shifted_quadratic([1.0, -1.0], 2.0)
    generic = ConvexFunctionSpec(q.eval, q.subgradient, 2, q.recession_eval, q.known_min, "generic")
    fast, slow = make_perspective_gauge(q), make_perspective_gauge(generic)
    rng = np.random.default_rng(5)
    for _ in range(100):
        p = rng.uniform(-4, 4, size=3)
        r = rng.uniform(0.5, 4)
        a, b = fast.sublevel_project(r, p), slow.sublevel_project(r, p)
        # the structured projection is certified by its KKT conditions ...
        gap, mu, perp = _ellipsoid_kkt_residual(p, a, r)
        assert gap <= 1e-12 and mu >= 0 and perp <= 1e-12
        # ... and the cutting-plane fallback lands within 10 * tolerance of it
        assert np.linalg.norm(a - b) <= 1e-7
        assert slow.eval(b) <= r + 1e-12


def test_rescale_examples():
    g = make_norm_gauge("linf", 1.0)
    assert rescale_gauge(g, 1.0) is g
    assert rescale_gauge(g, 4.0).eval([1 / 5, -1 / 20]) == pytest.approx(4 / 5, abs=1e-15)
    assert rescale_gauge(g, 4.0).eval([0.0, 0.0]) == 0.0
    with pytest.raises(ValueError):
        rescale_gauge(g, 0.0)
    with pytest.raises(ValueError):
        rescale_gauge(g, -1.0)


def test_function_family_validation():
    with pytest.raises(ValueError):
        abs_shift(weight=0.0)
    with pytest.raises(ValueError):
        shifted_quadratic([0.0], -1.0)
    with pytest.raises(ValueError):
        constant(-1.0)
    with pytest.raises(ValueError):
        piecewise_linear([1.0], [-1.0])  # x - 1 is unbounded below


def test_piecewise_linear_minimum_found_by_lp():
    f = piecewise_linear([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]], [-1.0, 1.0, 2.0, 0.0])
    # max(x-1, 1-x, y+2, -y) has min 1 at y = -1
    assert f.min_value == pytest.approx(1.0, abs=1e-9)
    assert f(f.minimizer) == pytest.approx(1.0, abs=1e-9)


def test_fundamental_set_of_perspective_has_lifted_dimension():
    D = fundamental_set(make_perspective_gauge(shifted_quadratic([1.0, -1.0], 2.0)))
    assert D.dim == 3
    assert D.set.contains(np.zeros(3))


# --- properties ---------------------------------------------------------------


@pytest.mark.parametrize("name", list(GAUGES))
def test_gauge_at_origin(name):
    assert GAUGES[name].eval(np.zeros(2)) == 0.0


@pytest.mark.parametrize("name", list(GAUGES))
@given(p=vec2, t=st.sampled_from([0.5, 2.0, 10.0]))
def test_nonnegative_and_homogeneous(name, p, t):
    g = GAUGES[name]
    v = g.eval(p)
    assert v >= 0.0
    if math.isfinite(v):
        assert abs(g.eval(t * p) - t * v) <= 1e-7 * (1 + t * v)
    else:
        assert math.isinf(g.eval(t * p))


@given(vec2)
def test_minkowski_of_box_is_sup_norm(p):
    assert abs(make_minkowski_gauge(LINF_BALL).eval(p) - np.max(np.abs(p))) <= 1e-8 * max(1.0, np.max(np.abs(p)))


LEVEL_GAUGES = [n for n in GAUGES if n != "parabola"] + ["parabola"]


@pytest.mark.parametrize("name", LEVEL_GAUGES)
@given(p=vec2, r=st.floats(0.05, 10))
def test_level_set_consistency(name, p, r):
    g = GAUGES[name]
    q = g.sublevel_project(r, p)
    assert g.eval(q) <= r + 1e-6
    if g.eval(p) <= r:
        assert np.allclose(q, p)


INTERIOR = {"parabola": [1.0, 0.0], "cutter": [-1.0, 0.0], "persp-abs": [0.0, 1.0], "base-l1": [0.0, 0.0]}


@pytest.mark.parametrize("name", list(INTERIOR))
@given(p=vec2)
def test_domain_projection_is_identity_exactly_on_domain(name, p):
    g = GAUGES[name]
    q = g.domain_project(p)
    if math.isfinite(g.eval(p)):
        assert np.allclose(q, p, atol=1e-9)
    else:
        # q lies in the closed domain: nudging it toward the interior gives a finite value
        assert math.isfinite(g.eval(q + 1e-9 * np.asarray(INTERIOR[name])))
    assert np.allclose(g.domain_project(q), q, atol=1e-12)


@pytest.mark.parametrize("f", [abs_shift(), dead_zone(1.0, 0.5), abs_shift(2.0, 0.0, 3.0)], ids=lambda f: f.name)
@given(x=st.floats(-20, 20))
def test_perspective_lower_semicontinuous_at_zero_height(f, x):
    g = make_perspective_gauge(f)
    assert g.eval([x, 1e-9]) >= g.eval([x, 0.0]) - 1e-4


@pytest.mark.parametrize("f", [abs_shift(), dead_zone(), shifted_quadratic([1.0], 0.5)], ids=lambda f: f.name)
@given(x=coord, y=coord, t=st.floats(0, 1))
def test_function_family_convexity(f, x, y, t):
    lhs = f(t * x + (1 - t) * y)
    assert lhs <= t * f(x) + (1 - t) * f(y) + 1e-9 * (1 + abs(lhs))


@pytest.mark.parametrize("f", [abs_shift(), dead_zone(), abs_shift(0.5, 1.0, 2.0)], ids=lambda f: f.name)
@given(x=coord, t=st.floats(0.1, 10))
def test_recession_is_homogeneous(f, x, t):
    r = f.recession_eval(np.array([x]))
    assert abs(f.recession_eval(np.array([t * x])) - t * r) <= 1e-9 * (1 + t * abs(r))


@given(vec3)
def test_quadratic_perspective_value(p):
    assume(p[-1] > 1e-3)
    g = make_perspective_gauge(shifted_quadratic([1.0, -1.0], 2.0))
    x, lam = p[:2], p[2]
    expected = np.sum((x - lam * np.array([1.0, -1.0])) ** 2) / lam + 2.0 * lam
    assert g.eval(p) == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_descriptor_nestedness():
    D = parabola_descriptor()
    rng = np.random.default_rng(2)
    for _ in range(100):
        p = rng.uniform(-3, 3, size=2)
        r1 = rng.uniform(0.1, 3)
        r2 = r1 + rng.uniform(0.01, 3)
        if D.set.contains(p / r1):
            assert D.set.contains(p / r2)
