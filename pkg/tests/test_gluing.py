"""Gluing construction, evaluation, pole data, and the gluing identity."""

import math

import numpy as np
import pytest

import qhp.gluing as gl
import qhp.kernel as kn
from qhp.errors import NoExplicitGluing, PoleError
from qhp.walk import StepDistribution, preset


def zero_drift_deg3_walk():
    # p(1,0)^2 = 4 p(1,1) p(1,-1) kills the quartic coefficient of d
    return StepDistribution.from_probs({
        (1, 1): 0.1, (1, 0): 0.2, (1, -1): 0.1, (0, 1): 0.1,
        (0, -1): 0.1, (-1, 1): 0.1, (-1, 0): 0.2, (-1, -1): 0.1,
    })


def test_kind_selection():
    assert gl.build_gluing(preset("voter")).kind is gl.GluingKind.ZERO_DRIFT_EXPLICIT
    assert gl.build_gluing(preset("simple")).kind is gl.GluingKind.ZERO_DRIFT_EXPLICIT
    assert (gl.build_gluing(preset("asym_simple", (0.2, 0.3, 0.2, 0.3))).kind
            is gl.GluingKind.GROUP4_RATIONAL)
    assert (gl.build_gluing(preset("tandem", (0.2, 0.4))).kind
            is gl.GluingKind.TANDEM_RATIONAL)


def test_simple_walk_maps_to_zero_drift_with_right_angle():
    g = gl.build_gluing(preset("simple"))
    assert g.angle == pytest.approx(math.pi / 2, rel=1e-14)
    assert g.pole_order == pytest.approx(2.0, rel=1e-14)


def test_generic_negative_drift_walk_has_no_gluing():
    # all eight steps positive, strictly negative drift: outside the
    # reproduced constructions
    probs = {
        (1, 1): 0.05, (1, 0): 0.1, (1, -1): 0.1, (0, -1): 0.25,
        (-1, -1): 0.1, (-1, 0): 0.2, (-1, 1): 0.1, (0, 1): 0.1,
    }
    with pytest.raises(NoExplicitGluing):
        gl.build_gluing(StepDistribution.from_probs(probs))


def test_h2prime_walk_has_no_gluing():
    p = StepDistribution.from_probs(
        {(-1, 1): 0.3, (-1, 0): 0.2, (0, -1): 0.3, (1, -1): 0.2})
    with pytest.raises(NoExplicitGluing):
        gl.build_gluing(p)


def test_unit_disc_values():
    g = gl.unit_disc_gluing()
    assert gl.w_eval(g, 1j) == pytest.approx(-0.5, abs=1e-15)
    # on the unit circle w is real: w(e^{i phi}) = -1/(4 sin^2(phi/2))
    for phi in (0.3, 1.2, 2.8):
        val = gl.w_eval(g, complex(math.cos(phi), math.sin(phi)))
        assert abs(val.imag) < 1e-14
        assert val.real == pytest.approx(-1.0 / (4 * math.sin(phi / 2) ** 2), rel=1e-12)


def test_group4_values():
    p = preset("asym_simple", (0.2, 0.3, 0.2, 0.3))
    g = gl.build_gluing(p)
    x1, x2, x3, x4 = kn.branch_points(p).x
    assert gl.w_eval(g, 0.0) == pytest.approx(x1 * x4 / (x2 * x3), rel=1e-13)


def test_pole_limits():
    p = preset("asym_simple", (0.2, 0.3, 0.2, 0.3))
    g = gl.build_gluing(p)
    x1, x2, x3, x4 = kn.branch_points(p).x
    expected = (x2 - x1) * (x2 - x4) / (x2 - x3)
    assert gl.pole_limit_at_x2(g) == pytest.approx(expected, rel=1e-13)
    assert gl.pole_limit_at_x2(g) == pytest.approx(6.3410, rel=1e-4)
    # frozen from the closed form x2/(x2-s)^2 with s = 2, x2 = 1
    t = gl.build_gluing(preset("tandem", (0.2, 0.4)))
    assert gl.pole_limit_at_x2(t) == pytest.approx(1.0, rel=1e-13)
    # numerical cross-check: (t - x2) w(t) as t -> x2
    for delta in (1e-7, 1e-8):
        approx = (delta) * gl.w_eval(t, t.pole + delta)
        assert approx.real == pytest.approx(gl.pole_limit_at_x2(t), rel=1e-5)


def test_pole_limit_unsupported_for_zero_drift():
    with pytest.raises(NoExplicitGluing):
        gl.pole_limit_at_x2(gl.build_gluing(preset("voter")))


def test_w_eval_at_pole_raises():
    g = gl.build_gluing(preset("tandem", (0.2, 0.4)))
    with pytest.raises(PoleError):
        gl.w_eval(g, g.pole)
    with pytest.raises(PoleError):
        gl.w_eval(gl.build_gluing(preset("voter")), 1.0)


@pytest.mark.parametrize("maker", [
    lambda: preset("voter"),
    lambda: preset("simple"),
    lambda: preset("asym_simple", (0.2, 0.3, 0.2, 0.3)),
    lambda: preset("tandem", (0.2, 0.4)),
    zero_drift_deg3_walk,
])
def test_gluing_identity_on_curve(maker):
    p = maker()
    g = gl.build_gluing(p)
    rep = gl.verify_gluing(g, p, 64)
    assert rep.max_mismatch < 1e-8


def test_zero_drift_w_real_inside_domain_segment():
    p = preset("voter")
    g = gl.build_gluing(p)
    x1 = kn.branch_points(p).x[0]
    t = np.linspace(x1 + 1e-3, 1.0 - 1e-3, 200).astype(complex)
    vals = gl.w_eval(g, t)
    assert np.max(np.abs(vals.imag)) < 1e-10


def test_zero_drift_pole_growth():
    """|w(t)| * (1-t)^(pi/theta) approaches a nonzero constant as t -> 1."""
    p = preset("voter")
    g = gl.build_gluing(p)
    q = g.pole_order
    products = [abs(gl.w_eval(g, 1.0 - d)) * d ** q for d in (1e-3, 1e-4, 1e-5)]
    assert products[0] == pytest.approx(products[-1], rel=1e-2)
    assert products[-1] > 0


@pytest.mark.parametrize("maker,expected", [
    (lambda: preset("voter"), 3.0),
    (lambda: preset("simple"), 2.0),
    (lambda: preset("asym_simple", (0.2, 0.3, 0.2, 0.3)), 1.0),
    (lambda: preset("tandem", (0.2, 0.4)), 1.0),
])
def test_pole_exponent_estimates(maker, expected):
    g = gl.build_gluing(maker())
    assert gl.pole_exponent_estimate(g) == pytest.approx(expected, rel=1e-2)


@pytest.mark.parametrize("maker", [
    lambda: preset("voter"),
    lambda: preset("asym_simple", (0.2, 0.3, 0.2, 0.3)),
    lambda: preset("tandem", (0.2, 0.4)),
    zero_drift_deg3_walk,
])
def test_derivative_matches_central_differences(maker):
    p = maker()
    g = gl.build_gluing(p)
    x1 = kn.branch_points(p).x[0]
    hi = g.pole - 3e-3
    pts = list(np.linspace(x1 + 5e-2, hi, 7)) + [complex(0.4, 0.3)]
    h = 1e-6
    for t in pts:
        t = complex(t)
        numeric = (gl.w_eval(g, t + h) - gl.w_eval(g, t - h)) / (2 * h)
        analytic = gl.w_derivative(g, t)
        assert abs(numeric - analytic) < 1e-6 * (1 + abs(analytic))


def test_w_finite_at_zero_and_one_for_group4():
    p = preset("asym_simple", (0.2, 0.3, 0.2, 0.3))
    g = gl.build_gluing(p)
    for t in (0.0, 1.0):
        assert np.isfinite(gl.w_eval(g, t))


def test_injectivity_on_real_segment():
    """w is one-to-one on a mesh of the real segment inside the domain."""
    for p in [preset("voter"), preset("asym_simple", (0.2, 0.3, 0.2, 0.3))]:
        g = gl.build_gluing(p)
        x1 = kn.branch_points(p).x[0]
        t = np.linspace(x1 + 1e-3, g.pole - 1e-3, 300).astype(complex)
        vals = gl.w_eval(g, t).real
        diffs = np.diff(np.sort(vals))
        assert np.all(diffs > 1e-12)


def test_near_pole_guard_is_continuous():
    """The local pole form and the trigonometric formula agree across the
    guard boundary (zero-drift kind)."""
    g = gl.build_gluing(preset("voter"))
    for delta in (1.2e-6, 0.9e-6):  # straddle the 1e-6 switch
        t = 1.0 - delta
        w_here = complex(gl.w_eval(g, t))
        # reference: limit form evaluated by hand from the growth law
        q = g.pole_order
        gval = complex(1.0 / 3.0 - 2.0 * (g.f_const + g.f_coef / (t - g.f_pole)) / g.curvature)
        local = -(4.0 ** (q - 1.0)) * gval ** (-q)
        assert w_here == pytest.approx(local, rel=5e-6)
    # derivative likewise
    for delta in (1.2e-6, 0.9e-6):
        t = 1.0 - delta
        num = (complex(gl.w_eval(g, t + 1e-9)) - complex(gl.w_eval(g, t - 1e-9))) / 2e-9
        assert complex(gl.w_derivative(g, t)) == pytest.approx(num, rel=1e-4)
