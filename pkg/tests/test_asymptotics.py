"""Asymptotic constants, decay laws, continuum limit, identity suite."""

import math

import numpy as np
import pytest

import qhp.asymptotics as asym
import qhp.kernel as kn
from qhp.errors import ClassError, DomainError
from qhp.walk import StepDistribution, preset, random_zero_drift

SQRT3 = math.sqrt(3.0)


def test_constant_A_voter():
    assert asym.constant_A(preset("voter")) == pytest.approx(
        3 * SQRT3 / (2 * math.pi), abs=1e-14)


def test_constant_A_simple():
    assert asym.constant_A(preset("simple")) == pytest.approx(2 / math.pi, abs=1e-14)


@pytest.mark.parametrize("lam,nu", [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (0.7, 1.9)])
def test_constant_A_nucleosome_closed_form(lam, nu):
    expected = math.sqrt(1 - nu ** 2 / (nu + lam) ** 2) / math.acos(nu / (nu + lam))
    assert asym.constant_A(preset("nucleosome", (lam, nu))) == pytest.approx(
        expected, abs=1e-12)


def test_constant_A_wrong_class():
    with pytest.raises(ClassError):
        asym.constant_A(preset("tandem", (0.2, 0.4)))


def test_constant_D_tandem():
    lam, nu = 0.2, 0.4
    assert asym.constant_D(preset("tandem", (lam, nu))) == pytest.approx(
        math.sqrt((nu - lam) / (math.pi * nu)), abs=1e-12)
    # independent route: d'(1) = 4 nu (nu - lam)
    assert asym.constant_D(preset("tandem", (lam, nu))) == pytest.approx(
        math.sqrt(4 * nu * (nu - lam)) / (2 * math.sqrt(math.pi) * nu), abs=1e-14)


def test_constant_D_degenerates_at_equal_rates():
    vals = [asym.constant_D(preset("tandem", (lam, (1 - lam) / 2)))
            for lam in (0.30, 0.32, 0.33)]
    assert vals[0] > vals[1] > vals[2]
    lam = 0.333
    nu = (1 - lam) / 2
    assert asym.constant_D(preset("tandem", (lam, nu))) == pytest.approx(
        math.sqrt((nu - lam) / (math.pi * nu)), rel=1e-10)


def test_rho_asym_simple():
    p = preset("asym_simple", (0.2, 0.3, 0.2, 0.3))
    s = math.sqrt(0.24)
    x2 = ((1 - s) - math.sqrt((1 - s) ** 2 - 0.24)) / 0.4
    assert asym.rho(p) == pytest.approx(x2, abs=1e-10)
    assert asym.rho(p) == pytest.approx(0.91990, abs=1e-5)
    assert 0 < asym.rho(p) < 1


def test_rho_h2prime_family():
    p = StepDistribution.from_probs(
        {(-1, 1): 0.3, (-1, 0): 0.2, (0, -1): 0.3, (1, -1): 0.2})
    r = asym.rho(p)
    # quadratic discriminant: 0.76 x^2 - 0.76 x + 0.04
    expected = (0.76 + math.sqrt(0.76 ** 2 - 4 * 0.76 * 0.04)) / (2 * 0.76)
    assert r == pytest.approx(expected, rel=1e-12)
    assert 0 < r < 1


def test_rho_wrong_class():
    with pytest.raises(ClassError):
        asym.rho(preset("voter"))


def test_beta0_negative_and_b_positive():
    p = preset("asym_simple", (0.2, 0.3, 0.2, 0.3))
    b0 = asym.beta0_constant(p)
    assert b0 < 0
    for j0 in (1, 2, 3):
        assert asym.constant_B(p, j0) > 0


def test_beta0_closed_form_group4():
    """beta0 = (w(0) - w(1)) (x2 - x3) / ((x2 - x1)(x2 - x4))."""
    import qhp.gluing as gl

    p = preset("asym_simple", (0.2, 0.3, 0.2, 0.3))
    g = gl.build_gluing(p)
    x1, x2, x3, x4 = kn.branch_points(p).x
    w0 = complex(gl.w_eval(g, 0.0)).real
    w1 = complex(gl.w_eval(g, 1.0)).real
    expected = (w0 - w1) * (x2 - x3) / ((x2 - x1) * (x2 - x4))
    assert asym.beta0_constant(p, g) == pytest.approx(expected, rel=1e-12)


def test_constant_B_j0_ratio():
    """B(2)/B(1) = 2 sqrt(c(x2)/a(x2)): the only j0-dependent factor."""
    p = preset("asym_simple", (0.2, 0.3, 0.2, 0.3))
    alg = kn.algebra(p)
    x2 = kn.branch_points(p).x[1]
    expected = 2.0 * math.sqrt(alg.c_eval(x2) / alg.a_eval(x2))
    assert asym.constant_B(p, 2) / asym.constant_B(p, 1) == pytest.approx(
        expected, rel=1e-12)


def test_constant_B_against_oracle_ratio_trend():
    """DP ratios drift toward 1 as i0 grows (slow O(1/i0) correction)."""
    import qhp.oracle as oc

    p = preset("asym_simple", (0.2, 0.3, 0.2, 0.3))
    B1 = asym.constant_B(p, 1)
    r = asym.rho(p)
    sol = oc.solve_bracket(p, 320, 220, 1e-10)
    ratios = [sol.midpoint(i0, 1) / (B1 * r ** i0 / i0 ** 1.5)
              for i0 in (40, 60, 80, 100)]
    gaps = [abs(x - 1) for x in ratios]
    assert gaps == sorted(gaps, reverse=True)  # monotone approach to 1
    assert gaps[-1] < 0.12
    # the correction series in 1/i0 extrapolates to 1 (quadratic fit)
    xs = np.array([1 / 60, 1 / 80, 1 / 100])
    extrapolated = np.polyfit(xs, np.array(ratios[1:]), 2)[-1]
    assert extrapolated == pytest.approx(1.0, abs=0.02)


def test_asymptotic_probability_dispatch():
    assert asym.asymptotic_probability(preset("voter"), 100, 1) == pytest.approx(
        3 * SQRT3 / (2 * math.pi) / 100, rel=1e-12)
    lam, nu = 0.2, 0.4
    assert asym.asymptotic_probability(preset("tandem", (lam, nu)), 400, 1) == (
        pytest.approx(math.sqrt((nu - lam) / (math.pi * nu)) / 20.0, rel=1e-12))
    p = preset("asym_simple", (0.2, 0.3, 0.2, 0.3))
    expected = asym.constant_B(p, 1) * asym.rho(p) ** 60 / 60 ** 1.5
    assert asym.asymptotic_probability(p, 60, 1) == pytest.approx(expected, rel=1e-12)


def test_asymptotic_law_objects():
    law = asym.asymptotic_law(preset("voter"))
    assert law.rho == 1.0 and law.power == 1.0 and law.j0_scaling == "linear"
    assert law.predicted(100, 2) == pytest.approx(2 * law.constant / 100)
    p = preset("asym_simple", (0.2, 0.3, 0.2, 0.3))
    law2 = asym.asymptotic_law(p, j0=2)
    assert law2.j0_scaling == "baked-in"
    with pytest.raises(DomainError):
        law2.predicted(50, 3)
    with pytest.raises(DomainError):
        asym.asymptotic_law(p)  # geometric regime needs j0


def test_continuum_probability_values():
    assert asym.continuum_probability(preset("simple"), 1.0, 1.0) == pytest.approx(
        0.5, abs=1e-14)
    assert asym.continuum_probability(preset("voter"), 1.0, 1.0) == pytest.approx(
        0.5, abs=1e-14)
    # the voter value comes from (3/pi) arctan((sqrt(3)/2)/(3/2)) = 1/2
    small = asym.continuum_probability(preset("voter"), 5.0, 1e-9)
    assert small == pytest.approx(0.0, abs=1e-8)
    with pytest.raises(DomainError):
        asym.continuum_probability(preset("voter"), 1.0, 0.0)


def test_continuum_constant_equals_discrete_constant():
    for maker in (lambda: preset("voter"), lambda: preset("simple"),
                  lambda: preset("nucleosome", (1.0, 1.0))):
        p = maker()
        assert asym.continuum_constant(p) == pytest.approx(
            asym.constant_A(p), abs=1e-12)
    assert asym.continuum_constant(preset("nucleosome", (1.0, 1.0))) == (
        pytest.approx(3 * SQRT3 / (2 * math.pi), abs=1e-13))


def test_identity_suite_on_random_zero_drift_walks():
    """The two closed forms of A agree, and the curvature identity holds."""
    rng = np.random.default_rng(2024)
    for _ in range(200):
        p = random_zero_drift(rng)
        alg = kn.algebra(p)
        ang = kn.theta(p)
        beta = kn.beta_ratio(p)
        a1 = float(alg.a_eval(1.0))
        at1 = float(alg.at_eval(1.0))
        d2 = float(alg.d_deriv(1.0, 2))
        lhs = math.sqrt(-d2) / (2 ** 1.5 * ang * a1)
        rhs = math.sin(ang) / (beta * ang)
        assert abs(lhs - rhs) <= 1e-12
        sxy = kn.second_moments(p)[2]
        assert abs(-d2 / 2 - (4 * a1 * at1 - sxy ** 2)) <= 1e-12
        # section symmetry under zero drift
        assert abs(a1 - float(alg.c_eval(1.0))) <= 1e-14
        assert abs(at1 - float(alg.ct_eval(1.0))) <= 1e-14
        b1 = float(alg.b_eval(1.0))
        assert b1 < 0
        assert abs(-b1 - 2 * math.sqrt(a1 * float(alg.c_eval(1.0)))) <= 1e-12


def test_voter_monotone_convergence_to_law():
    """P_dp(i0,1) * i0 / A is within 10% of 1 at i0 = 160 and closer
    still at i0 = 320."""
    import qhp.oracle as oc

    p = preset("voter")
    a_val = asym.constant_A(p)
    sol = oc.solve_bracket(p, 1100, 1100, 1e-9)
    r160 = sol.midpoint(160, 1) * 160 / a_val
    r320 = sol.midpoint(320, 1) * 320 / a_val
    assert abs(r160 - 1.0) < 0.10
    assert abs(r320 - 1.0) < abs(r160 - 1.0)
