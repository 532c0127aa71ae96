"""Conformal gluing functions for the domain bounded by the curve X([y1, y2]).

A gluing function ``w`` for the domain is meromorphic there, maps it
conformally onto the plane cut along an interval, and identifies complex
conjugate boundary points: ``w(t) = w(conj(t))`` on the curve.  It is the
key ingredient of the contour representation of the hitting probability.

Explicit constructions implemented here:

``ZERO_DRIFT_EXPLICIT``
    valid for every zero-drift walk;
    ``w(t) = sin(pi/theta * (arcsin(g(t)^(-1/2)) - pi/2))^2`` with
    ``g(t) = 1/3 - 2 f(t) / d''(1)`` and ``f`` a Moebius (or affine, when
    the fourth branch point is at infinity) transform built from ``d`` at
    the outer branch point.  The pole at ``t = 1`` has order ``pi/theta``.

``GROUP4_RATIONAL``
    walks whose support lies in the four axis steps;
    ``w(t) = (t - x1)(t - x4) / ((t - x2)(t - x3))``.

``TANDEM_RATIONAL``
    walks supported on the steps W-up, E, S (the tandem-queue family);
    ``w(t) = t / ((t - x2)(t - s)^2)`` with
    ``s = sqrt(p[-1,1] p[0,-1] / (p[1,0]^2 x2))``.

``UNIT_DISC``
    the classical map ``w(t) = t/(t-1)^2`` gluing the unit circle; for
    walks whose curve is the unit circle (e.g. the simple walk).

No construction is provided for generic negative-drift walks (their
gluing needs elliptic machinery) nor for the degenerate five-step family
(ellipse domain); :func:`build_gluing` signals ``NoExplicitGluing`` so
callers can fall back to the grid solver or Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NoExplicitGluing, PoleError
from . import kernel
from .walk import Regime, StepDistribution, classify

_POLE_GUARD = 1e-6   # below this distance to the pole, use the local pole form


class GluingKind(Enum):
    ZERO_DRIFT_EXPLICIT = "ZeroDriftExplicit"
    GROUP4_RATIONAL = "Group4Rational"
    TANDEM_RATIONAL = "TandemRational"
    UNIT_DISC = "UnitDisc"


@dataclass(frozen=True)
class GluingFunction:
    """A constructed gluing function together with its pole data.

    ``pole`` is the real pole inside/on the segment machinery cares
    about (always the second branch point, or 1); ``pole_order`` its
    order (1 for the simple-pole rational kinds, ``pi/theta`` for the
    zero-drift construction, 2 for the unit disc).  ``pole_at_x2`` is
    ``lim (t - x2) w(t)`` for the simple-pole kinds, else ``None``.
    """

    kind: GluingKind
    pole: float
    pole_order: float
    pole_at_x2: float | None = None
    # zero-drift construction data
    angle: float | None = None
    curvature: float | None = None      # d''(1) < 0
    f_const: float | None = None
    f_coef: float | None = None
    f_pole: float | None = None         # x4 when finite, None when f is affine
    # rational construction data
    zeros: tuple[float, float] | None = None    # numerator roots (group 4)
    poles: tuple[float, float] | None = None    # denominator roots (group 4)
    x2: float | None = None
    dbl: float | None = None                    # double-pole position (tandem)


def unit_disc_gluing() -> GluingFunction:
    """The classical unit-disc gluing ``w(t) = t/(t-1)^2``."""
    return GluingFunction(kind=GluingKind.UNIT_DISC, pole=1.0, pole_order=2.0)


def build_gluing(p: StepDistribution) -> GluingFunction:
    """Construct the explicit gluing function appropriate for the walk.

    Zero-drift walks always get the explicit zero-drift construction.
    Negative-drift walks get a rational gluing when their step support
    matches one of the two rational families; otherwise
    ``NoExplicitGluing`` is raised and the caller must fall back to the
    grid solver or Monte Carlo.
    """
    wc = classify(p)
    if wc.tag is Regime.ZERO_ZERO:
        return _build_zero_drift(p)
    if wc.tag in (Regime.NEG_NEG, Regime.NEG_ZERO):
        support = p.support()
        if support <= {(1, 0), (0, 1), (-1, 0), (0, -1)}:
            return _build_group4(p)
        if support == {(-1, 1), (1, 0), (0, -1)}:
            return _build_tandem(p)
        raise NoExplicitGluing(
            f"no explicit gluing for a {wc.tag.value} walk with support "
            f"{sorted(support)}")
    raise NoExplicitGluing(
        f"no explicit gluing for walk class {wc.tag.value}")


def _build_zero_drift(p: StepDistribution) -> GluingFunction:
    alg = kernel.algebra(p)
    bp = kernel.branch_points(p)
    ang = kernel.theta(p)
    d2_one = float(alg.d_deriv(1.0, 2))
    x4 = bp.x[3]
    if math.isfinite(x4):
        f_const = float(alg.d_deriv(x4, 2)) / 6.0
        f_coef = float(alg.d_deriv(x4, 1))
        f_pole = x4
    else:
        f_const = float(alg.d_deriv(0.0, 2)) / 6.0
        f_coef = float(alg.d_deriv(0.0, 3)) / 6.0
        f_pole = None
    return GluingFunction(
        kind=GluingKind.ZERO_DRIFT_EXPLICIT,
        pole=1.0,
        pole_order=math.pi / ang,
        angle=ang,
        curvature=d2_one,
        f_const=f_const,
        f_coef=f_coef,
        f_pole=f_pole,
    )


def _build_group4(p: StepDistribution) -> GluingFunction:
    x1, x2, x3, x4 = kernel.branch_points(p).x
    if not math.isfinite(x4):
        raise NoExplicitGluing("group-4 gluing requires a finite outer branch point")
    limit = (x2 - x1) * (x2 - x4) / (x2 - x3)
    return GluingFunction(
        kind=GluingKind.GROUP4_RATIONAL,
        pole=x2,
        pole_order=1.0,
        pole_at_x2=limit,
        zeros=(x1, x4),
        poles=(x2, x3),
        x2=x2,
    )


def _build_tandem(p: StepDistribution) -> GluingFunction:
    x2 = kernel.branch_points(p).x[1]
    pw, pe, ps = p.prob(-1, 1), p.prob(1, 0), p.prob(0, -1)
    if min(pw, pe, ps) <= 0.0:
        raise NoExplicitGluing("tandem gluing requires all three support steps")
    dbl = math.sqrt(pw * ps / (pe ** 2 * x2))
    limit = x2 / (x2 - dbl) ** 2
    return GluingFunction(
        kind=GluingKind.TANDEM_RATIONAL,
        pole=x2,
        pole_order=1.0,
        pole_at_x2=limit,
        x2=x2,
        dbl=dbl,
    )


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _as_complex(t):
    return np.asarray(t, dtype=complex)


def _f_eval(g: GluingFunction, t):
    if g.f_pole is not None:
        return g.f_const + g.f_coef / (t - g.f_pole)
    return g.f_const + g.f_coef * t


def _f_deriv(g: GluingFunction, t):
    if g.f_pole is not None:
        return -g.f_coef / (t - g.f_pole) ** 2
    return np.full_like(t, g.f_coef)


def _g_eval(g: GluingFunction, t):
    return 1.0 / 3.0 - 2.0 * _f_eval(g, t) / g.curvature


def _g_deriv(g: GluingFunction, t):
    return -2.0 * _f_deriv(g, t) / g.curvature


def _check_pole(t, pole_positions):
    t = np.asarray(t)
    for pos in pole_positions:
        if np.any(t == pos):
            raise PoleError(f"gluing function evaluated at its pole t = {pos}")


def w_eval(g: GluingFunction, t):
    """Evaluate ``w(t)`` (complex, vectorized).

    Within ``1e-6`` of the zero-drift pole the leading local form
    ``-4^(q-1) g(t)^-q`` with ``q = pi/theta`` replaces the trigonometric
    formula, which loses relative accuracy there.  Evaluation exactly at
    a pole raises :class:`~qhp.errors.PoleError`.
    """
    scalar = np.isscalar(t) or np.ndim(t) == 0
    t = _as_complex(t)
    if g.kind is GluingKind.UNIT_DISC:
        _check_pole(t, [1.0])
        out = t / (t - 1.0) ** 2
    elif g.kind is GluingKind.GROUP4_RATIONAL:
        x1, x4 = g.zeros
        x2, x3 = g.poles
        _check_pole(t, [x2, x3])
        out = (t - x1) * (t - x4) / ((t - x2) * (t - x3))
    elif g.kind is GluingKind.TANDEM_RATIONAL:
        _check_pole(t, [g.x2, g.dbl])
        out = t / ((t - g.x2) * (t - g.dbl) ** 2)
    else:
        _check_pole(t, [1.0])
        out = _w_zero_drift(g, t, derivative=False)
    return complex(out) if scalar else out


def w_derivative(g: GluingFunction, t):
    """Evaluate ``w'(t)`` by the differentiated analytic formula."""
    scalar = np.isscalar(t) or np.ndim(t) == 0
    t = _as_complex(t)
    if g.kind is GluingKind.UNIT_DISC:
        _check_pole(t, [1.0])
        out = -(t + 1.0) / (t - 1.0) ** 3
    elif g.kind is GluingKind.GROUP4_RATIONAL:
        x1, x4 = g.zeros
        x2, x3 = g.poles
        _check_pole(t, [x2, x3])
        num = (t - x1) * (t - x4)
        dnum = 2.0 * t - x1 - x4
        den = (t - x2) * (t - x3)
        dden = 2.0 * t - x2 - x3
        out = (dnum * den - num * dden) / den ** 2
    elif g.kind is GluingKind.TANDEM_RATIONAL:
        _check_pole(t, [g.x2, g.dbl])
        den = (t - g.x2) * (t - g.dbl) ** 2
        dden = (t - g.dbl) ** 2 + 2.0 * (t - g.x2) * (t - g.dbl)
        out = (den - t * dden) / den ** 2
    else:
        _check_pole(t, [1.0])
        out = _w_zero_drift(g, t, derivative=True)
    return complex(out) if scalar else out


def _w_zero_drift(g: GluingFunction, t, derivative: bool):
    q = g.pole_order  # pi / theta
    gval = _g_eval(g, t)
    near = np.abs(t - 1.0) < _POLE_GUARD
    # principal branches throughout; values stay on the correct sheet
    # because g is real on the real axis and conjugate-symmetric
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(near, 2.0, gval) ** (-0.5)
        phi = q * (np.arcsin(s) - math.pi / 2.0)
        if not derivative:
            direct = np.sin(phi) ** 2
            local = -(4.0 ** (q - 1.0)) * np.where(near, gval, 1.0) ** (-q)
        else:
            dg = _g_deriv(g, t)
            ds = -0.5 * np.where(near, 2.0, gval) ** (-1.5) * dg
            dphi = q / np.sqrt(1.0 - s ** 2) * ds
            direct = 2.0 * np.sin(phi) * np.cos(phi) * dphi
            local = (-(4.0 ** (q - 1.0)) * (-q)
                     * np.where(near, gval, 1.0) ** (-q - 1.0) * dg)
    return np.where(near, local, direct)


def pole_limit_at_x2(g: GluingFunction) -> float:
    """``lim (t - x2) w(t)`` for the simple-pole rational kinds."""
    if g.pole_at_x2 is None:
        raise NoExplicitGluing(
            f"{g.kind.value} has no simple pole at the second branch point")
    return g.pole_at_x2


# ---------------------------------------------------------------------------
# Verification helpers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GluingReport:
    """Result of sampling the gluing identity on the curve."""

    max_mismatch: float
    worst_y: float
    n_samples: int


def verify_gluing(g: GluingFunction, p: StepDistribution,
                  n_samples: int = 64) -> GluingReport:
    """Check ``w(t) = w(conj(t))`` on the curve X([y1, y2]).

    Samples Chebyshev-spaced points of (y1, y2), evaluates ``w`` on both
    conjugate branches ``X0(y)``, ``X1(y)`` and reports the worst
    normalized mismatch ``|w(X0) - w(X1)| / (1 + |w(X0)|)``.
    """
    alg = kernel.algebra(p)
    bp = kernel.branch_points(p)
    y1, y2 = bp.y[0], bp.y[1]
    k = np.arange(n_samples)
    nodes = 0.5 * (y1 + y2) + 0.5 * (y2 - y1) * np.cos((2 * k + 1) * math.pi / (2 * n_samples))
    x0, x1 = kernel._conjugate_branches_X(alg, bp, nodes)
    w0 = w_eval(g, x0)
    w1 = w_eval(g, x1)
    mism = np.abs(w0 - w1) / (1.0 + np.abs(w0))
    worst = int(np.argmax(mism))
    return GluingReport(
        max_mismatch=float(mism[worst]),
        worst_y=float(nodes[worst]),
        n_samples=n_samples,
    )


def pole_exponent_estimate(g: GluingFunction, spans=(1e-5, 1e-2),
                           n_points: int = 40) -> float:
    """Estimate the pole order of ``w`` at its real pole.

    Fits the slope of ``log |w|`` against ``log (distance)`` approaching
    the pole from the left along the real axis; returns the estimated
    exponent (positive).
    """
    deltas = np.geomspace(spans[0], spans[1], n_points)
    t = g.pole - deltas
    vals = np.abs(w_eval(g, t.astype(complex)))
    slope = np.polyfit(np.log(deltas), np.log(vals), 1)[0]
    return float(-slope)
