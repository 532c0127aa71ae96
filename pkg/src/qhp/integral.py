"""Contour-integral representation of the hitting probability.

The exit generating function

    h(x) = sum_{i>=1} P[hit horizontal axis first, at (i, 0)] x^i

of a walk started at ``(i0, j0)`` admits the closed representation

    h(x) = x^i0 Y0(x)^j0
           + (1/pi) * integral_{x1}^{x2} t^i0 mu_j0(t)
             [ w'(t)/(w(t)-w(x)) - w'(t)/(w(t)-w(0)) ] sqrt(-d(t)) dt,

valid for ``x`` outside ``(x3, x4)``, with ``w`` a conformal gluing
function for the domain and the positive square root on the cut
``[x1, x2]``.  The hitting probability of the vertical axis is
``1 - h(1)``; when the vertical drift vanishes ``w`` has its pole at
``x2 = 1`` and the ``w(x)`` term drops out of the bracket.

Numerics: when ``d`` has simple roots at both cut endpoints, the
substitution ``t = mid + halfwidth * cos(phi)`` absorbs the square-root
(or inverse-square-root) endpoint behavior exactly and a midpoint rule
in ``phi`` converges spectrally.  In the zero-drift case the double root
of ``d`` at 1 is factored out analytically, the matching simple pole of
the bracket is cancelled in closed form (so nothing is evaluated as
``0 * inf``), and the single remaining half power ``sqrt(t - x1)`` is
taken as the weight of a Gauss-Jacobi rule - under the cosine
substitution it would stay unpaired and drop the rule to algebraic
order.  Node counts are doubled until the two finest values agree, with
adaptive Gauss-Kronrod as a fallback.
For real ``x`` strictly inside the cut the formula is interpreted as a
principal value plus the real part of the half-residue-adjusted leading
term, which is what analytic continuation across the cut requires.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import gluing as gl
from . import kernel as kn
from .errors import DomainError, NonConvergence, PoleOnPath
from .walk import StepDistribution, _drift_tuple, DRIFT_TOL


class QuadratureRule(Enum):
    CHEBYSHEV_SUBSTITUTION = "chebyshev"
    ADAPTIVE_BISECTION = "adaptive"


@dataclass(frozen=True)
class QuadratureConfig:
    """Knobs of the contour quadrature.

    ``nodes`` is the starting node count (doubled until convergence, up
    to ``max_nodes``); ``rel_tol`` the relative agreement demanded
    between successive levels; ``endpoint_guard`` the distance to the
    gluing pole below which closed-form limits replace direct evaluation.
    """

    nodes: int = 256
    rule: QuadratureRule = QuadratureRule.CHEBYSHEV_SUBSTITUTION
    rel_tol: float = 1e-10
    endpoint_guard: float = 1e-6
    max_nodes: int = 1 << 16

    def __post_init__(self):
        if self.nodes < 16:
            raise DomainError("quadrature needs at least 16 nodes")
        if not (0.0 < self.rel_tol <= 1e-4):
            raise DomainError("rel_tol must lie in (0, 1e-4]")


@dataclass(frozen=True)
class HittingResult:
    """A value produced by the integral route, with its error estimate."""

    value: float | complex
    err_estimate: float
    method: str
    diagnostics: dict = field(default_factory=dict)


def _pow_int(t: np.ndarray, i0: int) -> np.ndarray:
    """``t ** i0`` for real t, stable for large i0 (log-space magnitude)."""
    if i0 <= 256:
        return t ** i0
    sign = np.where((t < 0) & (i0 % 2 == 1), -1.0, 1.0)
    with np.errstate(divide="ignore"):
        mag = np.where(t == 0.0, -np.inf, i0 * np.log(np.abs(np.where(t == 0, 1.0, t))))
    return sign * np.exp(mag)


class _Contour:
    """Precomputed data for integrating over the cut [x1, x2]."""

    def __init__(self, p: StepDistribution, g: gl.GluingFunction,
                 cfg: QuadratureConfig):
        self.alg = kn.algebra(p)
        self.bp = kn.branch_points(p)
        self.g = g
        self.cfg = cfg
        self.x1, self.x2 = self.bp.x[0], self.bp.x[1]
        _, my = _drift_tuple(p)
        self.double_root = abs(my) <= DRIFT_TOL and self.bp.x[2] == 1.0
        self.w0 = complex(gl.w_eval(g, 0.0))
        # finite roots of d with the unit double root removed (zero drift)
        if self.double_root:
            rest = [r for r in self.bp.x_finite if r != 1.0]
            self.reduced_roots = rest
        else:
            self.reduced_roots = None

    def sqrt_minus_d(self, t: np.ndarray) -> np.ndarray:
        vals = -self.bp.d_factored(t)
        vals = np.where(np.abs(vals) < 1e-30, np.abs(vals), vals)
        return np.sqrt(vals)

    def phi_density(self, t: np.ndarray, i0: int, j0: int) -> np.ndarray:
        """``t^i0 mu_j0(t) sqrt(-d(t))`` on the cut."""
        return _pow_int(t, i0) * kn._mu_eval(self.alg, j0, t) * self.sqrt_minus_d(t)

    def bracket(self, t: np.ndarray, wx: complex | None) -> np.ndarray:
        """``w'/(w - w(x)) - w'/(w - w(0))`` in pole-difference form.

        ``wx = None`` encodes ``w(x) = infinity`` (evaluation at the pole
        of ``w``), for which the first term vanishes.
        """
        tc = t.astype(complex)
        wt = gl.w_eval(self.g, tc)
        dwt = gl.w_derivative(self.g, tc)
        # w(t) = w(0) happens only at t = 0, where the t^i0 prefactor of
        # the density makes the singularity removable; clamp the exact
        # zero so 0 * inf cannot appear at a node sitting on it
        den0 = wt - self.w0
        den0 = np.where(den0 == 0, 1e-300, den0)
        if wx is None:
            return -dwt / den0
        if np.any(np.abs(wt - wx) < 1e-13 * np.abs(wt)):
            raise PoleOnPath(
                "w(x) collides with w on the integration contour")
        return dwt * (wx - self.w0) / ((wt - wx) * den0)

    def integrand(self, i0: int, j0: int, wx: complex | None):
        """Full integrand on the open cut, stable at both endpoints.

        In the zero-drift case the returned function is the integrand
        divided by ``sqrt(t - x1)``: the double root of ``d`` at 1 makes
        the other endpoint analytic, so the natural quadrature is
        Gauss-Jacobi with the remaining half-power as its weight (the
        cosine substitution would leave an unpaired half power and
        degrade to algebraic convergence).
        """
        if not self.double_root:
            def f(t: np.ndarray) -> np.ndarray:
                return self.phi_density(t, i0, j0) * self.bracket(t, wx)
            return f

        # zero drift: sqrt(-d) = (1-t) sqrt(t - x1) sqrt(rest); the (1-t)
        # factor pairs with the bracket, whose pole at 1 it cancels, and
        # the sqrt(t - x1) weight is handled by the quadrature rule
        lead = self.bp.d_lead
        other = [r for r in self.reduced_roots if r != self.x1]
        guard = self.cfg.endpoint_guard
        q = self.g.pole_order

        def f(t: np.ndarray) -> np.ndarray:
            rest = -lead * np.ones_like(t)
            for r in other:
                rest = rest * (t - r)
            base = _pow_int(t, i0) * kn._mu_eval(self.alg, j0, t) * np.sqrt(rest)
            if wx is None:
                # (1-t) * (-w'/(w - w0)) -> -(pi/theta) at the pole; the
                # direct quotient loses relative accuracy inside the guard
                inside = np.abs(t - 1.0) < guard
                safe_t = np.where(inside, 0.5, t)
                scaled = np.where(inside, -q, (1.0 - safe_t) * self.bracket(safe_t, wx))
            else:
                # products of guarded w-values only; vanishes like (1-t)^q
                scaled = (1.0 - t) * self.bracket(t, wx)
            return base * scaled

        return f

    def integrate(self, i0: int, j0: int, wx: complex | None):
        f = self.integrand(i0, j0, wx)
        if self.double_root:
            return _integrate_jacobi(f, self.x1, self.x2, self.cfg)
        return _integrate(f, self.x1, self.x2, self.cfg)


def _midpoint_chebyshev(f, x1: float, x2: float, n: int) -> complex:
    phi = (np.arange(n) + 0.5) * (math.pi / n)
    mid, hw = 0.5 * (x1 + x2), 0.5 * (x2 - x1)
    vals = f(mid + hw * np.cos(phi))
    return (math.pi / n) * hw * complex(np.sum(np.sin(phi) * vals))


_jacobi_cache: dict = {}


def _jacobi_rule(n: int):
    """Gauss-Jacobi nodes/weights for weight (1+x)^(1/2) on [-1, 1]."""
    if n not in _jacobi_cache:
        from scipy.special import roots_jacobi

        _jacobi_cache[n] = roots_jacobi(n, 0.0, 0.5)
    return _jacobi_cache[n]


def _gauss_jacobi(f, x1: float, x2: float, n: int) -> complex:
    """``integral of sqrt(t - x1) * f(t)`` over (x1, x2)."""
    x, w = _jacobi_rule(n)
    mid, hw = 0.5 * (x1 + x2), 0.5 * (x2 - x1)
    vals = f(mid + hw * x)
    return hw ** 1.5 * complex(np.dot(w, vals))


def _integrate_jacobi(f, x1: float, x2: float, cfg: QuadratureConfig):
    """Driver for the zero-drift weight: spectral in the node count for
    analytic data, with the same doubling-based error estimate."""
    n = max(16, cfg.nodes // 4)
    prev = _gauss_jacobi(f, x1, x2, n)
    while True:
        n *= 2
        cur = _gauss_jacobi(f, x1, x2, n)
        err = abs(cur - prev)
        if err <= cfg.rel_tol * abs(cur) + 1e-14:
            return cur, err, {"nodes": n, "rule": "gauss-jacobi"}
        if n >= 4096:
            return cur, err, {"nodes": n, "rule": "gauss-jacobi",
                              "converged": err <= 1e-10 * abs(cur) + 1e-13}
        prev = cur


def _integrate(f, x1: float, x2: float, cfg: QuadratureConfig):
    """Integrate ``f`` over (x1, x2) under the cosine substitution.

    Returns ``(value, err_estimate, diagnostics)``; the error estimate is
    the difference between the two finest node levels.
    """
    if cfg.rule is QuadratureRule.ADAPTIVE_BISECTION:
        return _integrate_adaptive(f, x1, x2, cfg)
    n = cfg.nodes
    prev = _midpoint_chebyshev(f, x1, x2, n)
    while True:
        n *= 2
        cur = _midpoint_chebyshev(f, x1, x2, n)
        err = abs(cur - prev)
        if err <= cfg.rel_tol * abs(cur) + 1e-14:
            return cur, err, {"nodes": n, "rule": "chebyshev"}
        if n >= cfg.max_nodes:
            # spectral rule failed to settle; hand off to adaptive bisection
            value, err2, diag = _integrate_adaptive(f, x1, x2, cfg)
            if err2 < err:
                return value, err2, diag
            return cur, err, {"nodes": n, "rule": "chebyshev", "converged": False}
        prev = cur


def _integrate_adaptive(f, x1: float, x2: float, cfg: QuadratureConfig):
    from scipy.integrate import quad

    mid, hw = 0.5 * (x1 + x2), 0.5 * (x2 - x1)

    def real_part(phi):
        return float(np.real(f(np.array([mid + hw * math.cos(phi)]))[0]) * hw * math.sin(phi))

    def imag_part(phi):
        return float(np.imag(f(np.array([mid + hw * math.cos(phi)]))[0]) * hw * math.sin(phi))

    val_r, err_r = quad(real_part, 0.0, math.pi, limit=200,
                        epsabs=1e-14, epsrel=cfg.rel_tol)
    val_i, err_i = quad(imag_part, 0.0, math.pi, limit=200,
                        epsabs=1e-14, epsrel=cfg.rel_tol)
    return complex(val_r, val_i), err_r + err_i, {"rule": "adaptive"}


def _leading_term(p: StepDistribution, i0: int, j0: int, x: complex,
                  on_cut: bool) -> complex:
    if x == 0.0:
        return 0.0
    approach = kn.Approach.FROM_ABOVE if on_cut else kn.Approach.OFF_CUT
    y0 = kn.branch_Y(p, x, 0, approach).value
    lead = complex(x) ** i0 * complex(y0) ** j0
    return complex(lead.real, 0.0) if on_cut else lead


def _validate_start(i0: int, j0: int):
    if i0 < 1 or j0 < 1:
        raise DomainError("the start (i0, j0) must be interior: i0 >= 1, j0 >= 1")


def h_at_x(p: StepDistribution, i0: int, j0: int, x, g: gl.GluingFunction,
           cfg: QuadratureConfig | None = None) -> HittingResult:
    """Evaluate the exit generating function ``h(x)`` by the contour formula.

    ``x`` may be complex; it must stay off the interval ``(x3, x4)``
    (endpoints included).  For real ``x`` strictly inside ``(x1, x2)``
    the principal-value interpretation is used and the result is real.
    Raises ``PoleOnPath`` when ``w(x)`` collides with the contour values
    of ``w``.
    """
    cfg = cfg or QuadratureConfig()
    _validate_start(i0, j0)
    ctr = _Contour(p, g, cfg)
    x = complex(x)
    x3, x4 = ctr.bp.x[2], ctr.bp.x[3]
    if x.imag == 0.0 and x3 <= x.real <= x4 and not (x3 == x4 == 1.0):
        raise DomainError(
            f"evaluation point {x.real} lies on [x3, x4] = [{x3}, {x4}]")

    if x == 0.0:
        # both Cauchy terms coincide and cancel; only the leading term is left
        return HittingResult(value=0.0, err_estimate=0.0, method="integral",
                             diagnostics={"nodes": 0})

    on_cut = (x.imag == 0.0 and ctr.x1 + 1e-12 < x.real < ctr.x2 - 1e-12)
    if on_cut:
        return _h_principal_value(ctr, p, i0, j0, x.real, cfg)

    pole_at_x = abs(x - ctr.g.pole) <= 1e-13
    wx = None if pole_at_x else complex(gl.w_eval(g, x))
    integral, err, diag = ctr.integrate(i0, j0, wx)
    lead = _leading_term(p, i0, j0, x, on_cut=False)
    value = lead + integral / math.pi
    if x.imag == 0.0:
        value = complex(value.real, 0.0)
    err = err / math.pi + 1e-14 * (1.0 + abs(value))   # roundoff floor
    return HittingResult(value=value if x.imag != 0 else value.real,
                         err_estimate=err, method="integral",
                         diagnostics=diag)


def _h_principal_value(ctr: _Contour, p: StepDistribution, i0: int, j0: int,
                       x: float, cfg: QuadratureConfig) -> HittingResult:
    """h(x) for real x inside the cut: subtracted kernel plus PV logarithm."""
    if ctr.x1 < 0.0:
        # the subtraction at x would leave the removable singularity of the
        # w(0) term unregularized when 0 lies strictly inside the cut
        raise DomainError(
            "principal-value evaluation inside the cut is unsupported when "
            "the cut spans 0 (x1 < 0 < x2)")
    g = ctr.g
    wx = complex(gl.w_eval(g, x))
    w0 = ctr.w0
    phi_x = float(np.real(ctr.phi_density(np.array([x]), i0, j0)[0]))

    def f(t: np.ndarray) -> np.ndarray:
        brk = ctr.bracket(t, wx)
        dens = ctr.phi_density(t, i0, j0)
        tiny = np.abs(t - x) < 1e-12
        safe = np.where(tiny, x + 1e-6, t)
        out = (ctr.phi_density(safe, i0, j0) - phi_x) * ctr.bracket(safe, wx)
        if np.any(tiny):
            h = 1e-7
            dphi = (ctr.phi_density(np.array([x + h]), i0, j0)[0]
                    - ctr.phi_density(np.array([x - h]), i0, j0)[0]) / (2 * h)
            out = np.where(tiny, dphi, out)
        return out

    # the subtracted integrand has |t - x|-limited smoothness, where the
    # adaptive rule is the right tool from the start
    integral, err, diag = _integrate_adaptive(f, ctr.x1, ctr.x2, cfg)
    # PV of the bracket alone integrates to a boundary log ratio; the
    # contribution at the x2 end vanishes because w blows up there
    wa = complex(gl.w_eval(g, ctr.x1))
    pv_log = -math.log(abs((wa - wx) / (wa - w0)))
    lead = _leading_term(p, i0, j0, complex(x), on_cut=True)
    value = lead.real + (integral.real + phi_x * pv_log) / math.pi
    diag = dict(diag)
    diag["principal_value"] = True
    err = abs(err) / math.pi + 1e-14 * (1.0 + abs(value))
    return HittingResult(value=value, err_estimate=err,
                         method="integral", diagnostics=diag)


def h_at_one(p: StepDistribution, i0: int, j0: int, g: gl.GluingFunction,
             cfg: QuadratureConfig | None = None) -> HittingResult:
    """``h(1)``, using the reduced single-term bracket when w(1) = inf.

    The leading term is exactly 1 (``Y0(1) = 1`` in every supported
    regime).
    """
    cfg = cfg or QuadratureConfig()
    _validate_start(i0, j0)
    ctr = _Contour(p, g, cfg)
    _, my = _drift_tuple(p)
    if abs(my) <= DRIFT_TOL:
        wx = None          # w has its pole at x2 = 1
    else:
        wx = complex(gl.w_eval(g, 1.0))
    integral, err, diag = ctr.integrate(i0, j0, wx)
    value = 1.0 + integral.real / math.pi
    diag = dict(diag)
    diag["max_integrand"] = float(np.max(np.abs(ctr.integrand(i0, j0, wx)(
        np.linspace(ctr.x1 + 1e-9, ctr.x2 - 1e-9, 257)))))
    err = err / math.pi + 1e-14 * (1.0 + abs(value))   # roundoff floor
    return HittingResult(value=value, err_estimate=err,
                         method="integral", diagnostics=diag)


def hit_probability(p: StepDistribution, i0: int, j0: int,
                    g: gl.GluingFunction | None = None,
                    cfg: QuadratureConfig | None = None) -> HittingResult:
    """Probability of hitting the vertical axis before the horizontal one.

    Computed as ``1 - h(1)`` through the contour representation.  The
    result must be a probability up to the reported error estimate;
    a violation raises rather than clamps.
    """
    _validate_start(i0, j0)
    if g is None:
        g = gl.build_gluing(p)
    h1 = h_at_one(p, i0, j0, g, cfg)
    value = 1.0 - h1.value
    err = h1.err_estimate
    if not (-err - 1e-12 <= value <= 1.0 + err + 1e-12):
        raise NonConvergence(
            f"integral route produced {value}, outside [0, 1] by more than "
            f"its error estimate {err:.2e}")
    return HittingResult(value=value, err_estimate=err,
                         method="integral", diagnostics=h1.diagnostics)
