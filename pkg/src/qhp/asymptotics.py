"""Closed-form asymptotic laws for the hitting probability as i0 grows.

Three regimes, all with explicit constants:

zero drift
    ``P ~ A j0 / i0`` with ``A = sqrt(-d''(1)) / (2^(3/2) theta a(1))``,
    which also equals ``sin(theta)/(beta theta)`` (the continuum-limit
    constant; the identity is exercised by the test suite).

negative vertical drift (geometric regime)
    ``P ~ B(j0) rho^i0 / i0^(3/2)`` with ``rho = x2`` and

        B(j0) = x2^(3/2)/(2 sqrt(pi)) * mu_j0(x2) * sqrt(d'(x2)) * (-beta0),
        beta0 = (w(0) - w(1)) / lim_{t->x2} (t - x2) w(t),

    where ``mu_j0(x2) = [j0/(2a(x2))] (c(x2)/a(x2))^((j0-1)/2)``.  The
    factors satisfy ``d'(x2) > 0`` and ``beta0 < 0``; both signs are
    asserted at runtime so any convention mismatch surfaces instead of
    silently flipping the constant.

negative horizontal drift, zero vertical drift
    ``P ~ D j0 / sqrt(i0)`` with ``D = sqrt(d'(1)) / (2 sqrt(pi) a(1))``.

The degenerate five-step family shares the geometric rate ``rho = x2``
(with the discriminant dropping to degree two); its prefactor needs the
ellipse-domain gluing, which is not reproduced here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gluing as gl
from . import kernel as kn
from .errors import ClassError, DomainError, NonConvergence
from .walk import Regime, StepDistribution, classify


def _require(p: StepDistribution, *allowed: Regime) -> Regime:
    tag = classify(p).tag
    if tag not in allowed:
        raise ClassError(
            f"operation requires walk class in {[a.value for a in allowed]}, "
            f"got {tag.value}")
    return tag


def constant_A(p: StepDistribution) -> float:
    """Prefactor of the ``j0/i0`` law for zero-drift walks."""
    _require(p, Regime.ZERO_ZERO)
    alg = kn.algebra(p)
    d2 = float(alg.d_deriv(1.0, 2))
    if d2 >= 0.0:
        raise NonConvergence(f"expected d''(1) < 0 for a zero-drift walk, got {d2}")
    ang = kn.theta(p)
    return math.sqrt(-d2) / (2.0 ** 1.5 * ang * float(alg.a_eval(1.0)))


def constant_D(p: StepDistribution) -> float:
    """Prefactor of the ``j0/sqrt(i0)`` law (negative horizontal drift only)."""
    _require(p, Regime.NEG_ZERO)
    alg = kn.algebra(p)
    d1 = float(alg.d_deriv(1.0, 1))
    if d1 <= 0.0:
        raise NonConvergence(f"expected d'(1) > 0 in this regime, got {d1}")
    return math.sqrt(d1) / (2.0 * math.sqrt(math.pi) * float(alg.a_eval(1.0)))


def rho(p: StepDistribution) -> float:
    """Geometric decay rate of the hitting probability in i0.

    Equals the second branch point ``x2`` for walks with negative
    vertical drift, including the degenerate five-step family (whose
    discriminant has degree two; its smaller-modulus root pair plays the
    same role).
    """
    tag = _require(p, Regime.NEG_NEG, Regime.H2PRIME)
    if tag is Regime.NEG_NEG:
        value = kn.branch_points(p).x[1]
    else:
        alg = kn.algebra(p)
        desc = kn._trimmed_descending(alg.d)
        if len(desc) - 1 != 2:
            raise DomainError(
                f"five-step family should have a quadratic discriminant, "
                f"got degree {len(desc) - 1}")
        roots = np.sort(np.abs(np.roots(desc)))
        value = float(roots[1])
    if not 0.0 < value < 1.0:
        raise NonConvergence(f"geometric rate {value} outside (0, 1)")
    return value


def beta0_constant(p: StepDistribution, g: gl.GluingFunction | None = None) -> float:
    """``(w(0) - w(1)) / lim (t - x2) w(t)``; finite and negative.

    Defined only in the geometric regime, where ``x2 < 1`` keeps the
    evaluation points away from the pole.
    """
    _require(p, Regime.NEG_NEG)
    if g is None:
        g = gl.build_gluing(p)
    limit = gl.pole_limit_at_x2(g)
    w0 = complex(gl.w_eval(g, 0.0))
    w1 = complex(gl.w_eval(g, 1.0))
    if max(abs(w0.imag), abs(w1.imag)) > 1e-10 * (1 + abs(w0) + abs(w1)):
        raise NonConvergence("w(0), w(1) should be real for these walks")
    value = (w0.real - w1.real) / limit
    if value == 0.0:
        raise NonConvergence("beta0 vanished; the gluing degenerated")
    return value


def constant_B(p: StepDistribution, j0: int,
               g: gl.GluingFunction | None = None) -> float:
    """Prefactor of the geometric law ``B(j0) rho^i0 / i0^(3/2)``."""
    _require(p, Regime.NEG_NEG)
    if j0 < 1:
        raise DomainError("j0 must be a positive integer")
    if g is None:
        g = gl.build_gluing(p)
    alg = kn.algebra(p)
    x2 = kn.branch_points(p).x[1]
    a2, c2 = float(alg.a_eval(x2)), float(alg.c_eval(x2))
    d1 = float(alg.d_deriv(x2, 1))
    if d1 <= 0.0:
        raise NonConvergence(
            f"d'(x2) = {d1} <= 0; the discriminant should cross zero upward at x2")
    b0 = beta0_constant(p, g)
    if b0 >= 0.0:
        raise NonConvergence(f"beta0 = {b0} >= 0 violates the sign convention")
    mu_x2 = j0 / (2.0 * a2) * (c2 / a2) ** ((j0 - 1) / 2)
    value = x2 ** 1.5 / (2.0 * math.sqrt(math.pi)) * mu_x2 * math.sqrt(d1) * (-b0)
    if value <= 0.0:
        raise NonConvergence(f"asymptotic prefactor {value} is not positive")
    return value


@dataclass(frozen=True)
class AsymptoticLaw:
    """A fully specified decay law ``constant * j0^? * rho^i0 / i0^power``."""

    regime: Regime
    constant: float
    rho: float
    power: float
    j0_scaling: str            # "linear" or "baked-in"
    j0: int | None = None

    def predicted(self, i0: int, j0: int | None = None) -> float:
        if self.j0_scaling == "linear":
            if j0 is None:
                raise DomainError("this law scales linearly in j0; pass j0")
            lead = self.constant * j0
        else:
            if j0 is not None and j0 != self.j0:
                raise DomainError(f"law was built for j0 = {self.j0}")
            lead = self.constant
        return lead * self.rho ** i0 / i0 ** self.power


def asymptotic_law(p: StepDistribution, j0: int | None = None,
                   g: gl.GluingFunction | None = None) -> AsymptoticLaw:
    """Build the decay law for the walk's regime.

    The geometric regime bakes ``j0`` into its constant and therefore
    requires it (and an explicit gluing); the other regimes are linear
    in ``j0``.
    """
    tag = _require(p, Regime.ZERO_ZERO, Regime.NEG_NEG, Regime.NEG_ZERO)
    if tag is Regime.ZERO_ZERO:
        return AsymptoticLaw(tag, constant_A(p), 1.0, 1.0, "linear")
    if tag is Regime.NEG_ZERO:
        return AsymptoticLaw(tag, constant_D(p), 1.0, 0.5, "linear")
    if j0 is None:
        raise DomainError("the geometric regime needs j0 to build its constant")
    return AsymptoticLaw(tag, constant_B(p, j0, g), rho(p), 1.5, "baked-in", j0)


def asymptotic_probability(p: StepDistribution, i0: int, j0: int) -> float:
    """Evaluate the regime's decay law at ``(i0, j0)``."""
    if i0 < 1 or j0 < 1:
        raise DomainError("start must be interior: i0, j0 >= 1")
    law = asymptotic_law(p, j0=j0)
    return law.predicted(i0, j0 if law.j0_scaling == "linear" else None)


# ---------------------------------------------------------------------------
# Continuum limit (zero drift)
# ---------------------------------------------------------------------------

def continuum_probability(p: StepDistribution, x: float, y: float) -> float:
    """Hitting probability of the diffusive limit started at ``(x, y)``.

    ``(1/theta) * atan2(sin(theta) y, beta x + cos(theta) y)``; the
    two-argument arctangent keeps the value in (0, 1) across obtuse
    cone angles.
    """
    _require(p, Regime.ZERO_ZERO)
    if x <= 0.0 or y <= 0.0:
        raise DomainError("continuum start must have x > 0, y > 0")
    ang = kn.theta(p)
    beta = kn.beta_ratio(p)
    return math.atan2(math.sin(ang) * y, beta * x + math.cos(ang) * y) / ang


def continuum_constant(p: StepDistribution) -> float:
    """``sin(theta)/(beta theta)``: the ``y/x`` prefactor of the continuum
    limit, equal to the discrete-walk constant ``A``."""
    _require(p, Regime.ZERO_ZERO)
    ang = kn.theta(p)
    return math.sin(ang) / (kn.beta_ratio(p) * ang)
