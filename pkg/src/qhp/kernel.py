"""Kernel algebra of the walk.

The bivariate kernel ``K(x, y) = x y [sum p[i,j] x^i y^j - 1]`` of a
nearest-neighbor walk is quadratic in each variable:

    K(x, y) = a(x) y^2 + b(x) y + c(x) = at(y) x^2 + bt(y) x + ct(y),

with section polynomials

    a(x) = p[1,1] x^2 + p[0,1] x + p[-1,1]      at(y) = p[1,1] y^2 + p[1,0] y + p[1,-1]
    b(x) = p[1,0] x^2 -       x + p[-1,0]       bt(y) = p[0,1] y^2 -       y + p[0,-1]
    c(x) = p[1,-1] x^2 + p[0,-1] x + p[-1,-1]   ct(y) = p[-1,1] y^2 + p[-1,0] y + p[-1,-1]

and discriminants ``d = b^2 - 4ac`` (degree 3 or 4) and
``dt = bt^2 - 4*at*ct``.  The ordered roots of ``d`` and ``dt`` are the
branch points of the two-valued algebraic functions ``Y(x)`` and ``X(y)``
solving ``K = 0``; everything in this module is in service of evaluating
those branches and the quantities attached to them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import ClassError, DomainError, NonConvergence
from .walk import StepDistribution, _drift_tuple, DRIFT_TOL

_REAL_TOL = 1e-9      # |Im| below this (relative) means a numerically real root
_TIE_TOL = 1e-12      # modulus tie tolerance for root ordering and branch ties


# ---------------------------------------------------------------------------
# Section polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelAlgebra:
    """Coefficient data of the kernel sections, ascending order.

    ``a, b, c`` are the coefficients of the quadratic-in-y sections (as
    polynomials in x); ``at, bt, ct`` the quadratic-in-x sections (in y).
    ``d`` and ``dt`` are the expanded discriminant coefficients.
    """

    a: tuple[float, float, float]
    b: tuple[float, float, float]
    c: tuple[float, float, float]
    at: tuple[float, float, float]
    bt: tuple[float, float, float]
    ct: tuple[float, float, float]
    d: tuple[float, ...]
    dt: tuple[float, ...]

    def a_eval(self, x):
        return npoly.polyval(x, self.a)

    def b_eval(self, x):
        return npoly.polyval(x, self.b)

    def c_eval(self, x):
        return npoly.polyval(x, self.c)

    def at_eval(self, y):
        return npoly.polyval(y, self.at)

    def bt_eval(self, y):
        return npoly.polyval(y, self.bt)

    def ct_eval(self, y):
        return npoly.polyval(y, self.ct)

    def d_eval(self, x):
        return npoly.polyval(x, self.d)

    def dt_eval(self, y):
        return npoly.polyval(y, self.dt)

    def d_deriv(self, x, order: int = 1):
        return npoly.polyval(x, npoly.polyder(self.d, order))

    def dt_deriv(self, y, order: int = 1):
        return npoly.polyval(y, npoly.polyder(self.dt, order))


def algebra(p: StepDistribution) -> KernelAlgebra:
    """Build the section polynomials and discriminants of the kernel."""
    a = (p.prob(-1, 1), p.prob(0, 1), p.prob(1, 1))
    b = (p.prob(-1, 0), -1.0, p.prob(1, 0))
    c = (p.prob(-1, -1), p.prob(0, -1), p.prob(1, -1))
    at = (p.prob(1, -1), p.prob(1, 0), p.prob(1, 1))
    bt = (p.prob(0, -1), -1.0, p.prob(0, 1))
    ct = (p.prob(-1, -1), p.prob(-1, 0), p.prob(-1, 1))

    def disc(u, v, w):
        coeffs = npoly.polysub(npoly.polymul(v, v), 4.0 * npoly.polymul(u, w))
        out = np.zeros(5)
        out[: len(coeffs)] = coeffs
        return tuple(out)

    return KernelAlgebra(a, b, c, at, bt, ct, disc(a, b, c), disc(at, bt, ct))


def kernel_eval(p: StepDistribution, x, y):
    """Evaluate ``K(x, y) = x y [sum p[i,j] x^i y^j - 1]`` directly."""
    acc = -1.0 + 0j if np.iscomplexobj(x) or np.iscomplexobj(y) else -1.0
    acc = acc + sum(prob * x ** di * y ** dj for (di, dj), prob in p.steps)
    return x * y * acc


# ---------------------------------------------------------------------------
# Branch points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BranchPoints:
    """Ordered roots of the discriminants; ``math.inf`` marks a root at
    infinity (degree-three discriminant).

    Roots are ordered by modulus (ties by real part); the second and third
    x-roots are real positive with ``x2 <= 1 <= x3``, and ``x2 == 1``
    exactly when the vertical drift vanishes (similarly ``x3`` and the
    horizontal drift).  ``d_lead``/``dt_lead`` are the leading coefficients
    belonging to the finite roots, so that
    ``d(t) = d_lead * prod(t - r)`` over finite roots ``r``.
    """

    x: tuple[float, float, float, float]
    y: tuple[float, float, float, float]
    d_lead: float
    dt_lead: float

    @property
    def x_finite(self) -> tuple[float, ...]:
        return tuple(r for r in self.x if math.isfinite(r))

    @property
    def y_finite(self) -> tuple[float, ...]:
        return tuple(r for r in self.y if math.isfinite(r))

    def d_factored(self, t):
        """Evaluate ``d`` from its factorization (stable near the roots)."""
        return _factored_eval(self.d_lead, self.x_finite, t)

    def dt_factored(self, y):
        """Evaluate ``dt`` from its factorization (stable near the roots)."""
        return _factored_eval(self.dt_lead, self.y_finite, y)


def _factored_eval(lead, roots, t):
    t = np.asarray(t)
    acc = np.full(t.shape, lead, dtype=t.dtype if t.dtype.kind in "fc" else float)
    for r in roots:
        acc = acc * (t - r)
    return acc


def _trimmed_descending(coeffs_ascending) -> np.ndarray:
    arr = np.asarray(coeffs_ascending, dtype=float)
    scale = np.max(np.abs(arr))
    if scale == 0.0:
        raise DomainError("zero discriminant polynomial")
    keep = len(arr)
    while keep > 1 and abs(arr[keep - 1]) <= 1e-14 * scale:
        keep -= 1
    return arr[:keep][::-1]


def _deflate_at_one(desc: np.ndarray) -> np.ndarray:
    """Synthetic division by ``(x - 1)``; the remainder must be tiny."""
    out = np.empty(len(desc) - 1)
    acc = 0.0
    for k, coeff in enumerate(desc[:-1]):
        acc = acc + coeff
        out[k] = acc
    remainder = acc + desc[-1]
    if abs(remainder) > 1e-10 * np.max(np.abs(desc)):
        raise NonConvergence(
            f"expected a discriminant root at 1, remainder {remainder:.3e}")
    return out


def _polished_simple_roots(desc: np.ndarray, full_asc: np.ndarray) -> np.ndarray:
    """Companion-matrix roots of ``desc`` polished by Newton on ``full_asc``.

    ``desc`` holds a deflated polynomial whose roots are all simple roots
    of the original, so Newton converges quadratically.
    """
    if len(desc) <= 1:
        return np.empty(0)
    roots = np.roots(desc)
    der = npoly.polyder(full_asc)
    for _ in range(6):
        fval = npoly.polyval(roots, full_asc)
        dval = npoly.polyval(roots, der)
        step = np.where(np.abs(dval) > 0, fval / np.where(dval == 0, 1.0, dval), 0.0)
        roots = roots - np.where(np.abs(step) < 1.0, step, 0.0)
    # backward error: |p(r)| relative to the evaluation scale sum |c_k||r|^k,
    # which is what any double-precision root can achieve (a tiny leading
    # coefficient makes the outer root large, inflating absolute residuals)
    scale = npoly.polyval(np.abs(roots), np.abs(full_asc))
    scale = np.where(scale == 0.0, 1.0, scale)   # a zero scale means an exact root
    resid = float(np.max(np.abs(npoly.polyval(roots, full_asc)) / scale))
    if resid > 1e-12:
        raise NonConvergence(
            f"root polishing backward error {resid:.3e} for polynomial {list(full_asc)}")
    bad = np.abs(roots.imag) > _REAL_TOL * (1.0 + np.abs(roots.real))
    if np.any(bad):
        raise NonConvergence(
            f"discriminant produced non-real branch points {roots[bad]} "
            f"for polynomial {list(full_asc)}")
    return roots.real


def _ordered_branch_roots(coeffs_ascending, unit_roots: int):
    """Ordered real roots with ``unit_roots`` copies pinned exactly at 1.

    A vanishing drift forces 1 to be a root of the matching discriminant
    (a double root when both drifts vanish); those copies are deflated
    away before the companion-matrix solve so the remaining simple roots
    stay well conditioned.
    """
    desc = _trimmed_descending(coeffs_ascending)
    degree = len(desc) - 1
    if degree not in (3, 4):
        raise DomainError(
            f"discriminant has degree {degree}; branch-point analysis "
            "requires degree 3 or 4 (walk too degenerate)")
    work = desc
    for _ in range(unit_roots):
        work = _deflate_at_one(work)
    simple = _polished_simple_roots(work, desc[::-1].copy())
    roots = np.concatenate([simple, np.ones(unit_roots)])
    order = sorted(range(len(roots)), key=lambda k: (abs(roots[k]), roots[k]))
    ordered = [float(roots[k]) for k in order]
    while len(ordered) < 4:
        ordered.append(math.inf)
    r1, r2, r3, r4 = ordered
    if not (-1.0 < r1 < 1.0):
        raise NonConvergence(f"first branch point {r1} outside (-1, 1)")
    if not (0.0 <= r2 <= 1.0 + 1e-12 and (r3 >= 1.0 - 1e-12)):
        raise NonConvergence(
            f"inner branch points ({r2}, {r3}) not straddling 1")
    return (r1, r2, r3, r4), float(desc[0])


def branch_points(p: StepDistribution) -> BranchPoints:
    """Locate and order the branch points of ``Y(x)`` and ``X(y)``.

    Requires the nondegeneracy hypotheses (discriminants of degree 3 or
    4).  Roots are found by companion-matrix eigenvalues and polished by
    Newton iterations.  The x-discriminant has a root at 1 exactly when
    the vertical drift vanishes (double when both drifts do), and the
    y-discriminant mirrors this with the horizontal drift; those roots
    are pinned to 1 exactly.
    """
    alg = algebra(p)
    mx, my = _drift_tuple(p)
    zx, zy = abs(mx) <= DRIFT_TOL, abs(my) <= DRIFT_TOL
    x_unit = 2 if (zx and zy) else (1 if zy else 0)
    y_unit = 2 if (zx and zy) else (1 if zx else 0)
    x_roots, d_lead = _ordered_branch_roots(alg.d, x_unit)
    y_roots, dt_lead = _ordered_branch_roots(alg.dt, y_unit)
    return BranchPoints(x=x_roots, y=y_roots, d_lead=d_lead, dt_lead=dt_lead)


# ---------------------------------------------------------------------------
# Branches of Y(x) and X(y)
# ---------------------------------------------------------------------------

class Approach(Enum):
    """Which side of a real cut a branch evaluation refers to."""

    FROM_ABOVE = "above"
    FROM_BELOW = "below"
    OFF_CUT = "off"


@dataclass(frozen=True)
class BranchValue:
    value: complex
    branch: int
    approach: Approach


def _quadratic_roots(a, b, c) -> tuple[complex, complex]:
    """Both roots of ``a z^2 + b z + c``, stable, allowing a == 0.

    A vanishing leading coefficient sends one root to infinity (the
    reciprocal parametrization); both coefficients vanishing is a domain
    error.
    """
    a, b, c = complex(a), complex(b), complex(c)
    scale = max(abs(a), abs(b), abs(c))
    if scale == 0.0:
        raise DomainError("identically zero quadratic")
    if abs(a) <= 1e-15 * scale:
        if abs(b) <= 1e-15 * scale:
            raise DomainError("quadratic with both leading coefficients zero")
        return (-c / b, complex(math.inf, 0.0))
    disc = b * b - 4.0 * a * c
    # a discriminant below roundoff noise is a double root
    if abs(disc) <= 4e-15 * (abs(b) ** 2 + 4.0 * abs(a) * abs(c)):
        disc = 0.0
    sq = np.sqrt(complex(disc))
    # combine b with the square root constructively to avoid cancellation
    if (b.conjugate() * sq).real >= 0.0:
        q = -0.5 * (b + sq)
    else:
        q = -0.5 * (b - sq)
    if q == 0:
        return (0.0 + 0j, 0.0 + 0j)
    return (q / a, c / q)


def _order_pair(pair, on_cut_pair, approach: Approach):
    """Order a branch pair as (index 0, index 1).

    Off the cuts the smaller-modulus root is branch 0 (ties broken by
    real, then imaginary part).  On a real cut the two values are complex
    conjugates with equal modulus and the approach side decides: coming
    from above, branch 0 is ``(-b - i sqrt(-d))/(2a)``.
    """
    z0, z1 = pair
    if abs(abs(z0) - abs(z1)) <= _TIE_TOL * (1.0 + abs(z0) + abs(z1)):
        if on_cut_pair is not None:
            lo, hi = on_cut_pair
            if approach is Approach.FROM_BELOW:
                lo, hi = np.conjugate(lo), np.conjugate(hi)
            return lo, hi
        key = sorted([z0, z1], key=lambda z: (z.real, z.imag))
        return key[0], key[1]
    return (z0, z1) if abs(z0) < abs(z1) else (z1, z0)


def _branch_pair(u, v, w, s, approach: Approach):
    """Ordered branch pair of ``u(s) z^2 + v(s) z + w(s) = 0`` at point s."""
    av, bv, cv = (npoly.polyval(s, u), npoly.polyval(s, v), npoly.polyval(s, w))
    pair = _quadratic_roots(av, bv, cv)
    on_cut_pair = None
    if (
        isinstance(s, (int, float))
        or (np.iscomplexobj(s) and abs(complex(s).imag) == 0.0)
    ):
        disc = complex(bv) ** 2 - 4.0 * complex(av) * complex(cv)
        if disc.real < 0.0 and abs(complex(av)) > 0.0:
            # on a cut: conjugate pair, fixed by the approach side
            root = 1j * math.sqrt(-disc.real)
            on_cut_pair = ((-bv - root) / (2.0 * av), (-bv + root) / (2.0 * av))
    return _order_pair(pair, on_cut_pair, approach)


def branch_Y(p: StepDistribution, x, branch: int = 0,
             approach: Approach = Approach.OFF_CUT) -> BranchValue:
    """Evaluate a branch of ``Y(x)`` (root of ``K(x, .) = 0``).

    Branch 0 is the smaller-modulus solution.  On the real cuts, where the
    two branches are complex conjugates, ``approach`` selects the limit
    side (coming from above, branch 0 has negative imaginary part whenever
    ``a(x) > 0``).
    """
    if branch not in (0, 1):
        raise DomainError("branch must be 0 or 1")
    alg = algebra(p)
    pair = _branch_pair(alg.a, alg.b, alg.c, x, approach)
    return BranchValue(pair[branch], branch, approach)


def branch_X(p: StepDistribution, y, branch: int = 0,
             approach: Approach = Approach.OFF_CUT) -> BranchValue:
    """Evaluate a branch of ``X(y)``; mirror image of :func:`branch_Y`."""
    if branch not in (0, 1):
        raise DomainError("branch must be 0 or 1")
    alg = algebra(p)
    pair = _branch_pair(alg.at, alg.bt, alg.ct, y, approach)
    return BranchValue(pair[branch], branch, approach)


def _conjugate_branches_X(alg: KernelAlgebra, bp: BranchPoints, y):
    """Vectorized conjugate pair ``X0, X1`` for real y inside the y-cut.

    The discriminant is evaluated in factored form: near a double root
    the expanded polynomial loses half its digits, which would push the
    computed points measurably off the curve.
    """
    av = npoly.polyval(y, alg.at)
    bv = npoly.polyval(y, alg.bt)
    disc = bp.dt_factored(y)
    if np.any(disc > 0):
        raise DomainError("sample points must lie inside the cut (dt < 0)")
    root = 1j * np.sqrt(-disc)
    return (-bv - root) / (2.0 * av), (-bv + root) / (2.0 * av)


# ---------------------------------------------------------------------------
# The cut factor mu, opening angle, and second-moment ratio
# ---------------------------------------------------------------------------

def mu(p: StepDistribution, j0: int, x):
    """The polynomial factor through which ``Y0^j0 - Y1^j0`` crosses a cut.

    For real x inside a cut the branch difference satisfies
    ``Y0(x)^j0 - Y1(x)^j0 = -+ 2i sqrt(-d(x)) mu_j0(x)`` (minus when the
    cut is approached from above), with

        mu_j0(x) = (2 a(x))^-j0 * sum_k C(j0, 2k+1) d(x)^k (-b(x))^(j0-2k-1)

    over ``k = 0 .. floor((j0-1)/2)``.
    """
    if j0 < 1:
        raise DomainError("j0 must be a positive integer")
    alg = algebra(p)
    return _mu_eval(alg, j0, x)


def _mu_eval(alg: KernelAlgebra, j0: int, x):
    av = npoly.polyval(x, alg.a)
    bv = npoly.polyval(x, alg.b)
    dv = npoly.polyval(x, alg.d)
    if np.any(np.abs(av) == 0.0):
        raise DomainError("mu is undefined where a(x) = 0")
    acc = np.zeros_like(np.asarray(av, dtype=np.result_type(av, dv, float)))
    for k in range((j0 - 1) // 2 + 1):
        acc = acc + math.comb(j0, 2 * k + 1) * dv ** k * (-bv) ** (j0 - 2 * k - 1)
    return acc / (2.0 * av) ** j0


def second_moments(p: StepDistribution) -> tuple[float, float, float]:
    """``(sum i^2 p, sum j^2 p, sum i j p)``."""
    sxx = math.fsum(di * di * prob for (di, dj), prob in p.steps)
    syy = math.fsum(dj * dj * prob for (di, dj), prob in p.steps)
    sxy = math.fsum(di * dj * prob for (di, dj), prob in p.steps)
    return sxx, syy, sxy


def theta(p: StepDistribution) -> float:
    """Opening angle of the limiting cone of a zero-drift walk.

    ``theta = arccos(-sum(i j p) / sqrt(sum(i^2 p) * sum(j^2 p)))``,
    in (0, pi).  Only defined in the zero-drift regime.
    """
    mx, my = _drift_tuple(p)
    if abs(mx) > DRIFT_TOL or abs(my) > DRIFT_TOL:
        raise ClassError("theta is defined for zero-drift walks only")
    sxx, syy, sxy = second_moments(p)
    if sxx <= 0.0 or syy <= 0.0:
        raise DomainError("theta requires positive second moments")
    ratio = -sxy / math.sqrt(sxx * syy)
    if not -1.0 < ratio < 1.0:
        raise DomainError(f"degenerate step correlation {ratio}")
    return math.acos(ratio)


def beta_ratio(p: StepDistribution) -> float:
    """Ratio of vertical to horizontal step standard deviations,
    ``sqrt(sum(j^2 p) / sum(i^2 p))``."""
    sxx, syy, _ = second_moments(p)
    if sxx <= 0.0 or syy <= 0.0:
        raise DomainError("beta requires positive second moments")
    return math.sqrt(syy / sxx)
