"""Conformal gluing functions and their verification.

A gluing function w maps the domain enclosed by the curve X([y1, y2])
onto a cut plane while identifying conjugate boundary points,
w(t) = w(conj t).  Three explicit constructions cover the walks treated
here; the script builds each one, checks the identity on the curve, and
probes the pole that drives the asymptotics.
"""

import numpy as np

import qhp

cases = [
    ("voter", qhp.preset("voter")),
    ("simple", qhp.preset("simple")),
    ("asym_simple", qhp.preset("asym_simple", (0.2, 0.3, 0.2, 0.3))),
    ("tandem", qhp.preset("tandem", (0.2, 0.4))),
]

print(f"{'walk':12s} {'kind':20s} {'identity mismatch':>18s} {'pole order':>11s} {'estimated':>10s}")
for name, p in cases:
    g = qhp.build_gluing(p)
    rep = qhp.verify_gluing(g, p, 64)
    est = qhp.pole_exponent_estimate(g)
    print(f"{name:12s} {g.kind.value:20s} {rep.max_mismatch:18.2e} "
          f"{g.pole_order:11.4f} {est:10.4f}")

print()
print("simple-pole residue data of the rational kinds:")
for name in ("asym_simple", "tandem"):
    p = dict(cases)[name]
    g = qhp.build_gluing(p)
    print(f"  {name:12s} pole at x2 = {g.pole:.6f}, "
          f"lim (t - x2) w(t) = {qhp.pole_limit_at_x2(g):.6f}")
p = dict(cases)["asym_simple"]
print(f"  geometric-regime ratio beta0 (needs x2 < 1): "
      f"{qhp.beta0_constant(p):.6f}")

print()
print("the classical unit-disc map t/(t-1)^2 glues the unit circle:")
g = qhp.unit_disc_gluing()
phis = np.linspace(0.4, 2.8, 5)
for phi in phis:
    t = complex(np.cos(phi), np.sin(phi))
    v = qhp.w_eval(g, t)
    print(f"  phi = {phi:.2f}: w = {v.real:+.6f} {v.imag:+.1e}i  "
          f"(-1/(4 sin^2(phi/2)) = {-1 / (4 * np.sin(phi / 2) ** 2):+.6f})")

print()
print("walks outside the reproduced constructions signal the boundary:")
generic = qhp.StepDistribution.from_probs({
    (1, 1): 0.05, (1, 0): 0.1, (1, -1): 0.1, (0, -1): 0.25,
    (-1, -1): 0.1, (-1, 0): 0.2, (-1, 1): 0.1, (0, 1): 0.1})
try:
    qhp.build_gluing(generic)
except qhp.NoExplicitGluing as exc:
    print("  NoExplicitGluing:", exc)
    print("  (fall back to the grid solver or Monte Carlo for such walks)")
