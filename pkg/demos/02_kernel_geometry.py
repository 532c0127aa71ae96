"""The kernel of a walk and its branch geometry.

The kernel K(x, y) = xy [sum p,ij x^i y^j - 1] is quadratic in each
variable.  Viewed as a quadratic in y its discriminant d(x) has four
real roots (branch points); between the inner pair the two solution
branches Y0, Y1 are real, and on the outer intervals they form complex
conjugate pairs.  Everything the integral representation needs lives in
this picture.
"""

import numpy as np

import qhp

p = qhp.preset("voter")
alg = qhp.algebra(p)
bp = qhp.branch_points(p)

print("voter section polynomials (ascending coefficients):")
print("  a =", alg.a, " b =", alg.b, " c =", alg.c)
print("branch points x:", tuple(round(v, 6) for v in bp.x))
print("  (the double root at 1 reflects the zero drift)")
print()

x = 0.5   # inside the cut [x1, x2]
above = qhp.branch_Y(p, x, 0, qhp.Approach.FROM_ABOVE).value
below = qhp.branch_Y(p, x, 0, qhp.Approach.FROM_BELOW).value
print(f"on the cut at x = {x}: Y0 from above = {above:.6f}")
print(f"                       Y0 from below = {below:.6f}  (conjugate)")
print(f"kernel residual |K(x, Y0)| = {abs(qhp.kernel_eval(p, x, above)):.2e}")
print()

# the branch difference across the cut factors through mu and sqrt(-d)
j0 = 3
y0 = qhp.branch_Y(p, x, 0, qhp.Approach.FROM_ABOVE).value
y1 = qhp.branch_Y(p, x, 1, qhp.Approach.FROM_ABOVE).value
lhs = y0 ** j0 - y1 ** j0
rhs = -2j * np.sqrt(-alg.d_eval(x)) * qhp.mu(p, j0, x)
print(f"branch-difference identity (j0 = {j0}): |lhs - rhs| = {abs(lhs - rhs):.2e}")
print()

print("cone data of zero-drift walks:")
for name, params in [("voter", ()), ("simple", ()), ("nucleosome", (1.0, 1.0))]:
    q = qhp.preset(name, params)
    print(f"  {name:12s} theta = {qhp.theta(q):.6f}  beta = {qhp.beta_ratio(q):.6f}")

print()
print("tandem walk: the vertical drift vanishes, so x2 = 1 exactly "
      "while x3 > 1:")
print("  x =", tuple(round(v, 6) for v in qhp.branch_points(
    qhp.preset("tandem", (0.2, 0.4))).x))
