"""The three decay regimes and their constants.

Zero drift gives an algebraic law A j0 / i0; negative vertical drift a
geometric law B(j0) rho^i0 / i0^(3/2); negative horizontal drift with
balanced vertical steps a square-root law D j0 / sqrt(i0).  The script
tabulates exact grid values against each law and shows the continuum
limit delivering the zero-drift constant A independently.
"""

import math

import qhp

print("=== zero drift: voter walk, P ~ A j0 / i0 ===")
p = qhp.preset("voter")
A = qhp.constant_A(p)
print(f"A = {A:.12f}  (= 3 sqrt(3) / (2 pi) = {3 * math.sqrt(3) / (2 * math.pi):.12f})")
sol = qhp.solve_bracket(p, 700, 700, 1e-9)
print(f"{'i0':>5s} {'P (grid)':>14s} {'P * i0 / A':>12s}")
for i0 in (40, 80, 160):
    val = sol.midpoint(i0, 1)
    print(f"{i0:5d} {val:14.4e} {val * i0 / A:12.6f}")

print()
print("=== geometric regime: asymmetric simple walk ===")
p = qhp.preset("asym_simple", (0.2, 0.3, 0.2, 0.3))
rho = qhp.rho(p)
B1 = qhp.constant_B(p, 1)
print(f"rho = {rho:.10f}   B(1) = {B1:.6f}")
sol = qhp.solve_bracket(p, 320, 220, 1e-10)
print(f"{'i0':>5s} {'P (grid)':>14s} {'P i0^1.5 / (B rho^i0)':>22s}")
for i0 in (40, 60, 80, 100):
    val = sol.midpoint(i0, 1)
    print(f"{i0:5d} {val:14.4e} {val * i0 ** 1.5 / (B1 * rho ** i0):22.6f}")
print("(the ratio approaches 1 with a noticeable 1/i0 correction)")

print()
print("=== square-root regime: tandem queue ===")
p = qhp.preset("tandem", (0.2, 0.4))
D = qhp.constant_D(p)
print(f"D = {D:.12f}  (= sqrt((nu - lam)/(pi nu)) for lam=0.2, nu=0.4)")
sol = qhp.solve_bracket(p, 600, 1200, 1e-9)
print(f"{'i0':>5s} {'P (grid)':>14s} {'P sqrt(i0) / D':>15s}")
for i0 in (50, 100, 200, 400):
    val = sol.midpoint(i0, 1)
    print(f"{i0:5d} {val:14.4e} {val * math.sqrt(i0) / D:15.6f}")

print()
print("=== continuum limit recovers the zero-drift constant ===")
for name, params in [("voter", ()), ("simple", ()), ("nucleosome", (1.0, 2.0))]:
    p = qhp.preset(name, params)
    print(f"{name:12s} A = {qhp.constant_A(p):.12f}   "
          f"sin(theta)/(beta theta) = {qhp.continuum_constant(p):.12f}")

p = qhp.preset("voter")
print()
print("continuum hitting probability along the diagonal x = y:")
for x in (1.0, 3.0, 10.0):
    print(f"  start ({x:.0f}, {x:.0f}): {qhp.continuum_probability(p, x, x):.6f}")
print("  (exactly 1/2 on the diagonal, by symmetry of the voter walk)")
