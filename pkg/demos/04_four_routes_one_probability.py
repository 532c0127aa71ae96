"""One probability, four independent routes.

The probability that the walk hits the vertical axis before the
horizontal one is computed by:

  dp        exact Dirichlet solve on a truncated grid, with the far
            boundary clamped both ways for a rigorous bracket;
  integral  the contour representation through the gluing function;
  asymptotic the closed-form decay law (large i0);
  mc        direct simulation with a censoring-aware bracket.

The four must agree within their stated errors; this is the package's
core consistency loop.
"""

import time

import qhp

cases = [
    ("voter", qhp.preset("voter"), (200, 200)),
    ("tandem", qhp.preset("tandem", (0.2, 0.4)), (200, 400)),
    ("asym_simple", qhp.preset("asym_simple", (0.2, 0.3, 0.2, 0.3)), (200, 160)),
]

start = (8, 3)
print(f"start (i0, j0) = {start}")
print(f"{'walk':12s} {'dp (bracket midpoint)':>22s} {'integral':>14s} "
      f"{'asymptotic':>12s} {'mc point':>10s}")
for name, p, grid in cases:
    t0 = time.perf_counter()
    sol = qhp.solve_bracket(p, grid[0], grid[1], 1e-10)
    lo, hi = sol.bracket(*start)
    dp_val = 0.5 * (lo + hi)
    int_val = qhp.hit_probability(p, *start).value
    try:
        as_val = f"{qhp.asymptotic_probability(p, *start):12.8f}"
    except qhp.QhpError:
        as_val = "         n/a"
    est = qhp.simulate(p, *start, n_paths=200_000, seed=1, max_steps=500_000)
    print(f"{name:12s} {dp_val:22.12f} {int_val:14.10f} {as_val} "
          f"{est.point:10.6f}   ({time.perf_counter() - t0:.1f}s)")

print()
print("brackets in action: the dp bracket is rigorous, the mc bracket")
print("counts censored paths both ways, the integral reports a")
print("quadrature error estimate:")
p = qhp.preset("voter")
sol = qhp.solve_bracket(p, 200, 200, 1e-10)
lo, hi = sol.bracket(*start)
r = qhp.hit_probability(p, *start)
est = qhp.simulate(p, *start, n_paths=200_000, seed=1, max_steps=500_000)
print(f"  dp bracket     [{lo:.10f}, {hi:.10f}]  width {hi - lo:.1e}")
print(f"  integral       {r.value:.12f} +- {r.err_estimate:.1e}")
print(f"  mc ci95        [{est.ci95[0]:.6f}, {est.ci95[1]:.6f}]  "
      f"censored {est.censored}")

print()
print("the exit distribution resolves where the walk lands:")
ex = qhp.exit_distribution(p, 3, 2, 300)
print(f"  mass on horizontal axis: {ex.h[1:].sum():.6f}")
print(f"  mass on vertical axis:   {ex.htilde[1:].sum():.6f}")
print(f"  mass at the origin:      {ex.h00:.6f}")
print(f"  truncation loss:         {ex.far_loss:.2e}")
print(f"  first horizontal masses: {[round(float(v), 5) for v in ex.h[1:6]]}")
