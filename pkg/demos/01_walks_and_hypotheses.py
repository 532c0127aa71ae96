"""Walk specifications and their drift regimes.

A walk is a set of nearest-neighbor step probabilities on the quarter
plane.  This script builds the named families, checks the model
hypotheses, and shows how the drift signs sort walks into the regimes
that the rest of the library dispatches on.
"""

import qhp

print("=== named walk families ===")
for name, params in [("voter", ()), ("simple", ()),
                     ("tandem", (0.2, 0.4)), ("nucleosome", (1.0, 2.0)),
                     ("asym_simple", (0.2, 0.3, 0.2, 0.3))]:
    p = qhp.preset(name, params)
    d = qhp.drift(p)
    klass = qhp.classify(p)
    print(f"{name:12s} drift = ({d.mx:+.3f}, {d.my:+.3f})  class = {klass.tag.value}")

print()
print("=== hypothesis flags ===")
# A walk that puts everything on the two main diagonals is degenerate:
# three consecutive zeros appear in its cyclic neighbor list and the
# diagonal mass equals one.
diag = qhp.StepDistribution.from_probs({(1, 1): 0.5, (-1, -1): 0.5})
rep = qhp.validate(diag)
print(f"diagonal-only walk: h2 = {rep.h2}, h3 = {rep.h3}")
for msg in rep.messages:
    print("   ", msg)

# The five-step family (no N, NE, E steps) violates the nondegeneracy
# hypothesis but is still classified, because its geometric decay rate
# is computable.
five = qhp.StepDistribution.from_probs(
    {(-1, 1): 0.3, (-1, 0): 0.2, (0, -1): 0.3, (1, -1): 0.2})
print(f"five-step family: class = {qhp.classify(five).tag.value}, "
      f"rho = {qhp.rho(five):.6f}")

print()
print("=== walk-spec files ===")
text = qhp.dumps_walk(qhp.preset("tandem", (0.2, 0.4)))
print(text)
roundtrip = qhp.loads_walk(text)
print("round trip preserved probabilities:", roundtrip.probs)
