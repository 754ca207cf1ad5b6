"""From the duality resolution to pi_-1 of E^hG21 smashed with V(0).

The algebraic duality spectral sequence gives H*(S2^1; Z2), the topological
one gives the homotopy of E^hS2^1 near stem 0. Descending to Z2 and reading
the cofiber sequence for V(0) produces the Z/4 whose extension is forced by
an eta-link. The last step replays the case analysis for pi - 1 on y1.
"""

from __future__ import annotations

from chromsplit.duality import adss_run, tdss_run
from chromsplit.les import hg21_window, pi_minus_three, smash_moore, twist_case_analysis

print("H^n(S2^1; Z2):")
for d in adss_run("Z2", 8).degrees[:6]:
    print(f"  n = {d.n}: {d}")

tdss = tdss_run()
print("\npi_n E^hS2^1 over W:")
for n in sorted(tdss.stems):
    print(f"  n = {n}: {tdss.group(n)}  detected by {', '.join(tdss.detection(n))}")

w = hg21_window()
print("\nafter Galois descent:")
print(w)

v = smash_moore(w)
print("\nsmashed with V(0):")
print(v)

print("\nthe fiber of the trivial twist, stem -3:", pi_minus_three().describe(-3))

case = twist_case_analysis()
for c in case.cases:
    verdict = "consistent" if c.consistent else "contradicts the engine"
    print(f"  case {c.label}: boundary class of order 2^{c.boundary_order}, {verdict}")
print("resolution:", case.resolution)
