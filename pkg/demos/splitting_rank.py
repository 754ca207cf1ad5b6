"""Rank bookkeeping for the Y-level splitting.

Counts module generators of the K(1)-localized K(2)-local Y over
F2[v1^{±1}] (x) E(sigma) and matches them against the proposed wedge of
spheres and Moore spectra. A second pass drops one summand to show the
accounting failing loudly.
"""

from __future__ import annotations

from chromsplit.les import CANDIDATE_WEDGE, splitting_summary
from chromsplit.sseq import module_generators, catalog

gens = module_generators(catalog("lk1lk2-y"))
print("generators of the target:", ", ".join(f"{n} in degree {d}" for n, d in gens))
print()
print(splitting_summary())
print()
try:
    splitting_summary(candidates=CANDIDATE_WEDGE[:-1])
except Exception as exc:  # the mismatch is the point of this step
    print(f"without {CANDIDATE_WEDGE[-1].label}: {type(exc).__name__}: {exc}")
