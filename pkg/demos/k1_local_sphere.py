"""Walk through the K(1)-local sphere at p = 2.

Builds E2 from the integral cohomology of Z2^x, runs the encoded d3 and the
order-doubling extensions, then compares every stem with the fiber of
psi^3 - 1 on KO computed by hand.
"""

from __future__ import annotations

from chromsplit.charts import figure_3, render_ascii
from chromsplit.coefficients import valuation
from chromsplit.sseq import run_scenario


def ko_fiber(n: int) -> str:
    ko = {0: "Z", 1: "Z/2", 2: "Z/2", 4: "Z"}
    parts = []
    up = ko.get((n + 1) % 8)
    if up == "Z":
        parts.append("Z2" if n + 1 == 0 else f"Z/{2 ** valuation(3 ** abs((n + 1) // 2) - 1)}")
    elif up:
        parts.append("Z/2")
    here = ko.get(n % 8)
    if here == "Z" and n == 0:
        parts.append("Z2")
    elif here == "Z/2":
        parts.append("Z/2")
    return " (+) ".join(parts) or "0"


def main() -> None:
    run = run_scenario("lk1-sphere")
    print("d3 differentials in the window:", len(run.integral.differentials))
    for a, b in run.integral.links:
        print(f"  exotic extension: twice {a} is {b}")
    print()
    print(f"{'stem':>4}  {'engine':<24} fiber of psi^3 - 1 (orders only)")
    for n in run.scenario.stem_range:
        print(f"{n:>4}  {run.window.describe(n):<24} {ko_fiber(n)}")
    print()
    print(render_ascii(figure_3()[1]))


if __name__ == "__main__":
    main()
