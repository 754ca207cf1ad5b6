"""Acceptance suite: one test per criterion plus the cross-cutting property suites.

Each criterion prints a PASS/FAIL line (visible with ``pytest -s``), and the
same lines come from ``chromsplit verify all``.
"""

from __future__ import annotations

import random
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chromsplit.height1 import alpha
from chromsplit.verify import CRITERIA, run_check, verify_all

NUMBERS = list(range(1, len(CRITERIA) + 1))


@pytest.mark.parametrize("number", NUMBERS, ids=[f"{n:02d}-{CRITERIA[n - 1][0]}" for n in NUMBERS])
def test_criterion(number):
    result = run_check(number)
    print(result.line())
    assert result.ok, result.detail


def test_verify_all_runs_inside_the_time_budget():
    start = time.perf_counter()
    results = verify_all()
    elapsed = time.perf_counter() - start
    assert [r.number for r in results] == NUMBERS
    assert all(r.ok for r in results)
    assert elapsed < 120


# ---------------------------------------------------------------------------
# Property suites


@settings(max_examples=1000)
@given(st.integers(0, 2 ** 32), st.integers(1, 5), st.integers(1, 5))
def test_property_smith_form_round_trip(seed, m, n):
    from chromsplit.modules import identity, mat, matmul, smith_form

    N = 20
    rng = random.Random(seed)
    A = mat([[rng.choice([0, rng.getrandbits(N), 1 << rng.randrange(N)]) for _ in range(n)] for _ in range(m)])
    sf = smith_form(A, N)
    assert np.array_equal(matmul(matmul(sf.U, A, N), sf.V, N), sf.D % (1 << N))
    assert np.array_equal(matmul(sf.Uinv, sf.U, N), identity(m))
    assert np.array_equal(matmul(sf.Vinv, sf.V, N), identity(n))


@settings(max_examples=200)
@given(st.integers(0, (1 << 80) - 1), st.integers(0, (1 << 80) - 1),
       st.sampled_from([1, 3, 5, 7, 9, 2, 4, 6, 8, -3, -4]))
def test_property_cocycle_law(x, y, n):
    from chromsplit.height1 import ZETA1, cocycle_defect

    x, y = x | 1, y | 1
    assert cocycle_defect(alpha(n), x, y).value == 0
    assert cocycle_defect(ZETA1, x, y).value == 0


def test_property_d3_squared_on_every_scenario_window():
    from chromsplit.sseq import SCENARIO_NAMES, build, catalog

    for name in SCENARIO_NAMES:
        sc = catalog(name)
        if sc.builder != "algebra":
            continue
        ss = build(sc)
        for stem in sc.stem_range:
            for s in range(sc.smax + 1):
                for m in sc.presentation.basis(stem, s):
                    assert not ss.d3.apply(ss.d3(m)), (name, stem, s)


def test_property_stem_order_conservation_on_every_window():
    from chromsplit.duality import adss_run
    from chromsplit.modules import InvariantFactors
    from chromsplit.sseq import SCENARIO_NAMES, run_scenario

    for name in SCENARIO_NAMES:
        run = run_scenario(name)
        sc = run.scenario
        if run.ss is not None:
            for stem in sc.stem_range:
                e4 = sum(run.ss.dim(4, stem, s) for s in range(sc.smax + 1))
                assert run.window.group(stem).log_order == e4, (name, stem)
        elif run.integral is not None:
            for stem in sc.stem_range:
                cells = [c.group for (n, s), c in run.integral.e4.items() if n == stem and s <= sc.smax]
                total = sum(cells, InvariantFactors())
                got = run.window.group(stem)
                assert (got.free, sum(got.torsion)) == (total.free, sum(total.torsion)), (name, stem)
    z2 = adss_run("Z2", 8)
    for d in z2.degrees:
        cells = [z2.e2[pq].group for pq in z2.e2.degree(d.n)]
        total = sum(cells, InvariantFactors())
        assert (d.group.free, sum(d.group.torsion)) == (total.free, sum(total.torsion))
