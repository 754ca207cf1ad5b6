from __future__ import annotations

import pytest

from chromsplit.duality import (
    adss_run,
    eta_times,
    galois_descend,
    rationalize,
    sparsity_conflicts,
    tdss_e1,
    tdss_e2,
    tdss_run,
)
from chromsplit.modules import InvariantFactors

DEPTH = 8


@pytest.fixture(scope="module")
def f2():
    return adss_run("F2", DEPTH)


@pytest.fixture(scope="module")
def z2():
    return adss_run("Z2", DEPTH)


def test_f2_collapses_at_e1(f2):
    assert f2.e1.cells == f2.e2.cells
    assert f2.dims()[:6] == [1, 1, 2, 4, 3, 2]


def test_z2_groups_and_names(z2):
    want = ["Z2", "0", "Z/2", "Z2 + Z/2", "Z/8 + Z/2"]
    assert [g for g in z2.groups()[:5]] == [InvariantFactors.parse(w) for w in want]
    assert z2.degrees[2].names() == ["chi~"]
    assert "e" in z2.degrees[3].names()


def test_universal_coefficients_between_f2_and_z2(f2, z2):
    groups = z2.groups()
    for n in range(DEPTH):
        expected = groups[n].mod2_dim() + len(groups[n + 1].torsion)
        assert f2.dims()[n] == expected, n


def test_page_monotonicity(z2):
    for pq, cell in z2.e1.cells.items():
        e2 = z2.e2[pq].group
        if cell.group.free:
            continue
        assert cell.group.log_order >= e2.log_order
        assert not e2.free


def test_only_d1_is_times_two(z2):
    changed = [pq for pq in z2.e1.cells if z2.e1[pq].group != z2.e2[pq].group]
    assert set(changed) <= {(1, 0), (2, 0)}
    assert z2.e2[2, 0].group == InvariantFactors.parse("Z/2")
    assert not sparsity_conflicts(z2.e2)


def test_stem_order_conservation(z2):
    for d in z2.degrees:
        torsion_order = sum(z2.e2[pq].group.log_order for pq in z2.e2.degree(d.n) if not z2.e2[pq].group.free)
        free_rank = sum(z2.e2[pq].group.free for pq in z2.e2.degree(d.n))
        assert d.group.free == free_rank
        assert sum(d.group.torsion) == torsion_order


def test_rationalization(z2):
    assert rationalize(z2.groups()) == {"e": 3}
    assert rationalize(z2.groups(), extra=(1,)) == {"zeta": 1, "e": 3, "zeta*e": 4}
    with pytest.raises(ValueError):
        rationalize([InvariantFactors.parse("Z2"), InvariantFactors.parse("Z2 + Z2")])


def test_tdss_answer():
    r = tdss_run()
    assert r.group(-3) == InvariantFactors.parse("W")
    assert r.group(-2) == InvariantFactors.parse("F4")
    assert r.group(-1) == InvariantFactors.parse("F4")
    assert r.group(0) == InvariantFactors.parse("W + W/4 + W/8")
    assert r.detection(0) == ["unit", "eta*b0", "nu*d0"]
    assert r.twice == {"eta*b0": "eta^2*c0"}


def test_tdss_pages_keep_unknown_cells_symbolic():
    assert tdss_e1().unknown
    e2 = tdss_e2()
    assert all(pq not in e2.cells or e2.cells[pq].names for pq in e2.unknown)


def test_galois_descent():
    assert galois_descend(InvariantFactors.parse("W + W/4 + W/8")) == InvariantFactors.parse("Z2 + Z/4 + Z/8")
    assert galois_descend(InvariantFactors.parse("F4")) == InvariantFactors.parse("Z/2")


def test_eta_times():
    assert eta_times("eta*b0") == "eta^2*b0"
    assert eta_times("c0", 2) == "eta^2*c0"
