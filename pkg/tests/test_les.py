from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from chromsplit.errors import AmbiguousError
from chromsplit.les import (
    TwistAction,
    fiber_pi_minus_one,
    hg21_window,
    moore_window,
    pi_minus_three,
    smash_moore,
    splitting_summary,
    twist_case_analysis,
)
from chromsplit.modules import InvariantFactors
from chromsplit.windows import UNKNOWN, HomotopyWindow, WindowSummand


def test_hg21_smash_moore():
    v = smash_moore(hg21_window())
    (y1,) = v[-1]
    assert y1.group == InvariantFactors.parse("Z/4")
    assert (y1.name, y1.twice) == ("chi", "eta*chi^2")


def test_moore_smash_moore():
    v = smash_moore(moore_window())
    assert v.group(1) == InvariantFactors.parse("Z/4")
    assert v.group(0) == InvariantFactors.parse("Z/2")


def test_unknown_eta_link_is_refused():
    w = HomotopyWindow({0: [WindowSummand(InvariantFactors.cyclic(1), "x", 0, None, UNKNOWN)], 1: []})
    with pytest.raises(AmbiguousError):
        smash_moore(w)


def test_pi_minus_three():
    w = pi_minus_three()
    assert w.group(-3) == InvariantFactors.parse("Z2 + Z/2")
    assert set(w.names(-3)) == {"4e", "zeta2*chi~"}


def test_case_analysis():
    a = twist_case_analysis()
    assert a.resolution == "(pi-1)y1 = 0"
    assert [c.consistent for c in a.cases].count(True) == 1


def test_fiber_with_nontrivial_action():
    w = HomotopyWindow({0: [WindowSummand(InvariantFactors((), 1), "x", 0)], 1: []})
    out = fiber_pi_minus_one(w, TwistAction({0: [[8]]}))
    assert out.stems == {0: []}
    w2 = HomotopyWindow({-1: [], 0: [WindowSummand(InvariantFactors((), 1), "x", 0)]})
    out2 = fiber_pi_minus_one(w2, TwistAction({0: [[8]]}))
    assert out2.group(-1) == InvariantFactors.parse("Z/8")


def test_splitting_summary():
    s = splitting_summary()
    assert s.identity() == "6 = 1 + 1 + 2 + 2"
    assert s.rational_degrees == [0, -1, -3, -4]
    assert splitting_summary(None).identity() == "0 = 0"
    assert s.to_dict()["rank"] == 6


# ---------------------------------------------------------------------------
# Random windows


@st.composite
def windows(draw):
    """Windows on stems 0..3 with eta-links that point at distinct order-2 classes."""
    stems: dict[int, list[WindowSummand]] = {}
    for n in range(4):
        k = draw(st.integers(0, 3))
        stems[n] = []
        for i in range(k):
            e = draw(st.sampled_from([None, 1, 1, 2, 3]))
            group = InvariantFactors((), 1) if e is None else InvariantFactors.cyclic(e)
            stems[n].append(WindowSummand(group, f"x{n}_{i}", 0, eta_link=None))
    for n in range(3):
        free_targets = [s.name for s in stems[n + 1]]
        linked = []
        for i, s in enumerate(stems[n]):
            if s.order_exponent == 1 and free_targets and draw(st.booleans()):
                target = free_targets.pop(draw(st.integers(0, len(free_targets) - 1)))
                linked.append(WindowSummand(s.group, s.name, 0, eta_link=target))
            else:
                linked.append(s)
        stems[n] = linked
    return HomotopyWindow(stems)


@given(windows())
def test_smash_moore_conserves_order(w):
    out = smash_moore(w)
    for n in out.stems:
        mod2 = w.group(n).mod2_dim()
        two_torsion = len(w.group(n - 1).torsion)
        assert out.group(n).log_order == mod2 + two_torsion


@given(windows())
def test_smash_moore_bockstein_images_have_order_two(w):
    out = smash_moore(w)
    for n in out.stems:
        names = {s.name for s in w[n]}
        for s in out[n]:
            if s.name in names:
                assert s.group == InvariantFactors.cyclic(1)


@given(windows())
def test_fiber_with_zero_action_splits(w):
    out = fiber_pi_minus_one(w)
    for n in out.stems:
        want = w.group(n) + w.group(n + 1)
        got = out.group(n)
        assert got.free == want.free and sum(got.torsion) == sum(want.torsion)
