from __future__ import annotations

import pytest

from chromsplit.finite_groups import (
    RingClass,
    cohomology_finite,
    integral_cohomology_finite,
    omega_matches_presentation,
    periodicity_check,
    presentation_dims,
    quaternion_group,
    resolution,
    restriction_G24_to_C6,
)
from chromsplit.modules import InvariantFactors, is_zero_mod, matmul

DEPTH = 13


def test_quaternion_group_table():
    q = quaternion_group()
    q.check()
    assert q.order == 8


def test_resolution_is_a_complex():
    res = resolution("Q8", 6, 16)
    for n in range(1, 6):
        assert is_zero_mod(matmul(res.full_matrix(n), res.full_matrix(n + 1)), 16)


def test_q8_mod2_dims_match_presentation():
    dims = [cohomology_finite("Q8", "F2", n, DEPTH).mod2_dim() for n in range(13)]
    assert dims == [1, 2, 2, 1] * 3 + [1]
    assert dims == presentation_dims("Q8", 12)


def test_g24_bounded_by_q8():
    for n in range(13):
        g = cohomology_finite("G24", "F2", n, DEPTH).mod2_dim()
        q = cohomology_finite("Q8", "F2", n, DEPTH).mod2_dim()
        assert g <= q
        assert g == presentation_dims("G24", 12)[n]


@pytest.mark.parametrize("G", ["Q8", "G24", "C6"])
def test_orders_independent_of_precision(G):
    for n in range(1, 9):
        assert cohomology_finite(G, 4, n, DEPTH) == cohomology_finite(G, 7, n, DEPTH)


def test_integral_g24():
    groups = integral_cohomology_finite("G24", 8, DEPTH)
    assert groups[0] == InvariantFactors.parse("Z2")
    assert groups[4] == groups[8] == InvariantFactors.parse("Z/8")
    assert all(groups[n].is_zero() for n in (1, 2, 3, 5, 6, 7))


def test_periodicity_and_omega_action():
    assert periodicity_check("Q8", "F2", 5, DEPTH)
    assert omega_matches_presentation()


def test_degree_beyond_resolution_raises():
    with pytest.raises(ValueError):
        cohomology_finite("Q8", "F2", 12, 12)


def test_restriction_is_multiplicative():
    k = RingClass.of("G24/Z2", k=1)
    assert str(restriction_G24_to_C6(k)) == "g^2"
    assert restriction_G24_to_C6(k * k) == restriction_G24_to_C6(k) * restriction_G24_to_C6(k)
    kz = RingClass.of("G24/F2", k=1)
    assert restriction_G24_to_C6(kz * kz) == restriction_G24_to_C6(kz) * restriction_G24_to_C6(kz)
    assert restriction_G24_to_C6(RingClass.of("G24/F2", z=1)) is None
