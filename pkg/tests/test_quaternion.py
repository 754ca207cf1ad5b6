from __future__ import annotations

import pytest

from chromsplit.coefficients import MSeries
from chromsplit.quaternion import (
    act,
    fixes_v1,
    frobenius_symmetry,
    ideal_check,
    quaternion_norm_sum,
    reduce_c4,
    v1v2_identity,
    verify,
)


@pytest.mark.parametrize("T", range(4, 17))
def test_norm_sum_of_v1v2_is_v1_fourth(T):
    assert v1v2_identity(T)
    assert quaternion_norm_sum(MSeries.v1(T) * MSeries.v2(T)) == MSeries.v1(T) ** 4


def test_reduce_c4():
    c4 = reduce_c4()
    assert c4 == MSeries.v1(c4.T) ** 4
    assert c4.degree == 8


def test_action_properties():
    assert fixes_v1()
    assert ideal_check()
    assert frobenius_symmetry()
    T = 8
    assert act("i", MSeries.v1(T)) == MSeries.v1(T)


def test_verify_reports_every_identity():
    res = verify(range(4, 8))
    assert set(res) == {"norm_sum_v1v2", "reduce_c4", "fixes_v1", "ideal_2_u1^4", "frobenius_symmetry"}
    assert all(res.values())
