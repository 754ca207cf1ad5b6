from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from chromsplit.coefficients import (
    F4Elem,
    OMEGA,
    MSeries,
    Residue2Adic,
    WittElem,
    frobenius,
    project_sign,
    quarter_log,
    valuation,
    working_precision,
)

N = 64
residues = st.integers(min_value=0, max_value=(1 << N) - 1)
one_mod_four = st.integers(min_value=0, max_value=(1 << 70)).map(lambda m: 1 + 4 * m)


def test_valuation():
    assert [valuation(x) for x in (1, 2, 12, -8, 96)] == [0, 1, 2, 3, 5]
    assert valuation(0, cap=7) == 7
    with pytest.raises(ValueError):
        valuation(0)


def test_working_precision_env(monkeypatch):
    monkeypatch.delenv("WORKBENCH_PRECISION", raising=False)
    assert working_precision() == 64
    monkeypatch.setenv("WORKBENCH_PRECISION", "40")
    assert working_precision() == 40
    monkeypatch.setenv("WORKBENCH_PRECISION", "2")
    with pytest.raises(ValueError):
        working_precision()


def test_residue_arithmetic():
    x = Residue2Adic(3, 4)
    assert (x * x).value == 9
    assert (x + 14).value == 1
    assert x.inverse().value == 11  # 3 * 11 = 33 = 1 mod 16
    assert Residue2Adic(-1, 8).signed() == -1
    with pytest.raises(ArithmeticError):
        Residue2Adic(2, 8).inverse()


def test_project_sign():
    assert project_sign(-1, 16) == (-1, Residue2Adic(1, 16))
    eps, y = project_sign(7, 16)
    assert eps == -1 and y.value == (-7) % (1 << 16)


def test_quarter_log_of_five_is_a_unit():
    # log(5)/4 generates the torsion-free part, so it has valuation 0
    assert quarter_log(5, 32).value % 2 == 1
    assert quarter_log(1, 32).value == 0
    with pytest.raises(ValueError):
        quarter_log(3)


@given(residues, residues, st.integers(min_value=1, max_value=N))
def test_reduction_is_a_ring_map(x, y, M):
    a, b = Residue2Adic(x, N), Residue2Adic(y, N)
    assert (a * b).reduce(M) == a.reduce(M) * b.reduce(M)
    assert (a + b).reduce(M) == a.reduce(M) + b.reduce(M)


@given(one_mod_four, one_mod_four)
def test_quarter_log_is_a_homomorphism(x, y):
    assert quarter_log(x * y, N) == quarter_log(x, N) + quarter_log(y, N)


def test_f4_field_axioms():
    nonzero = [z for z in F4Elem.all() if z]
    assert len(nonzero) == 3
    for z in nonzero:
        assert z * z.inverse() == F4Elem.one()
        assert z ** 4 == z
    assert OMEGA * OMEGA + OMEGA + F4Elem.one() == F4Elem.zero()


@given(st.integers(-50, 50), st.integers(-50, 50))
def test_witt_reduction_commutes_with_frobenius(c0, c1):
    w = WittElem.of(c0, c1, precision=16)
    assert frobenius(w).reduce() == frobenius(w.reduce())
    assert frobenius(w.reduce()) == w.reduce() ** 2


def test_witt_omega_relation():
    w = WittElem.of(0, 1, precision=16)
    assert w * w + w + WittElem.of(1, 0, precision=16) == WittElem.of(0, 0, precision=16)


def test_mseries_v1_and_frobenius():
    T = 8
    v1 = MSeries.v1(T)
    assert v1.degree == 2
    assert (v1 ** 2).degree == 4
    assert v1.frobenius() == v1
