from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from chromsplit.coefficients import valuation
from chromsplit.height1 import (
    CHI1,
    ZETA1,
    alpha,
    class_of_crossed,
    cocycle_defect,
    cohomology_Z2x,
    format_tsv,
    integral_cohomology,
    integral_names,
    mod2_dims,
    mod2_names,
    module_K,
    random_units,
    table_rows,
    v1_periodicity_ranks,
)
from chromsplit.modules import InvariantFactors

CROSSED = [alpha(n) for n in (1, 3, 5, 7, 9, -1, -3)] + [alpha(n) for n in (2, 4, 6, 8, -2, -4)] + [ZETA1, CHI1]
units = st.integers(min_value=0, max_value=(1 << 80) - 1).map(lambda x: x | 1)


@settings(max_examples=200)
@given(units, units, st.sampled_from(CROSSED))
def test_cocycle_law(x, y, f):
    assert cocycle_defect(f, x, y).value == 0


def test_cocycle_law_on_negative_units():
    rng = random.Random(7)
    for x in random_units(rng, 20):
        for f in (alpha(3), alpha(4), ZETA1):
            assert cocycle_defect(f, -x, x).value == 0


def test_crossed_hom_validation():
    from chromsplit.height1 import CrossedHom

    with pytest.raises(ValueError):
        CrossedHom("alpha", 2)
    with pytest.raises(ValueError):
        CrossedHom("alpha_div", 3)
    assert alpha(4).name == "alpha_4/4"
    assert alpha(2).name == "alpha_2/3"


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6, 8, -4, -6])
def test_integral_h1_orders(n):
    # oracle: for n even H^1(Z2^x, K_2n) is Z2 / (5^n - 1); for n odd the sign forces order 2
    order = valuation(5 ** abs(n) - 1) if n % 2 == 0 else 1
    assert integral_cohomology(2 * n, 1)[1] == InvariantFactors.cyclic(order)


def test_integral_degree_zero():
    groups = integral_cohomology(0, 3)
    assert groups[0] == InvariantFactors.parse("Z2")
    assert groups[1] == InvariantFactors.parse("Z2")
    assert integral_cohomology(8, 0)[0].is_zero()
    assert all(g.is_zero() for g in integral_cohomology(3, 4))


def test_mod2_dims_window():
    assert mod2_dims(0, 4) == [1, 2, 2, 2, 2]
    assert mod2_dims(1, 4) == [0] * 5


def test_cohomology_independent_of_generator():
    for t in (-6, 0, 4, 8):
        assert integral_cohomology(t, 3) == integral_cohomology(t, 3, generator=45)
        assert cohomology_Z2x(module_K(t, 2), 3) == cohomology_Z2x(module_K(t, 2, generator=45), 3)


def test_v1_periodicity_preserves_dimensions():
    for t in (-4, 0, 6):
        for s, dim_src, rank in v1_periodicity_ranks(t, 4):
            assert dim_src == rank, (t, s)


def test_names():
    assert integral_names(1, 8) == ["alpha_4/4"]
    assert integral_names(2, 6) == ["eta*alpha_2/3"]
    assert mod2_names(1, 4) == ["v1*eta", "v1^2*zeta1"]


def test_class_of_crossed_is_cocycle():
    for f in (alpha(1), alpha(4), ZETA1):
        assert class_of_crossed(f).is_cocycle()


def test_tsv_table():
    text = format_tsv(table_rows([8], 2, None))
    lines = text.splitlines()
    assert lines[0] == "s\tt\tlevel\tinvariant_factors\tnamed_generators"
    assert lines[1] == "1\t8\tZ2\tZ/16\talpha_4/4"
