from __future__ import annotations

import copy
import json
from importlib import resources

import pytest
from hypothesis import given, strategies as st

from chromsplit.coefficients import valuation
from chromsplit.errors import IntegrityError, UndeterminedError
from chromsplit.modules import InvariantFactors
from chromsplit.sseq import (
    SCENARIO_NAMES,
    AlgebraPresentation,
    Generator,
    Scenario,
    build,
    catalog,
    certify_collapse,
    degeneration_check,
    load_scenario,
    module_generators,
    period_dimension,
    propagate_d3,
    run_scenario,
)

ALGEBRA = [n for n in SCENARIO_NAMES if catalog(n).builder == "algebra"]


def _raw(name: str) -> dict:
    return json.loads(resources.files("chromsplit").joinpath("scenarios", f"{name}.json").read_text())


@pytest.fixture(scope="module")
def runs():
    return {name: run_scenario(name) for name in SCENARIO_NAMES}


@pytest.mark.parametrize("name", SCENARIO_NAMES)
def test_scenario_matches_expected(runs, name):
    assert runs[name].mismatches == []


def test_presentation_arithmetic():
    alg = AlgebraPresentation([Generator("eta", 1, 2), Generator("v1", 0, 2, invertible=True),
                               Generator("zeta1", 1, 0)], ["zeta1^2"], ["eta", "v1^4", "zeta1"])
    assert alg.is_zero(alg.monomial("zeta1^2"))
    assert alg.cell_of(alg.monomial("eta^2*v1")) == (4, 2)
    p = alg.parse("eta + eta")
    assert not p
    assert alg.format(alg.mul(alg.parse("v1^-1"), alg.parse("v1*eta"))) == "eta"
    with pytest.raises(ValueError):
        alg.monomial("nu")


def test_lk1lk2_v0_ledger_has_chi_differential(runs):
    entries = [e for e in runs["lk1lk2-v0"].ledger if e["class"] == "v1*chi"]
    assert entries and entries[0]["justification"].startswith("d3 = eta^2*chi^2")


def test_undetermined_class_raises():
    d = _raw("lk1-v0")
    d["permanent"] = ["1"]
    with pytest.raises(UndeterminedError):
        propagate_d3(Scenario.from_dict(d))


def test_seed_contradicting_the_universal_rule_raises():
    d = _raw("lk1-v0")
    d["seeds"] = [{"source": "v1^2", "target": "0"}]
    with pytest.raises(IntegrityError):
        propagate_d3(Scenario.from_dict(d))


def test_unkilled_class_in_filtration_nine_blocks_collapse():
    d = _raw("lk1-y")
    d["generators"].append({"name": "x", "s": 9, "t": 10})
    d["relations"].append("x^2")
    d["permanent"].append("x")
    cert = certify_collapse(Scenario.from_dict(d))
    assert not cert
    assert any("s 9" in r for r in cert.reasons)


def test_missing_vanishing_bound_blocks_collapse():
    d = _raw("lk1-v0")
    d.pop("vanishing_bound")
    assert not certify_collapse(Scenario.from_dict(d))


def test_scenario_file_by_path(tmp_path):
    path = tmp_path / "custom.json"
    d = _raw("lk1-y")
    d["name"] = "custom"
    path.write_text(json.dumps(d))
    assert load_scenario(path).name == "custom"
    with pytest.raises(KeyError):
        load_scenario("no-such-scenario")


def test_zeta2_degeneration():
    assert degeneration_check(catalog("lk1lk2-v0"), catalog("lk1lk2-v0-g21"), "zeta2") == []


def test_module_generators_of_y():
    gens = module_generators(catalog("lk1lk2-y"))
    assert len(gens) == 6 == period_dimension(catalog("lk1lk2-y")) // 2


# ---------------------------------------------------------------------------
# Properties over every scenario window


@pytest.mark.parametrize("name", ALGEBRA)
def test_d3_squared_vanishes(name):
    sc = catalog(name)
    ss = build(sc)
    ss.check_d3_squared(sc.stem_range, sc.smax)
    for stem in sc.stem_range:
        for s in range(sc.smax + 1):
            for m in sc.presentation.basis(stem, s):
                assert not ss.d3.apply(ss.d3(m))


def test_integral_d3_targets_support_no_differential(runs):
    integral = runs["lk1-sphere"].integral
    sources = {src for src, _, _, _ in integral.differentials}
    targets = {tgt for _, _, tgt, _ in integral.differentials}
    assert not sources & targets


@given(st.sampled_from(ALGEBRA), st.data())
def test_leibniz_for_permanent_units(name, data):
    sc = catalog(name)
    ss = build(sc)
    alg = sc.presentation
    stem = data.draw(st.sampled_from(list(sc.stem_range)))
    s = data.draw(st.integers(0, sc.smax))
    basis = alg.basis(stem, s)
    if not basis:
        return
    m = data.draw(st.sampled_from(basis))
    for name_u in sc.data.get("permanent_algebra", ()):
        u = alg.monomial(name_u)
        um = alg.mul_mono(u, m)
        lhs = ss.d3(um) if um is not None else frozenset()
        assert lhs == alg.scale(u, ss.d3(m))


@pytest.mark.parametrize("name", [n for n in ALGEBRA])
def test_stem_order_conservation(runs, name):
    run = runs[name]
    sc = run.scenario
    for stem in sc.stem_range:
        e4 = sum(run.ss.dim(4, stem, s) for s in range(sc.smax + 1))
        assert run.window.group(stem).log_order == e4, stem


def test_integral_stem_order_conservation(runs):
    run = runs["lk1-sphere"]
    for stem in run.scenario.stem_range:
        cells = [c.group for (n, s), c in run.integral.e4.items() if n == stem and s <= run.scenario.smax]
        total = sum(cells, InvariantFactors())
        assert run.window.group(stem).free == total.free
        assert sum(run.window.group(stem).torsion) == sum(total.torsion)


def test_sigma_squared_vanishes():
    for name in ALGEBRA:
        sc = catalog(name)
        sigma = sc.data.get("sigma")
        if sigma and sc.presentation is not None:
            p = sc.presentation.parse(sigma)
            assert not sc.presentation.mul(p, p)


# ---------------------------------------------------------------------------
# Independent oracle for the K(1)-local sphere: the fiber of psi^3 - 1 on KO


def _ko(n: int) -> str:
    return {0: "Z", 1: "Z/2", 2: "Z/2", 4: "Z"}.get(n % 8, "0")


def _psi_minus_one_valuation(n: int) -> int | None:
    """2-adic valuation of psi^3 - 1 on pi_n KO; None when it is the zero map."""
    if n % 4 == 0:
        return None if n == 0 else valuation(3 ** abs(n // 2) - 1)
    return None


def ko_fiber_orders(n: int) -> tuple[int, int]:
    """(free rank, log2 of torsion order) of pi_n of the fiber of psi^3 - 1."""
    free = torsion = 0
    # cokernel of psi^3 - 1 on pi_{n+1}
    up, v = _ko(n + 1), _psi_minus_one_valuation(n + 1)
    if up == "Z":
        free, torsion = (1, 0) if v is None else (0, v)
    elif up == "Z/2":
        torsion += 1
    # kernel on pi_n
    here, v = _ko(n), _psi_minus_one_valuation(n)
    if here == "Z" and v is None:
        free += 1
    elif here == "Z/2":
        torsion += 1
    return free, torsion


def test_lk1_sphere_matches_ko_fiber(runs):
    w = runs["lk1-sphere"].window
    for n in catalog("lk1-sphere").stem_range:
        g = w.group(n)
        assert (g.free, sum(g.torsion)) == ko_fiber_orders(n), n


def test_lk1_sphere_cyclic_where_the_fiber_sequence_forces_it(runs):
    w = runs["lk1-sphere"].window
    assert w.group(3) == InvariantFactors.parse("Z/8")
    assert w.group(7) == InvariantFactors.parse("Z/16")
    assert w.group(11) == InvariantFactors.parse("Z/8")
