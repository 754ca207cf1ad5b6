"""The regression suite behind ``chromsplit verify all``: one check per acceptance criterion."""

from __future__ import annotations

import time
from dataclasses import dataclass
from importlib import resources
from typing import Callable

from .modules import InvariantFactors, solve



@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    ok: bool
    detail: str
    seconds: float

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.number:>2} {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _ifs(text: str) -> InvariantFactors:
    return InvariantFactors.parse(text)


def same_class(x, y) -> bool:
    """Whether two cochains of the height-1 total complex are cohomologous."""
    from .height1 import total_differential

    if (x.s, x.t, x.level) != (y.s, y.t, y.level):
        return False
    M = x.coefficient_module()
    mod = 1 << x.modulus_bits()
    diff = [(a - b) % mod for a, b in zip(x.rep, y.rep)]
    if x.s == 0:
        return not any(diff)
    return solve(total_differential(M, x.s - 1), diff, M.level) is not None


# ---------------------------------------------------------------------------
# Criteria


def check_height1_ring() -> tuple[bool, str]:
    from .height1 import mod2_dims

    bad = []
    for t in range(-16, 17):
        want = [0] * 7 if t % 2 else [1] + [2] * 6
        if mod2_dims(t, 6) != want:
            bad.append(t)
    return not bad, "dims match F2[v1^{±1}, eta] ⊗ E(zeta1) for |t| <= 16, s <= 6" if not bad else f"t = {bad}"


def check_bockstein_ladder() -> tuple[bool, str]:
    from .coefficients import valuation
    from .height1 import alpha, bockstein, class_of_crossed, unit_class

    bad = []
    for n in (1, 3, 5, 7, 9):
        if bockstein(1, unit_class(2 * n, 1)).rep != class_of_crossed(alpha(n)).rep:
            bad.append(f"delta(v1^{n})")
    for n in (2, 4, 8):
        i = valuation(n)
        if bockstein(i + 2, unit_class(2 * n, i + 2)).rep != class_of_crossed(alpha(n)).rep:
            bad.append(f"beta^({i + 2})(u^-{n})")
    return not bad, "equal as cochains" if not bad else ", ".join(bad)


def check_sigma() -> tuple[bool, str]:
    from .height1 import ZETA1, CohClass, alpha, class_of_crossed, cup, unit_class

    a = class_of_crossed(alpha(4))
    reduced = same_class(a.reduce(1), cup(unit_class(8, 1), class_of_crossed(ZETA1).reduce(1)))
    sq = cup(a, a)
    square_zero = same_class(sq, CohClass(2, 16, (0, 0), None))
    ok = reduced and square_zero
    return ok, f"alpha_4/4 = v1^4 zeta1 mod 2: {reduced}; alpha_4/4^2 = 0: {square_zero}"


def check_finite_groups() -> tuple[bool, str]:
    from .coefficients import working_precision
    from .finite_groups import cohomology_finite

    depth = 13
    q8 = [cohomology_finite("Q8", "F2", n, depth).mod2_dim() for n in range(13)]
    q8_ok = q8 == [(1, 2, 2, 1)[n % 4] for n in range(13)]
    N = working_precision()
    g24 = [cohomology_finite("G24", N, 4 * m, depth) for m in range(1, 4)]
    g24_ok = all(g == _ifs("Z/8") for g in g24)
    c6_ok = all(cohomology_finite("C6", "F2", n, depth) == _ifs("Z/2") for n in range(13))
    return q8_ok and g24_ok and c6_ok, f"Q8 dims {q8[:8]}...; H^4m(G24, Z/2^{N}) = Z/8: {g24_ok}; C6: {c6_ok}"


def check_adss_f2() -> tuple[bool, str]:
    from .duality import adss_run

    r = adss_run("F2", 8)
    dims = r.dims()[:6]
    collapsed = r.e1.cells == r.e2.cells
    return dims == [1, 1, 2, 4, 3, 2] and collapsed, f"dims {dims}; E1 = E_infinity: {collapsed}"


def check_adss_z2() -> tuple[bool, str]:
    from .duality import adss_run

    r = adss_run("Z2", 8)
    want = ["Z2", "0", "Z/2", "Z2 + Z/2", "Z/8 + Z/2"]
    groups = r.groups()[:5]
    ok = all(g == _ifs(w) for g, w in zip(groups, want)) and r.degrees[2].names() == ["chi~"] \
        and "e" in r.degrees[3].names()
    return ok, "; ".join(f"H^{n} = {d}" for n, d in enumerate(r.degrees[:5]))


def check_rational() -> tuple[bool, str]:
    from .duality import adss_run, rationalize

    groups = adss_run("Z2", 8).groups()
    s21 = rationalize(groups)
    g2 = rationalize(groups, extra=(1,))
    ok = s21 == {"e": 3} and g2 == {"zeta": 1, "e": 3, "zeta*e": 4}
    return ok, f"S2^1: {s21}; G2: {g2}"


def check_tdss() -> tuple[bool, str]:
    from .duality import galois_descend, tdss_run

    r = tdss_run()
    want = {-3: ("W", ["4*d0"]), -2: ("F4", ["c0"]), -1: ("F4", ["eta*c0"]),
            0: ("W + W/4 + W/8", ["unit", "eta*b0", "nu*d0"])}
    ok = all(r.group(n) == _ifs(g) and r.detection(n) == names for n, (g, names) in want.items())
    descent = galois_descend(r.group(0))
    ok = ok and descent == _ifs("Z2 + Z/4 + Z/8")
    return ok, "; ".join(f"pi_{n} = {r.group(n)}" for n in sorted(r.stems)) + f"; descent {descent}"


def check_quaternion() -> tuple[bool, str]:
    from .quaternion import verify

    res = verify(range(4, 17))
    return all(res.values()), ", ".join(f"{k}: {v}" for k, v in res.items())


def check_localized_anss() -> tuple[bool, str]:
    from .sseq import catalog, degeneration_check, run_scenario

    g21 = run_scenario("lk1lk2-v0-g21")
    g2 = run_scenario("lk1lk2-v0")
    cells = degeneration_check(catalog("lk1lk2-v0"), catalog("lk1lk2-v0-g21"), "zeta2")
    ok = g21.ok and g2.ok and bool(g21.collapse) and bool(g2.collapse) and not cells
    detail = (f"four d3 reproduced: {g21.ok}; collapse at E4: {bool(g21.collapse) and bool(g2.collapse)}; "
              f"degeneration mismatches: {len(cells)}")
    return ok, detail


def check_moore() -> tuple[bool, str]:
    from .les import hg21_window, moore_window, pi_minus_three, smash_moore, twist_case_analysis

    v = smash_moore(hg21_window())
    gen = v[-1]
    a = len(gen) == 1 and gen[0].group == _ifs("Z/4") and gen[0].name == "chi" and gen[0].twice == "eta*chi^2"
    b = smash_moore(moore_window()).group(1) == _ifs("Z/4")
    w = pi_minus_three()
    c = w.group(-3) == _ifs("Z2 + Z/2") and set(w.names(-3)) == {"4e", "zeta2*chi~"}
    d = twist_case_analysis().resolution == "(pi-1)y1 = 0"
    return a and b and c and d, (f"pi_-1(E^hG21 V(0)) = {v.describe(-1)}; pi_1(V(0)V(0)) = "
                                 f"{smash_moore(moore_window()).group(1)}; pi_-3 = {w.describe(-3)}; "
                                 f"case analysis: {twist_case_analysis().resolution}")


def check_splitting() -> tuple[bool, str]:
    from .les import splitting_summary

    s = splitting_summary()
    ok = s.identity() == "6 = 1 + 1 + 2 + 2" and s.rational_degrees == [0, -1, -3, -4]
    return ok, f"{s.identity()}; rational degrees {s.rational_degrees}"


def golden_path(name: str):
    return resources.files("chromsplit").joinpath("golden", name)


def figure_documents(figure: str) -> dict[str, str]:
    """Golden file name to rendered content: one ASCII file per figure, one SVG per panel."""
    from .charts import FIGURES, render_charts, render_svg

    charts = FIGURES[figure]()
    docs = {f"{figure}.txt": render_charts(charts)}
    for i, c in enumerate(charts, 1):
        docs[f"{figure}-{i}.svg"] = render_svg(c)
    return docs


def check_charts() -> tuple[bool, str]:
    from .charts import FIGURES

    bad = []
    for fig in FIGURES:
        for name, text in figure_documents(fig).items():
            path = golden_path(name)
            if not path.is_file() or path.read_text() != text:
                bad.append(name)
    return not bad, "all golden files byte-identical" if not bad else f"differs: {', '.join(bad)}"


CRITERIA: tuple[tuple[str, Callable[[], tuple[bool, str]]], ...] = (
    ("height-1 mod-2 ring", check_height1_ring),
    ("Bockstein ladder", check_bockstein_ladder),
    ("sigma detection", check_sigma),
    ("finite groups", check_finite_groups),
    ("ADSS F2", check_adss_f2),
    ("ADSS Z2", check_adss_z2),
    ("rationalization", check_rational),
    ("TDSS", check_tdss),
    ("quaternion identity", check_quaternion),
    ("localized ANSS scenarios", check_localized_anss),
    ("Moore assembly", check_moore),
    ("splitting accounting", check_splitting),
    ("chart regression", check_charts),
)


def run_check(number: int) -> CheckResult:
    name, fn = CRITERIA[number - 1]
    start = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed criterion, reported with its cause
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(number, name, ok, detail, time.perf_counter() - start)


def verify_all() -> list[CheckResult]:
    return [run_check(i) for i in range(1, len(CRITERIA) + 1)]
