"""Long exact sequences: smashing with V(0), the fiber of pi - 1, and the splitting accounting.

Windows carry detection names and eta-links as metadata. ``smash_moore``
reads the cofiber sequence S -> S -> V(0) stem by stem and decides the
order-4 extensions from the eta-links; ``fiber_pi_minus_one`` assembles the
homotopy of the fiber of pi - 1 from kernels and cokernels of the action.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .coefficients import STABILITY_MARGIN, valuation, working_precision
from .errors import AmbiguousError, IntegrityError
from .modules import (
    InvariantFactors,
    Subquotient,
    cokernel,
    hstack,
    mat,
    relation_matrix,
    smith_form,
    stabilize,
)
from .windows import UNKNOWN, HomotopyWindow, WindowSummand

BOUNDARY_PREFIX = "zeta2"

# TDSS names of pi_* E^{hS2^1} in the names used at the G2^1 level
HG21_NAMES = {"c0": "chi~", "4*d0": "4e"}
REDUCTION_RULES = (("chi~", "chi^2"),)
LIFT_RULES = (("chi~", "chi"),)


def _rename(name: str, rules: Sequence[tuple[str, str]]) -> str:
    for old, new in rules:
        name = name.replace(old, new)
    return name


def _hg21_name(name: str) -> str:
    return _rename(name, tuple(HG21_NAMES.items()))


def _eta_link(name: str, n: int, stems: dict[int, list], twice: dict[str, str]) -> str | None:
    """Which summand of stem n+1 reduces to eta times ``name``.

    None when the product is twice another class (so zero mod 2); UNKNOWN
    when stem n+1 is outside the window or the product is not named there.
    """
    from .duality import eta_times

    if n + 1 not in stems:
        return UNKNOWN
    product = eta_times(name)
    names = [s.name for s in stems[n + 1]]
    if product in names:
        return _hg21_name(product)
    if product in twice.values():
        return None
    return UNKNOWN


def hg21_window() -> HomotopyWindow:
    """pi_n E^{hG2^1} for -3 <= n <= 0, descended from the TDSS answer over W."""
    from .duality import galois_descend, tdss_run

    res = tdss_run()
    w = HomotopyWindow()
    for n, summands in res.stems.items():
        out = []
        for s in summands:
            name = _hg21_name(s.name)
            twice = res.twice.get(s.detected_by)
            out.append(WindowSummand(
                galois_descend(s.group), name, s.cell[0], _hg21_name(twice) if twice else None,
                _eta_link(s.name, n, res.stems, res.twice),
                _rename(name, REDUCTION_RULES), _rename(name, LIFT_RULES)))
        w.stems[n] = out
    return w


def moore_window() -> HomotopyWindow:
    """pi_n V(0) for -1 <= n <= 2: 0, Z/2{iota}, Z/2{eta}, Z/4{v1} with 2 v1 = eta^2."""
    Z2 = InvariantFactors.cyclic(1)
    return HomotopyWindow({
        -1: [],
        0: [WindowSummand(Z2, "iota", 0, None, "eta", "iota", "iota'")],
        1: [WindowSummand(Z2, "eta", 1, None, None, "eta", "eta'")],
        2: [WindowSummand(InvariantFactors.cyclic(2), "v1", 0, "eta^2", UNKNOWN, "v1", "v1'")],
    })


def smash_moore(w: HomotopyWindow) -> HomotopyWindow:
    """pi_n(X ∧ V(0)) from pi_n X / 2 and pi_{n-1} X [2].

    The lift y of an order-2 class x satisfies 2y = j(x) eta, so the
    extension is nonsplit exactly when the eta-link of x is a class.
    """
    out = HomotopyWindow()
    for n in sorted(w.stems):
        if n - 1 not in w.stems:
            continue
        reductions = {s.name: s for s in w[n]}
        absorbed: set[str] = set()
        summands = []
        for x in w[n - 1]:
            if x.group.free:
                continue
            k = x.order_exponent
            lift = x.lift_name or f"lift({x.name})"
            if k > 1:
                # eta kills 2^(k-1) x, so the lift of the 2-torsion class has order 2
                summands.append(WindowSummand(InvariantFactors.cyclic(1), lift, x.filtration))
                continue
            if x.eta_link == UNKNOWN:
                raise AmbiguousError(f"eta-link of {x.name} in stem {n - 1} is unknown")
            if x.eta_link is None:
                summands.append(WindowSummand(InvariantFactors.cyclic(1), lift, x.filtration))
                continue
            target = reductions.get(x.eta_link)
            if target is None or x.eta_link in absorbed:
                raise IntegrityError(f"eta-link {x.eta_link} of {x.name} is not a summand of stem {n}")
            absorbed.add(x.eta_link)
            summands.append(WindowSummand(InvariantFactors.cyclic(2), lift, x.filtration,
                                          target.reduction_name or target.name))
        for s in w[n]:
            if s.name not in absorbed:
                summands.append(WindowSummand(InvariantFactors.cyclic(1), s.reduction_name or s.name,
                                              s.filtration))
        out.stems[n] = summands
    return out


# ---------------------------------------------------------------------------
# The fiber of pi - 1


@dataclass
class TwistAction:
    """Matrices of pi - 1 on the summand generators of each stem (columns are images)."""

    matrices: dict[int, list[list[int]]] = field(default_factory=dict)

    def matrix(self, n: int, size: int) -> list[list[int]]:
        m = self.matrices.get(n)
        if m is None:
            return [[0] * size for _ in range(size)]
        if len(m) != size or any(len(r) != size for r in m):
            raise ValueError(f"action on stem {n} has the wrong size")
        return m


def _exps(summands: Sequence[WindowSummand], N: int) -> list[int]:
    return [N if s.group.free else s.order_exponent for s in summands]


def _lattice_kernel(B, N: int):
    """Columns spanning the Z2-kernel of an integral matrix known to N digits.

    Reading the kernel off mod 2^N would add spurious classes 2^(N-v) x for
    every diagonal entry 2^v of the Smith form; only exact zeros count here.
    """
    sf = smith_form(B, N)
    zero = [j for j in range(B.shape[1]) if j >= len(sf.exponents) or sf.exponents[j] == N]
    return sf.V[:, zero]


def _ker_coker(summands: Sequence[WindowSummand], A: list[list[int]]) -> tuple[InvariantFactors, InvariantFactors]:
    """Kernel and cokernel of A on ⊕ cyclic summands, certified at two precisions."""
    if not summands:
        return InvariantFactors(), InvariantFactors()
    N = working_precision()
    k = len(summands)

    def at(prec: int) -> tuple[InvariantFactors, InvariantFactors]:
        R = relation_matrix(_exps(summands, prec), prec)
        B = hstack(mat(A), R)
        K = _lattice_kernel(B, prec)[:k]
        ker = Subquotient(K, R, prec).invariant_factors() if K.shape[1] else InvariantFactors()
        return ker, cokernel(B, prec)

    lo, hi = at(N), at(N + STABILITY_MARGIN)
    return stabilize(lo[0], hi[0], N), stabilize(lo[1], hi[1], N)


def _is_diagonal(A: list[list[int]]) -> bool:
    return all(A[i][j] == 0 for i in range(len(A)) for j in range(len(A)) if i != j)


def _diagonal_pieces(summands: Sequence[WindowSummand], A: list[list[int]],
                     prefix: str) -> tuple[list[WindowSummand], list[WindowSummand]]:
    """Named kernel and cokernel summands for a diagonal action."""
    kers, cokers = [], []
    for i, s in enumerate(summands):
        a = A[i][i]
        if s.group.free:
            if a == 0:
                kers.append(WindowSummand(s.group, s.name, s.filtration))
                cokers.append(WindowSummand(s.group, f"{prefix}*{s.name}"))
            else:
                cokers.append(WindowSummand(InvariantFactors.cyclic(valuation(a)), f"{prefix}*{s.name}"))
            continue
        e = s.order_exponent
        v = min(valuation(a, e), e) if a else e
        if v:
            scale = 1 << (e - v)
            kers.append(WindowSummand(InvariantFactors.cyclic(v), s.name if scale == 1 else f"{scale}*{s.name}",
                                      s.filtration))
            twice = f"{prefix}*{s.twice}" if s.twice and v > 1 else None
            cokers.append(WindowSummand(InvariantFactors.cyclic(v), f"{prefix}*{s.name}", None, twice))
    return kers, cokers


def fiber_pi_minus_one(w: HomotopyWindow, action: TwistAction | None = None,
                       prefix: str = BOUNDARY_PREFIX) -> HomotopyWindow:
    """pi_n of the fiber F -> X -> X of pi - 1.

    0 -> coker(pi - 1 on pi_{n+1}) -> pi_n F -> ker(pi - 1 on pi_n) -> 0,
    with the cokernel classes named as ``prefix`` times their source.
    """
    action = action or TwistAction()
    out = HomotopyWindow()
    for n in sorted(w.stems):
        if n + 1 not in w.stems:
            continue
        src, up = w[n], w[n + 1]
        A_n, A_up = action.matrix(n, len(src)), action.matrix(n + 1, len(up))
        ker, _ = _ker_coker(src, A_n)
        _, coker = _ker_coker(up, A_up)
        if _is_diagonal(A_n) and _is_diagonal(A_up):
            kers, _ = _diagonal_pieces(src, A_n, prefix)
            _, cokers = _diagonal_pieces(up, A_up, prefix)
        else:
            kers = [WindowSummand(InvariantFactors.cyclic(e), f"ker[{n}]_{i}") for i, e in enumerate(ker.torsion)]
            kers += [WindowSummand(InvariantFactors((), 1), f"ker[{n}]_free{i}") for i in range(ker.free)]
            cokers = [WindowSummand(InvariantFactors.cyclic(e), f"{prefix}*coker[{n + 1}]_{i}")
                      for i, e in enumerate(coker.torsion)]
            cokers += [WindowSummand(InvariantFactors((), 1), f"{prefix}*coker[{n + 1}]_free{i}")
                       for i in range(coker.free)]
        got_k = sum((s.group for s in kers), InvariantFactors())
        got_c = sum((s.group for s in cokers), InvariantFactors())
        if got_k != ker or got_c != coker:
            raise IntegrityError(f"stem {n}: named pieces {got_k}, {got_c} differ from {ker}, {coker}")
        if ker.torsion and not coker.is_zero():
            out.notes[n] = f"extension of {ker} by {coker} not determined; split form shown"
        out.stems[n] = cokers + kers
    return out


# ---------------------------------------------------------------------------
# The case analysis for pi - 1 on y1


@dataclass(frozen=True)
class TwistCase:
    label: str
    action: int
    boundary_order: int
    consistent: bool


@dataclass(frozen=True)
class CaseAnalysis:
    y1: WindowSummand
    engine_order: int
    engine_class: str
    engine_twice: str | None
    cases: tuple[TwistCase, ...]

    @property
    def resolution(self) -> str:
        alive = [c.label for c in self.cases if c.consistent]
        if len(alive) != 1:
            raise AmbiguousError(f"case analysis leaves {alive}")
        return alive[0]


def twist_case_analysis() -> CaseAnalysis:
    """Decide between (pi - 1) y1 = 0 and (pi - 1) y1 = 2 y1.

    y1 generates pi_{-1}(E^{hG2^1} ∧ V(0)) = Z/4. Each case predicts the
    order of the boundary class zeta2 * y1 in stem -2 of E^{hG2} ∧ V(0); the
    localized ANSS for E^{hG2} ∧ V(0) computes that order independently.
    """
    from .sseq import run_scenario

    v = smash_moore(hg21_window())
    y1 = next(s for s in v[-1] if s.order_exponent == 2)
    run = run_scenario("lk1lk2-v0")
    target = f"{BOUNDARY_PREFIX}*{y1.name}"
    engine = run.window.find(-2, target)
    if engine is None:
        raise IntegrityError(f"{target} is not a generator in stem -2 of the lk1lk2-v0 window")
    cases = []
    for label, scalar in (("(pi-1)y1 = 0", 0), ("(pi-1)y1 = 2y1", 2)):
        index = v[-1].index(y1)
        size = len(v[-1])
        A = [[0] * size for _ in range(size)]
        A[index][index] = scalar
        fib = fiber_pi_minus_one(v, TwistAction({-1: A}))
        boundary = fib.find(-2, target)
        order = boundary.group.order if boundary else 1
        cases.append(TwistCase(label, scalar, order, order == engine.group.order))
    return CaseAnalysis(y1, engine.group.order, engine.name, engine.twice, tuple(cases))


def pi_minus_three() -> HomotopyWindow:
    """The fiber of the trivial action on the E^{hG2^1} window; stem -3 holds 4e and zeta2*chi~."""
    return fiber_pi_minus_one(hg21_window())


# ---------------------------------------------------------------------------
# Splitting accounting


Y_NAMES = {"1": "iota", "zeta2": "zeta2", "chi": "y", "chi^2": "beta(y)",
           "zeta2*chi": "zeta2*y", "zeta2*chi^2": "zeta2*beta(y)"}


@dataclass(frozen=True)
class WedgeSummand:
    label: str
    shift: int
    scenario: str
    names: dict[str, str]


CANDIDATE_WEDGE = (
    WedgeSummand("S^0", 0, "lk1-y", {"1": "iota"}),
    WedgeSummand("S^-1", -1, "lk1-y", {"1": "zeta2"}),
    WedgeSummand("Sigma^-2 V(0)", -2, "lk1-yv0", {"1": "beta(y)", "i1": "y"}),
    WedgeSummand("Sigma^-3 V(0)", -3, "lk1-yv0", {"1": "zeta2*beta(y)", "i1": "zeta2*y"}),
)


@dataclass
class SplittingSummary:
    rows: list[dict]
    target: list[tuple[str, int]]
    rational_degrees: list[int]

    @property
    def rank(self) -> int:
        return len(self.target)

    def identity(self) -> str:
        if not self.rows:
            return "0 = 0"
        return f"{self.rank} = " + " + ".join(str(r["rank"]) for r in self.rows)

    def to_dict(self) -> dict:
        return {"rank": self.rank, "identity": self.identity(), "summands": self.rows,
                "target": [{"name": n, "degree": d} for n, d in self.target],
                "rational_degrees": self.rational_degrees}

    def __str__(self) -> str:
        lines = [f"rank identity: {self.identity()}"]
        for r in self.rows:
            gens = ", ".join(f"{g['name']} ({g['degree']})" for g in r["generators"])
            lines.append(f"  {r['summand']}: rank {r['rank']}: {gens}")
        lines.append("rational sphere summands in degrees " + ", ".join(str(d) for d in self.rational_degrees))
        return "\n".join(lines)


def splitting_summary(target: str | None = "lk1lk2-y",
                      candidates: Sequence[WedgeSummand] = CANDIDATE_WEDGE) -> SplittingSummary:
    """Match the module generators of the target against the candidate wedge summands."""
    if target is None or not candidates:
        return SplittingSummary([], [], [])
    from .duality import adss_run, rationalize
    from .sseq import catalog, module_generators

    tgt = sorted((Y_NAMES.get(n, n), d) for n, d in module_generators(catalog(target)))
    rows, produced = [], []
    for c in candidates:
        gens = [(c.names.get(n, n), d + c.shift) for n, d in module_generators(catalog(c.scenario))]
        produced += gens
        rows.append({"summand": c.label, "rank": len(gens),
                     "generators": [{"name": n, "degree": d} for n, d in gens]})
    if sorted(produced) != tgt:
        missing = sorted(set(tgt) - set(produced))
        extra = sorted(set(produced) - set(tgt))
        raise IntegrityError(f"rank mismatch: target lacks {extra}, candidates lack {missing}")
    rational = rationalize(adss_run("Z2").groups(), extra=(1,))
    degrees = [0] + sorted((-d for d in rational.values()), reverse=True)
    return SplittingSummary(rows, tgt, degrees)
