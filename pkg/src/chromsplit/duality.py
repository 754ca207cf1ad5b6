"""The algebraic and topological duality spectral sequences for S2^1.

The algebraic one has E1^{p,q} = H^q(F_p; M) with columns G24, C6, C6, G24
and d1 given by multiplication by 0, 2, 0 between consecutive columns
(constant coefficients kill the augmentation-ideal terms of the resolution
maps). The topological one has E1^{p,q} = pi_q of the fixed-point spectra,
read off from encoded tables, and converges to pi_{q-p} E^{hS2^1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .coefficients import STABILITY_MARGIN, valuation, working_precision
from .errors import AmbiguousError, IntegrityError, UndeterminedError
from .finite_groups import DEFAULT_DEPTH as GROUP_DEPTH
from .finite_groups import cohomology_finite, integral_cohomology_finite
from .modules import (
    CochainComplex,
    InvariantFactors,
    Matrix,
    Subquotient,
    identity,
    lattice_homology_stable,
    mat,
    stabilize,
    zeros,
)

COLUMNS = ("G24", "C6", "C6", "G24")
GENERATOR_NAMES = ("a0", "b0", "c0", "d0")
DEFAULT_ADSS_DEPTH = 8
SERIES_TRUNCATION = 8
TDSS_STEMS = range(-3, 1)


# ---------------------------------------------------------------------------
# Shared records


@dataclass(frozen=True)
class Cell:
    group: InvariantFactors
    names: tuple[str, ...] = ()

    def is_zero(self) -> bool:
        return self.group.is_zero()


ZERO_CELL = Cell(InvariantFactors())


@dataclass(frozen=True)
class LedgerEntry:
    page: int
    cell: tuple[int, int]
    cls: str
    event: str
    justification: str

    def to_dict(self) -> dict:
        return {"page": self.page, "cell": list(self.cell), "class": self.cls,
                "event": self.event, "justification": self.justification}


@dataclass(frozen=True)
class Summand:
    """A cyclic summand of an assembled group with the class that detects it."""

    group: InvariantFactors
    name: str
    cell: tuple[int, int]
    detected_by: str

    def __str__(self) -> str:
        return f"{self.group}{{{self.name}}}"


def _sum(summands: Iterable[Summand], ring: str = "Z2") -> InvariantFactors:
    out = InvariantFactors.zero(ring)
    for s in summands:
        out = out + s.group
    return out


def _cyclic_parts(group: InvariantFactors) -> list[InvariantFactors]:
    parts = [InvariantFactors((), 1, group.ring) for _ in range(group.free)]
    parts += [InvariantFactors((e,), 0, group.ring) for e in sorted(group.torsion, reverse=True)]
    return parts


def _mono(*factors: tuple[str, int]) -> str:
    parts = [x if e == 1 else f"{x}^{e}" for x, e in factors if e]
    return "*".join(parts) or "1"


def _times(mono: str, x: str) -> str:
    if mono == "1":
        return x
    if x == "1":
        return mono
    return f"{mono}*{x}"


# ---------------------------------------------------------------------------
# Algebraic duality spectral sequence


@dataclass(frozen=True)
class ResolutionDatum:
    """Columns of the duality resolution and the scalar by which d1 acts."""

    columns: tuple[str, ...] = COLUMNS
    d1_scalars: tuple[int, ...] = (0, 2, 0)

    def __post_init__(self) -> None:
        if len(self.columns) != 4 or len(self.d1_scalars) != 3:
            raise ValueError("a duality resolution has exactly four columns")
        for a, b in zip(self.d1_scalars, self.d1_scalars[1:]):
            if a * b:
                raise IntegrityError("d1 composites do not vanish")
        for p, c in enumerate(self.d1_scalars):
            if c and self.columns[p] != self.columns[p + 1]:
                raise ValueError("a scalar d1 needs equal source and target columns")

    def d1_matrix(self, p: int, src: int, tgt: int) -> Matrix:
        c = self.d1_scalars[p]
        if not c or not src or not tgt:
            return zeros(tgt, src)
        if src != tgt:
            raise IntegrityError("scalar d1 between cells of different rank")
        return identity(src) * c


DUALITY_RESOLUTION = ResolutionDatum()


@dataclass
class ADSSPage:
    """One page of the algebraic duality spectral sequence, rows q <= depth."""

    coefficients: str
    r: int
    depth: int
    cells: dict[tuple[int, int], Cell] = field(default_factory=dict)

    def __getitem__(self, pq: tuple[int, int]) -> Cell:
        return self.cells.get(pq, ZERO_CELL)

    def nonzero(self) -> list[tuple[int, int]]:
        return sorted(pq for pq, c in self.cells.items() if not c.is_zero())

    def degree(self, n: int) -> list[tuple[int, int]]:
        """Nonzero cells of total degree n."""
        return [(p, n - p) for p in range(4) if 0 <= n - p <= self.depth and not self[p, n - p].is_zero()]

    def total_dim(self, n: int) -> int:
        return sum(self[pq].group.mod2_dim() for pq in self.degree(n))


def normalize_coefficients(coeffs: str) -> str:
    key = coeffs.strip().upper()
    if key in ("F2", "Z/2"):
        return "F2"
    if key in ("Z2", "Z_2"):
        return "Z2"
    raise ValueError(f"coefficients {coeffs!r} are not supported (use F2 or Z2)")


def _e1_name(coeffs: str, p: int, q: int) -> str:
    x = GENERATOR_NAMES[p]
    if COLUMNS[p] == "G24":
        m, r = divmod(q, 4)
        return _times(_mono(("z", int(r == 3)), ("k", m)), x)
    if coeffs == "Z2":
        return _times(_mono(("g", q // 2)), x)
    return _times(_mono(("h", q)), x)


def class_name(coeffs: str, p: int, q: int) -> str:
    """Name of the class of H^{p+q}(S2^1) detected in cell (p, q)."""
    if coeffs == "Z2":
        if p == 0:
            return _mono(("k", q // 4))
        if p == 1:
            i, r = divmod(q // 2 - 1, 2)
            return _times(_mono(("k", i), ("g", r + 1)), "chi")
        if p == 2:
            i, r = divmod(q // 2, 2)
            return _times(_mono(("k", i), ("g", r)), "chi~")
        return _times(_mono(("k", q // 4)), "e")
    m, r = divmod(q, 4)
    if p in (0, 3):
        base = _mono(("z", int(r == 3)), ("k", m))
        return base if p == 0 else _times(base, "e")
    return _times(_mono(("k", m), ("h", r)), "chi" if p == 1 else "chi^2")


def adss_e1(coeffs: str, depth: int = DEFAULT_ADSS_DEPTH) -> ADSSPage:
    """E1^{p,q} = H^q(F_p; coeffs) for q <= depth."""
    coeffs = normalize_coefficients(coeffs)
    res_depth = max(GROUP_DEPTH, depth + 2)
    page = ADSSPage(coeffs, 1, depth)
    for p, G in enumerate(COLUMNS):
        if coeffs == "Z2":
            groups = integral_cohomology_finite(G, depth, res_depth)
        else:
            groups = [cohomology_finite(G, "F2", q, res_depth) for q in range(depth + 1)]
        for q, h in enumerate(groups):
            if not h.is_zero():
                page.cells[p, q] = Cell(h, (_e1_name(coeffs, p, q),) * h.ngens)
    return page


def _row_homology(page: ADSSPage, q: int, datum: ResolutionDatum) -> list[InvariantFactors]:
    groups = [page[p, q].group for p in range(4)]
    if any(g.free for g in groups):
        if any(g.torsion for g in groups):
            raise IntegrityError(f"row {q} mixes free and torsion cells")
        ranks = [g.free for g in groups]

        def build(N: int) -> CochainComplex:
            ds = [datum.d1_matrix(p, ranks[p], ranks[p + 1]) for p in range(3)]
            return CochainComplex.free(ranks, ds, N, lattice=True)

        return [lattice_homology_stable(build, p, working_precision()) for p in range(4)]
    terms = [list(g.torsion) for g in groups]
    ds = [datum.d1_matrix(p, len(terms[p]), len(terms[p + 1])) for p in range(3)]
    C = CochainComplex(terms, ds, working_precision())
    return [C.homology(p) for p in range(4)]


def adss_d1(page: ADSSPage, datum: ResolutionDatum = DUALITY_RESOLUTION,
            ledger: list[LedgerEntry] | None = None) -> ADSSPage:
    """E2 as the row-wise homology of d1."""
    out = ADSSPage(page.coefficients, 2, page.depth)
    for q in range(page.depth + 1):
        for p, h in enumerate(_row_homology(page, q, datum)):
            before = page[p, q]
            if not h.is_zero():
                out.cells[p, q] = Cell(h, before.names[:h.ngens])
            if ledger is not None and h != before.group and before.names:
                ledger.append(LedgerEntry(1, (p, q), before.names[0], "differential",
                                          "d1 is multiplication by 2 between the C6 columns; "
                                          "constant coefficients kill the augmentation-ideal terms"))
    return out


def sparsity_conflicts(page: ADSSPage) -> list[tuple[int, tuple[int, int], tuple[int, int]]]:
    """Pairs (r, source, target) of nonzero cells a d_r (r >= 2) could connect."""
    out = []
    for r in (2, 3):
        for p, q in page.nonzero():
            tgt = (p + r, q - r + 1)
            if tgt[0] <= 3 and tgt[1] >= 0 and not page[tgt].is_zero():
                out.append((r, (p, q), tgt))
    return out


@dataclass(frozen=True)
class AssembledDegree:
    n: int
    summands: tuple[Summand, ...]

    @property
    def group(self) -> InvariantFactors:
        return _sum(self.summands)

    def names(self) -> list[str]:
        return [s.name for s in self.summands]

    def __str__(self) -> str:
        return " + ".join(str(s) for s in self.summands) or "0"


@dataclass
class ADSSResult:
    coefficients: str
    e1: ADSSPage
    e2: ADSSPage
    degrees: list[AssembledDegree]
    ledger: list[LedgerEntry]
    collapse: str

    def groups(self) -> list[InvariantFactors]:
        return [d.group for d in self.degrees]

    def dims(self) -> list[int]:
        return [d.group.mod2_dim() for d in self.degrees]


def _summands_of(page: ADSSPage, pq: tuple[int, int]) -> list[Summand]:
    cell = page[pq]
    out = []
    for part, e1 in zip(_cyclic_parts(cell.group), cell.names):
        out.append(Summand(part, class_name(page.coefficients, *pq), pq, e1))
    return out


def _assemble_integral(page: ADSSPage, n: int, ledger: list[LedgerEntry]) -> AssembledDegree:
    cells = page.degree(n)
    rest = [pq for pq in cells if pq[0] != 0]
    if len(rest) > 1:
        if n % 4 == 3 and set(rest) == {(1, n - 1), (3, n - 3)}:
            why = "split: e splits off the degree-3 sequence" if n == 3 else \
                "split: k-periodic translate of the split sequence in degree 3"
            ledger.append(LedgerEntry(2, (3, n - 3), page[3, n - 3].names[0], "extension", why))
        else:
            raise UndeterminedError(f"extension problem in degree {n} among cells {rest}")
    if (0, n) in cells and rest:
        ledger.append(LedgerEntry(2, (0, n), page[0, n].names[0], "extension",
                                  "split: the edge column is a retract through the group-ring splitting"))
    summands: list[Summand] = []
    for pq in cells:
        summands += _summands_of(page, pq)
    summands.sort(key=lambda s: (-s.group.free, [-e for e in s.group.torsion]))
    return AssembledDegree(n, tuple(summands))


def _uct_dim(groups: Sequence[InvariantFactors], n: int) -> int:
    return groups[n].mod2_dim() + groups[n + 1].two_torsion_dim()


def adss_run(coeffs: str, depth: int = DEFAULT_ADSS_DEPTH) -> ADSSResult:
    """Assembled H^n(S2^1; coeffs) for n <= depth with a detection report."""
    coeffs = normalize_coefficients(coeffs)
    ledger: list[LedgerEntry] = []
    e1 = adss_e1(coeffs, depth)
    e2 = adss_d1(e1, ledger=ledger)
    if coeffs == "Z2":
        conflicts = sparsity_conflicts(e2)
        if conflicts:
            raise IntegrityError(f"E2 is not sparse enough to collapse: {conflicts}")
        degrees = [_assemble_integral(e2, n, ledger) for n in range(depth + 1)]
        return ADSSResult(coeffs, e1, e2, degrees, ledger, "sparsity: no d_r with r >= 2 has nonzero source and target")
    if e2.cells != e1.cells:
        raise IntegrityError("d1 is nonzero with F2 coefficients")
    integral = adss_run("Z2", depth + 1).groups()
    for n in range(depth + 1):
        expected = _uct_dim(integral, n)
        if e1.total_dim(n) != expected:
            raise IntegrityError(f"E1 total dimension {e1.total_dim(n)} in degree {n} "
                                 f"differs from the universal coefficient count {expected}")
    degrees = []
    for n in range(depth + 1):
        summands: list[Summand] = []
        for pq in e1.degree(n):
            summands += _summands_of(e1, pq)
        degrees.append(AssembledDegree(n, tuple(summands)))
    return ADSSResult(coeffs, e1, e2, degrees, ledger,
                      "E1 total dimensions equal the universal coefficient count of the integral answer")


# ---------------------------------------------------------------------------
# Rationalization

RATIONAL_NAMES = {1: "zeta", 3: "e"}


def _poly_mul(p: list[int], d: int) -> list[int]:
    out = p + [0] * d
    for i, c in enumerate(p):
        out[i + d] += c
    return out


def _poly_div(p: list[int], d: int) -> list[int] | None:
    if len(p) <= d:
        return None
    q = [0] * (len(p) - d)
    for i in range(len(q)):
        q[i] = p[i] - (q[i - d] if i >= d else 0)
        if q[i] < 0:
            return None
    return q if _poly_mul(q, d) == p else None


def rationalize(groups: Sequence[InvariantFactors], extra: Sequence[int] = ()) -> dict[str, int]:
    """Non-unit monomials of the exterior algebra whose Poincaré series is the free-rank profile.

    ``extra`` adjoins further exterior generators (degree 1 for passing
    from S2^1 to the full group). The profile must be an exact product of
    factors 1 + x^d within the computed window.
    """
    poly = [g.free for g in groups]
    while poly and poly[-1] == 0:
        poly.pop()
    if not poly:
        return {}
    if poly[0] != 1:
        raise ValueError("rational profile must start with a single unit")
    for d in extra:
        poly = _poly_mul(poly, d)
    gens: list[int] = []
    while len(poly) > 1:
        d = next(i for i in range(1, len(poly)) if poly[i])
        q = _poly_div(poly, d)
        if q is None:
            raise ValueError("free-rank profile is not an exterior algebra")
        gens.append(d)
        poly = q
    names = [RATIONAL_NAMES.get(d, f"x{d}") for d in gens]
    out: dict[str, int] = {}
    for mask in range(1, 1 << len(gens)):
        chosen = [i for i in range(len(gens)) if mask >> i & 1]
        out["*".join(names[i] for i in chosen)] = sum(gens[i] for i in chosen)
    return dict(sorted(out.items(), key=lambda kv: (kv[1], kv[0])))


# ---------------------------------------------------------------------------
# Topological duality spectral sequence


@dataclass(frozen=True)
class PiEntry:
    """pi_q of a fixed-point spectrum: a module type and its generator."""

    module: str
    generator: str = ""

    def is_zero(self) -> bool:
        return self.module == "0"


_Z = PiEntry("0")

PI_G24 = {0: PiEntry("W[[j]]", "1"), 1: PiEntry("F4[[j]]", "eta"), 2: PiEntry("F4[[j]]", "eta^2"),
          3: PiEntry("W/8", "nu"), -1: _Z, -2: _Z, -3: _Z}
PI_C6 = {0: PiEntry("W[[u1^3]]", "1"), 1: PiEntry("F4[[u1^3]]", "eta"),
         2: PiEntry("F4[[u1^3]]", "eta^2"), 3: PiEntry("F4", "nu"), -1: _Z, -2: _Z}
# pi_{q-48} E^{hG24}, the top column after the shift by 48
PI_G24_SHIFTED = {0: PiEntry("(4,j)", "Delta^-2"), 1: PiEntry("(j)", "eta*Delta^-2"),
                  2: PiEntry("(j)", "eta^2*Delta^-2"), 3: PiEntry("W/8", "nu*Delta^-2")}


@dataclass(frozen=True)
class PiTable:
    columns: tuple[dict[int, PiEntry], ...] = (PI_G24, PI_C6, PI_C6, PI_G24_SHIFTED)

    def lookup(self, p: int, q: int) -> PiEntry | None:
        """The entry at (p, q), or None where the table says nothing."""
        return self.columns[p].get(q)


PI_TABLES = PiTable()


def _eta_power(name: str) -> tuple[int, str]:
    head, _, rest = name.partition("*")
    if head == "eta":
        return 1, rest
    if head.startswith("eta^"):
        return int(head[4:]), rest
    return 0, name


def eta_times(name: str, k: int = 1) -> str:
    e, base = _eta_power(name)
    return _times(_mono(("eta", e + k)), base)


def _as_w_module(m: InvariantFactors) -> InvariantFactors:
    """A Z2-module on a {1, ω}-basis read as a W-module."""
    if m.free % 2 or any(m.torsion.count(e) % 2 for e in set(m.torsion)):
        raise IntegrityError(f"{m} is not the underlying module of a W-module")
    return InvariantFactors(tuple(m.torsion[::2]), m.free // 2, "W")


_W_MODULES = {"W": InvariantFactors((), 1, "W"), "W/8": InvariantFactors((3,), 0, "W"),
              "F4": InvariantFactors((1,), 0, "W")}


@dataclass
class TDSSPage:
    r: int
    cells: dict[tuple[int, int], Cell] = field(default_factory=dict)
    series: dict[tuple[int, int], str] = field(default_factory=dict)
    unknown: set[tuple[int, int]] = field(default_factory=set)

    def __getitem__(self, pq: tuple[int, int]) -> Cell:
        return self.cells.get(pq, ZERO_CELL)

    def stem(self, n: int) -> list[tuple[int, int]]:
        return [(p, n + p) for p in range(4) if not self[p, n + p].is_zero()]


def tdss_e1(tables: PiTable = PI_TABLES, stems: range = range(-3, 2)) -> TDSSPage:
    """E1^{p,q} = pi_q F_p in the given stems; power-series entries are kept symbolic."""
    page = TDSSPage(1)
    for n in stems:
        for p in range(4):
            q = n + p
            entry = tables.lookup(p, q)
            if entry is None:
                page.unknown.add((p, q))
                continue
            if entry.is_zero():
                continue
            # the shift by 48 identifies Delta^-2 with the generator d0
            gen = entry.generator.replace("*Delta^-2", "").replace("Delta^-2", "1")
            name = _times(gen, GENERATOR_NAMES[p])
            if entry.module in _W_MODULES:
                page.cells[p, q] = Cell(_W_MODULES[entry.module], (name,))
            else:
                page.series[p, q] = entry.module
                page.cells[p, q] = Cell(InvariantFactors((), 1, "W"), (name,))
    return page


def _edge_quotient(q: int, T: int = SERIES_TRUNCATION) -> tuple[InvariantFactors, str]:
    """(edge image) / (image of d1) inside the top column, truncated at j^T.

    The edge image is the ideal (4, j) for q = 0 and (j) for q = 1, 2; the
    image of d1 is the ideal (j), the complement of the constants that
    survive in the coefficient ladder. W[[j]]/j^T is a Z2-lattice on
    ω^a j^b; F4[[j]]/j^T an F2-vector space on the same basis.
    """
    dim = 2 * T
    unit = lambda i: [int(i == r) for r in range(dim)]
    ideal_j = [unit(i) for i in range(2, dim)]
    if q == 0:
        edge = [[4 * x for x in unit(0)], [4 * x for x in unit(1)]] + ideal_j
        N = working_precision()
        subs = [Subquotient(mat(edge).T, mat(ideal_j).T, M) for M in (N, N + STABILITY_MARGIN)]
        low, high = (s.invariant_factors() for s in subs)
        group = _as_w_module(stabilize(low, high, N))
        gen = subs[0].generators[:, 0]
        v = min(valuation(int(x)) for x in gen if int(x))
        return group, f"{1 << v}*d0" if v else "d0"
    sq = Subquotient(mat(ideal_j).T, mat(ideal_j).T, 1)
    return _as_w_module(sq.invariant_factors()), _times(_mono(("eta", q)), "d0")


def tdss_e2(ledger: list[LedgerEntry] | None = None, tables: PiTable = PI_TABLES,
            stems: range = range(-3, 2)) -> TDSSPage:
    """E2 of the topological duality spectral sequence in the given stems."""
    ledger = ledger if ledger is not None else []
    e1 = tdss_e1(tables, stems)
    adss_z2 = adss_run("Z2", 4).e2
    adss_f2 = adss_run("F2", 4).e2
    page = TDSSPage(2, unknown=set(e1.unknown))
    for (p, q), cell in e1.cells.items():
        name = cell.names[0]
        if q == 3:
            page.cells[p, q] = cell
            ledger.append(LedgerEntry(1, (p, q), name, "survives", "d1 = 0 on the nu-row by nu-linearity"))
            continue
        if p == 3:
            group, name = _edge_quotient(q)
            why = "edge image (4, j) modulo the d1-image (j)" if q == 0 else "edge image (j) is the d1-image"
        elif q == 0:
            group = adss_z2[p, 0].group.with_ring("W")
            why = "ladder to H^0(F_p; W): W tensor the integral algebraic row"
        else:
            group = adss_f2[p, 0].group.with_ring("W")
            why = "ladder through reduction mod 2 and eta^q: F4 tensor the mod 2 algebraic row"
        if not group.is_zero():
            page.cells[p, q] = Cell(group, (name,))
        ledger.append(LedgerEntry(1, (p, q), name, "survives" if not group.is_zero() else "differential", why))
    return page


PERMANENT_CYCLES = {"a0": "the unit is a permanent cycle"}


def _higher_differentials(page: TDSSPage, stems: range, ledger: list[LedgerEntry]) -> None:
    """Rule out d2 and d3 with targets in the given stems."""
    permanent = dict(PERMANENT_CYCLES)
    sources = [(p, n + 1 + p) for n in stems for p in range(4)]
    sources += [(p, n + p) for n in stems for p in range(4)]
    potential: dict[tuple[int, int], list[tuple[int, tuple[int, int]]]] = {}
    for src in sorted(set(sources)):
        if page[src].is_zero():
            continue
        targets = [(r, (src[0] + r, src[1] + r - 1)) for r in (2, 3)]
        live = [(r, t) for r, t in targets if t[0] <= 3 and not page[t].is_zero()]
        if not live:
            permanent.setdefault(page[src].names[0], "every potential target is zero")
        potential[src] = live
    changed = True
    while changed:
        changed = False
        for name in list(permanent):
            e, base = _eta_power(name)
            if e < 2 and eta_times(name) not in permanent:
                permanent[eta_times(name)] = f"eta-multiple of the permanent cycle {name}"
                changed = True
    for src, live in potential.items():
        name = page[src].names[0]
        if not live:
            continue
        if name not in permanent:
            raise UndeterminedError(f"cannot rule out d_r on {name} at {src}")
        for r, tgt in live:
            ledger.append(LedgerEntry(r, src, name, "survives", permanent[name]))


@dataclass
class TDSSResult:
    stems: dict[int, list[Summand]]
    e1: TDSSPage
    e2: TDSSPage
    ledger: list[LedgerEntry]
    twice: dict[str, str] = field(default_factory=dict)

    def group(self, n: int) -> InvariantFactors:
        return _sum(self.stems[n], "W")

    def detection(self, n: int) -> list[str]:
        return [s.name for s in self.stems[n]]


DETECTION_ALIASES = {"a0": "unit"}


def _extension(page: TDSSPage, stems: range, ledger: list[LedgerEntry]) -> dict[tuple[int, int], tuple[int, int]]:
    """Order-4 links: 2<z,2,eta> = eta^2 z for z of order 2 with eta^2 z nonzero."""
    links: dict[tuple[int, int], tuple[int, int]] = {}
    by_name = {c.names[0]: pq for pq, c in page.cells.items() if not c.is_zero()}
    for (p, q), cell in sorted(page.cells.items()):
        if cell.group != _W_MODULES["F4"]:
            continue
        target = by_name.get(eta_times(cell.names[0], 2))
        if target is None:
            continue
        stem = q - p + 2
        if stem not in stems:
            continue
        slots = [(p - 1, stem + p - 1)] if p >= 1 else []
        slots = [s for s in slots if page[s].group == _W_MODULES["F4"]]
        if len(slots) != 1:
            raise AmbiguousError(f"no unique class for the bracket <{cell.names[0]}, 2, eta>")
        if slots[0] in links:
            raise AmbiguousError(f"two extension rules meet at {slots[0]}")
        links[slots[0]] = target
        ledger.append(LedgerEntry(2, slots[0], page[slots[0]].names[0], "extension",
                                  f"twice {page[slots[0]].names[0]} is detected by {page[target].names[0]}: "
                                  f"<{cell.names[0]}, 2, eta> 2 = {cell.names[0]} <2, eta, 2> = eta^2 {cell.names[0]}"))
    return links


def tdss_run(tables: PiTable = PI_TABLES, stems: range = TDSS_STEMS) -> TDSSResult:
    """pi_n E^{hS2^1} for n in the given stems with the detecting classes."""
    ledger: list[LedgerEntry] = []
    e1 = tdss_e1(tables, range(stems.start, stems.stop + 1))
    e2 = tdss_e2(ledger, tables, range(stems.start, stems.stop + 1))
    for n in stems:
        if any(pq in e2.unknown for pq in [(p, n + p) for p in range(4)]):
            raise UndeterminedError(f"table window does not cover stem {n}")
    _higher_differentials(e2, stems, ledger)
    links = _extension(e2, stems, ledger)
    absorbed = set(links.values())
    out: dict[int, list[Summand]] = {}
    twice = {e2[src].names[0]: e2[tgt].names[0] for src, tgt in links.items()}
    for n in stems:
        summands = []
        for pq in e2.stem(n):
            if pq in absorbed:
                continue
            cell = e2[pq]
            group = cell.group
            if pq in links:
                group = InvariantFactors((cell.group.torsion[0] + e2[links[pq]].group.torsion[0],), 0, "W")
            name = cell.names[0]
            summands.append(Summand(group, DETECTION_ALIASES.get(name, name), pq, name))
        summands.sort(key=lambda s: (-s.group.free, s.group.torsion))
        out[n] = summands
    return TDSSResult(out, e1, e2, ledger, twice)


def galois_descend(m: InvariantFactors) -> InvariantFactors:
    """W -> Z2, W/2^k -> Z/2^k."""
    if m.ring != "W" and not m.is_zero():
        raise ValueError("Galois descent applies to W-modules")
    return m.with_ring("Z2")
