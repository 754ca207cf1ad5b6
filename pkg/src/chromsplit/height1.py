"""Continuous cohomology of Z2^x = {±1} × (1 + 4Z2) on 2-adic K-theory.

Cochains live in the total complex of the double complex built from the
two-term complex (g - 1) of the procyclic factor and the periodic complex
(τ - 1, τ + 1, τ - 1, ...) of C2 = {±1}. A cochain of total degree s has a
block (0, s) evaluated on the C2 generator and a block (1, s - 1) evaluated
on g, each a vector in the coefficient module.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .coefficients import Residue2Adic, project_sign, quarter_log, valuation
from .modules import (
    CochainComplex,
    InvariantFactors,
    Matrix,
    Subquotient,
    hstack,
    identity,
    induced_endomorphism,
    is_zero_mod,
    mat,
    matmul,
    zeros,
)

TAU = -1
G = 5
INTEGRAL_LEVELS = (8, 12)
DEFAULT_SMAX = 8
DEFAULT_T_WINDOW = 48


@dataclass(frozen=True)
class CyclicAction:
    """A module over Z/2^level with commuting actions of τ = -1 and g.

    ``lattice`` marks a free Z2-module known to ``level`` digits (integral
    coefficients) rather than a finite module.
    """

    rank: int
    level: int
    op_tau: Matrix
    op_g: Matrix
    t: int
    lattice: bool = False
    generator: int = G

    def __post_init__(self) -> None:
        N, r = self.level, self.rank
        if self.op_tau.shape != (r, r) or self.op_g.shape != (r, r):
            raise ValueError("operator shapes do not match the rank")
        if not is_zero_mod(matmul(self.op_tau, self.op_tau) - identity(r), N):
            raise ArithmeticError("τ must square to the identity")
        if not is_zero_mod(matmul(self.op_tau, self.op_g) - matmul(self.op_g, self.op_tau), N):
            raise ArithmeticError("operators do not commute")


def k_scalar(k: int, t: int, N: int) -> int:
    """Action of the unit k on K_t = Z2 u^(-t/2): multiplication by k^(-t/2)."""
    return pow(k, -(t // 2), 1 << N) if N else 0


def module_K(t: int, j: int, X: str = "sphere", generator: int = G) -> CyclicAction:
    """K_t X / 2^j with its Adams-operation action; odd t gives the zero module."""
    if X not in ("sphere", "moore"):
        raise ValueError(f"unknown spectrum {X!r}")
    if X == "moore":
        j = 1
    if t % 2:
        return CyclicAction(0, j, zeros(0, 0), zeros(0, 0), t, generator=generator)
    mod = 1 << j
    return CyclicAction(1, j, mat([[k_scalar(TAU, t, j) % mod]]),
                        mat([[k_scalar(generator, t, j)]]), t, generator=generator)


def module_K_integral(t: int, N: int, generator: int = G) -> CyclicAction:
    """K_t as a Z2-lattice with operators known to N digits."""
    m = module_K(t, N, generator=generator)
    return CyclicAction(m.rank, N, m.op_tau, m.op_g, t, lattice=True, generator=generator)


def _vertical(M: CyclicAction, b: int) -> Matrix:
    r = M.rank
    sign = -1 if b % 2 == 0 else 1
    return (M.op_tau + sign * identity(r)) % (1 << M.level)


def total_differential(M: CyclicAction, s: int) -> Matrix:
    """D : Tot^s -> Tot^(s+1) with blocks ordered (0, s), (1, s-1)."""
    r, N = M.rank, M.level
    mod = 1 << N
    hor = (M.op_g - identity(r)) % mod
    src = [(0, s)] + ([(1, s - 1)] if s >= 1 else [])
    tgt = [(0, s + 1), (1, s)]
    D = zeros(r * len(tgt), r * len(src))
    for ci, (a, b) in enumerate(src):
        for ri, (a2, b2) in enumerate(tgt):
            block = None
            if a2 == a and b2 == b + 1:
                block = _vertical(M, b)
            elif a == 0 and a2 == 1 and b2 == b:
                block = (hor * (-1) ** b) % mod
            if block is not None:
                D[ri * r:(ri + 1) * r, ci * r:(ci + 1) * r] = block
    return D


def tot_dim(M: CyclicAction, s: int) -> int:
    return M.rank * (1 if s == 0 else 2)


def total_complex(M: CyclicAction, smax: int) -> CochainComplex:
    """Total complex through degree smax + 1 (so H^s is exact for s <= smax)."""
    terms = [[M.level] * tot_dim(M, s) for s in range(smax + 2)]
    bounds = [total_differential(M, s) for s in range(smax + 1)]
    return CochainComplex(terms, bounds, M.level, lattice=M.lattice)


def cohomology_Z2x(M: CyclicAction, smax: int = DEFAULT_SMAX) -> list[InvariantFactors]:
    """H^s(Z2^x, M) for s = 0..smax."""
    C = total_complex(M, smax)
    C.check()
    return [C.homology(s) for s in range(smax + 1)]


def integral_cohomology(t: int, smax: int = DEFAULT_SMAX,
                        levels: tuple[int, int] = INTEGRAL_LEVELS,
                        generator: int = G) -> list[InvariantFactors]:
    """H^s(Z2^x, K_t) certified by agreement of two lattice precisions."""
    if t % 2:
        return [InvariantFactors() for _ in range(smax + 1)]
    lo, hi = (cohomology_Z2x(module_K_integral(t, N, generator), smax) for N in levels)
    for s, (a, b) in enumerate(zip(lo, hi)):
        if a != b:
            raise ArithmeticError(f"integral H^{s}(K_{t}) unstable: {a} vs {b}")
    return lo


def mod2_dims(t: int, smax: int = DEFAULT_SMAX) -> list[int]:
    return [h.mod2_dim() for h in cohomology_Z2x(module_K(t, 1), smax)]


# ---------------------------------------------------------------------------
# Crossed homomorphisms


@dataclass(frozen=True)
class CrossedHom:
    """A 1-cocycle on Z2^x with values in K_t modulo 2^level (None: integral).

    kind is one of "alpha" (n odd), "alpha_div" (n even, i = v(n)),
    "zeta1" and "chi1".
    """

    kind: str
    n: int = 0

    def __post_init__(self) -> None:
        if self.kind == "alpha" and self.n % 2 == 0:
            raise ValueError("alpha_n needs n odd")
        if self.kind == "alpha_div" and (self.n == 0 or self.n % 2):
            raise ValueError("alpha_{n/i+2} needs n even and nonzero")
        if self.kind not in ("alpha", "alpha_div", "zeta1", "chi1"):
            raise ValueError(f"unknown crossed homomorphism {self.kind!r}")

    @property
    def t(self) -> int:
        return 2 * self.n if self.kind in ("alpha", "alpha_div") else 0

    @property
    def i(self) -> int:
        return valuation(self.n) if self.kind == "alpha_div" else 0

    @property
    def level(self) -> int | None:
        """Coefficient level: 1 for χ1 (values in K_0/2), None when integral."""
        return 1 if self.kind == "chi1" else None

    @property
    def name(self) -> str:
        if self.kind == "alpha":
            return f"alpha_{self.n}"
        if self.kind == "alpha_div":
            return f"alpha_{self.n}/{self.i + 2}"
        return self.kind


def alpha(n: int) -> CrossedHom:
    return CrossedHom("alpha", n) if n % 2 else CrossedHom("alpha_div", n)


ZETA1 = CrossedHom("zeta1")
CHI1 = CrossedHom("chi1")


def eval_crossed(f: CrossedHom, k: int, precision: int = 64) -> Residue2Adic:
    """Coefficient of u^(-n) in f(k), for an odd integer k."""
    if k % 2 == 0:
        raise ValueError("crossed homomorphisms are evaluated on units")
    if f.kind == "chi1":
        return Residue2Adic((k - 1) // 2, 1)
    if f.kind == "zeta1":
        _, y = project_sign(k, precision + 2)
        return quarter_log(y, precision)
    shift = 1 if f.kind == "alpha" else f.i + 2
    N = precision + shift
    num = (pow(k, -f.n, 1 << N) - 1) % (1 << N)
    if num % (1 << shift):
        raise ArithmeticError("crossed homomorphism value is not integral")
    return Residue2Adic(num >> shift, precision)


def act_on_value(f: CrossedHom, x: int, value: Residue2Adic) -> Residue2Adic:
    """The module action of the unit x on K_t, applied to a value of f."""
    return value * pow(x, -(f.t // 2), 1 << value.precision)


def cocycle_defect(f: CrossedHom, x: int, y: int, precision: int = 64) -> Residue2Adic:
    """f(xy) - f(x) - x·f(y); zero exactly when the cocycle law holds."""
    fxy = eval_crossed(f, x * y, precision)
    fx = eval_crossed(f, x, precision)
    fy = eval_crossed(f, y, precision)
    return fxy - fx - act_on_value(f, x, fy)


def random_units(rng: random.Random, count: int, bits: int = 80) -> list[int]:
    return [rng.getrandbits(bits) | 1 for _ in range(count)]


# ---------------------------------------------------------------------------
# Cochain-level classes


@dataclass(frozen=True)
class CohClass:
    """A cocycle rep in Tot^s(K_t / 2^level); level None means integral."""

    s: int
    t: int
    rep: tuple[int, ...]
    level: int | None
    precision: int = 64
    name: str = ""

    def modulus_bits(self) -> int:
        return self.precision if self.level is None else self.level

    def reduce(self, level: int) -> "CohClass":
        mod = 1 << level
        return CohClass(self.s, self.t, tuple(x % mod for x in self.rep), level,
                        self.precision, self.name)

    def coefficient_module(self) -> CyclicAction:
        if self.level is None:
            return module_K_integral(self.t, self.precision)
        return module_K(self.t, self.level)

    def is_cocycle(self) -> bool:
        M = self.coefficient_module()
        D = total_differential(M, self.s)
        v = mat([[x] for x in self.rep], (len(self.rep), 1))
        return is_zero_mod(matmul(D, v), M.level)


def class_of_crossed(f: CrossedHom, precision: int = 64) -> CohClass:
    """The degree-1 cochain (f(τ), f(g)) of a crossed homomorphism."""
    level = f.level
    p = precision if level is None else level
    rep = (eval_crossed(f, TAU, p).value, eval_crossed(f, G, p).value)
    return CohClass(1, f.t, rep, level, precision, f.name)


def unit_class(t: int, level: int | None, precision: int = 64, name: str = "") -> CohClass:
    """The degree-0 cochain u^(-t/2) (the class v1^(t/2) when level = 1)."""
    return CohClass(0, t, (1,), level, precision, name or f"u^{-t // 2}")


def bockstein(level: int, c: CohClass, precision: int = 64) -> CohClass:
    """Connecting map for 0 -> K --2^level--> K -> K/2^level -> 0.

    Lifts the representative to an integral cochain, applies the integral
    differential and divides by 2^level.
    """
    if c.level != level:
        raise ValueError("class is not defined modulo 2^level")
    if not c.is_cocycle():
        raise ArithmeticError("bockstein of a non-cocycle")
    N = precision + level
    M = module_K_integral(c.t, N)
    D = total_differential(M, c.s)
    v = mat([[x] for x in c.rep], (len(c.rep), 1))
    image = matmul(D, v, N)
    out = []
    for x in image[:, 0]:
        x = int(x)
        if x % (1 << level):
            raise ArithmeticError("lift boundary not divisible by 2^level")
        out.append((x >> level) % (1 << precision))
    return CohClass(c.s + 1, c.t, tuple(out), None, precision, f"beta({c.name})")


def cup(x: CohClass, y: CohClass) -> CohClass:
    """Cup product of cochains, induced by the tensor-product diagonal.

    On the C2 factor the diagonal twists the second factor by τ when the
    first C2-degree is odd; on the procyclic factor by g when the first
    factor has g-degree 1. The Koszul sign is (-1)^(b_y * a_x).
    """
    if (x.level is None) != (y.level is None):
        raise ValueError("mixed integral and torsion cochains")
    level = x.level if y.level is None else min(x.level or 64, y.level)
    precision = min(x.precision, y.precision)
    bits = precision if level is None else level
    mod = 1 << bits
    s, t = x.s + y.s, x.t + y.t
    out = [0] * (1 if s == 0 else 2)
    tau_y = k_scalar(TAU, y.t, bits)
    g_y = k_scalar(G, y.t, bits)
    for (ax, bx), vx in _blocks(x):
        for (ay, by), vy in _blocks(y):
            a, b = ax + ay, bx + by
            if a > 1:
                continue
            val = vx * vy
            if bx % 2:
                val *= tau_y
            if ax == 1:
                val *= g_y
            if (by * ax) % 2:
                val = -val
            idx = 0 if a == 0 else 1
            out[idx] = (out[idx] + val) % mod
    return CohClass(s, t, tuple(out), level, precision, f"{x.name}*{y.name}")


def _blocks(c: CohClass) -> list[tuple[tuple[int, int], int]]:
    blocks = [((0, c.s), c.rep[0])]
    if c.s >= 1:
        blocks.append(((1, c.s - 1), c.rep[1]))
    return blocks


def cochain_vector(c: CohClass) -> Matrix:
    return mat([[x] for x in c.rep], (len(c.rep), 1))


# ---------------------------------------------------------------------------
# Products on cohomology and the Y splice


def mod2_cohomology(t: int, smax: int) -> list[Subquotient]:
    C = total_complex(module_K(t, 1), smax)
    C.check()
    return [C.homology_module(s) for s in range(smax + 1)]


def eta_class() -> CohClass:
    """η, detected by α1; mod 2 its cochain is that of v1·χ1."""
    return class_of_crossed(alpha(1)).reduce(1)


def multiplication_matrix(left: CohClass, src: Subquotient, tgt: Subquotient,
                          t_src: int, s_src: int) -> Matrix:
    """Matrix of c ↦ left ∪ c from a mod-2 cohomology group to another."""
    gens = src.generators
    cols = []
    for j in range(gens.shape[1]):
        rep = tuple(int(x) for x in gens[:, j])
        prod = cup(left, CohClass(s_src, t_src, rep, 1))
        cols.append(tgt.coords(cochain_vector(prod)))
    k = len(tgt.exponents)
    out = zeros(k, len(cols))
    for j, col in enumerate(cols):
        for i, x in enumerate(col):
            out[i, j] = x
    return out


def _f2_rank(m: Matrix) -> int:
    from .modules import f2_rank
    return f2_rank([[int(x) for x in row] for row in m], m.shape[1]) if m.size else 0


def v1_periodicity_ranks(t: int, smax: int) -> list[tuple[int, int, int]]:
    """(dim source, dim target, rank) of v1· : H^s(K_t/2) -> H^s(K_{t+2}/2)."""
    v1 = unit_class(2, 1, name="v1")
    src, tgt = mod2_cohomology(t, smax), mod2_cohomology(t + 2, smax)
    out = []
    for s in range(smax + 1):
        m = multiplication_matrix(v1, src[s], tgt[s], t, s)
        out.append((len(src[s].exponents), len(tgt[s].exponents), _f2_rank(m)))
    return out


@dataclass
class SpliceResult:
    dims: dict[tuple[int, int], int] = field(default_factory=dict)

    def dim(self, s: int, t: int) -> int:
        return self.dims[(s, t)]


def splice_Y(t_values: Iterable[int], smax: int) -> SpliceResult:
    """dims of H^s(Z2^x, K_t Y) from 0 -> K_*V(0) -> K_*Y -> K_*Σ²V(0) -> 0.

    The connecting map H^s(K_{t-2}/2) -> H^{s+1}(K_t/2) is multiplication
    by η, so dim H^s(K_t Y) = dim coker(η into H^s(K_t/2)) + dim ker(η out
    of H^s(K_{t-2}/2)).
    """
    t_values = sorted(set(t_values))
    need = sorted(set(t_values) | {t - 2 for t in t_values})
    cache = {t: mod2_cohomology(t, smax + 1) for t in need}
    eta = eta_class()
    result = SpliceResult()
    for t in t_values:
        if t % 2:
            for s in range(smax + 1):
                result.dims[(s, t)] = 0
            continue
        low, here = cache[t - 2], cache[t]
        for s in range(smax + 1):
            dim_here = len(here[s].exponents)
            if s >= 1:
                into = multiplication_matrix(eta, low[s - 1], here[s], t - 2, s - 1)
                coker = dim_here - _f2_rank(into)
            else:
                coker = dim_here
            out_of = multiplication_matrix(eta, low[s], here[s + 1], t - 2, s)
            ker = len(low[s].exponents) - _f2_rank(out_of)
            result.dims[(s, t)] = coker + ker
    return result


# ---------------------------------------------------------------------------
# Naming and tables


def mod2_names(s: int, t: int) -> list[str]:
    """Basis of H^s(K_t/2) in the presentation F2[v1^{±1}, η] ⊗ E(ζ1)."""
    if t % 2:
        return []
    n = t // 2
    names = [_monomial_name(n - s, s, 0)]
    if s >= 1:
        names.append(_monomial_name(n - s + 1, s - 1, 1))
    return names


def _monomial_name(a: int, b: int, e: int) -> str:
    parts = []
    if a:
        parts.append("v1" if a == 1 else f"v1^{a}")
    if b:
        parts.append("eta" if b == 1 else f"eta^{b}")
    if e:
        parts.append("zeta1")
    return "*".join(parts) or "1"


def degree_one_name(n: int) -> str:
    if n == 0:
        return "zeta1"
    if n % 2:
        return f"alpha_{n}"
    return f"alpha_{n}/{valuation(n) + 2}"


def integral_names(s: int, t: int) -> list[str]:
    """Generator names of H^s(K_t) following the α / ζ1 / η-multiple pattern."""
    if t % 2:
        return []
    n = t // 2
    if s == 0:
        return ["1"] if n == 0 else []
    if s == 1:
        return [degree_one_name(n)]
    m = n - s + 1
    prefix = "eta" if s == 2 else f"eta^{s - 1}"
    return [f"{prefix}*{degree_one_name(m)}"]


def table_rows(t_values: Sequence[int], smax: int, level: int | None) -> list[tuple]:
    """Rows (s, t, level, invariant_factors, named_generators) for the TSV dump."""
    rows = []
    for t in t_values:
        if level is None:
            groups = integral_cohomology(t, smax)
            label = "Z2"
        else:
            groups = cohomology_Z2x(module_K(t, level), smax)
            label = str(level)
        for s, h in enumerate(groups):
            if h.is_zero():
                continue
            if level is None:
                names = integral_names(s, t)
            elif level == 1:
                names = mod2_names(s, t)
            else:
                names = []
            rows.append((s, t, label, str(h), ",".join(names)))
    return rows


def format_tsv(rows: Sequence[tuple]) -> str:
    header = "s\tt\tlevel\tinvariant_factors\tnamed_generators"
    return "\n".join([header] + ["\t".join(str(x) for x in r) for r in rows]) + "\n"
