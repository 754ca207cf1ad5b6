"""Cohomology of Q8, G24 = Q8 ⋊ C3 and C6 with trivial 2-adic coefficients.

Minimal free resolutions are built over the local ring Z/2^N[G] for a
2-group G by repeatedly taking kernels and lifting a basis of K/rad(K).
G24 is handled through the C3-invariants of Q8 cohomology, using a
chain-level lift of the automorphism i -> j -> k; C6 through C2, since
|C3| is invertible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Sequence

import numpy as np

from .coefficients import STABILITY_MARGIN
from .modules import (
    CochainComplex,
    InvariantFactors,
    Matrix,
    f2_rank,
    hstack,
    identity,
    image_of_idempotent,
    induced_endomorphism,
    is_zero_mod,
    kernel,
    matmul,
    relation_matrix,
    smith_form,
    solve,
    zeros,
)

DEFAULT_DEPTH = 12
RESOLUTION_PRECISION = 72


# ---------------------------------------------------------------------------
# Groups


@dataclass(frozen=True)
class GroupData:
    """A finite group by multiplication table; element 0 is the identity."""

    name: str
    labels: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]
    generators: tuple[int, ...]
    automorphism: tuple[int, ...] | None = None

    @property
    def order(self) -> int:
        return len(self.labels)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def check(self) -> None:
        n = self.order
        for a, b, c in product(range(n), repeat=3):
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)):
                raise ArithmeticError(f"{self.name} is not associative")
        if any(self.mul(0, a) != a or self.mul(a, 0) != a for a in range(n)):
            raise ArithmeticError("element 0 is not the identity")
        phi = self.automorphism
        if phi is not None:
            for a, b in product(range(n), repeat=2):
                if phi[self.mul(a, b)] != self.mul(phi[a], phi[b]):
                    raise ArithmeticError("automorphism is not multiplicative")
            if any(phi[phi[phi[a]]] != a for a in range(n)) or all(phi[a] == a for a in range(n)):
                raise ArithmeticError("automorphism does not have order 3")


def _quaternion_mul(a: tuple[int, str], b: tuple[int, str]) -> tuple[int, str]:
    rules = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
        ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
        ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
        ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
    }
    sign, unit = rules[(a[1], b[1])]
    return a[0] * b[0] * sign, unit


def quaternion_group() -> GroupData:
    elems = [(s, u) for s in (1, -1) for u in "1ijk"]
    index = {e: n for n, e in enumerate(elems)}
    table = tuple(tuple(index[_quaternion_mul(a, b)] for b in elems) for a in elems)
    labels = tuple(("" if s == 1 else "-") + u for s, u in elems)
    cycle = {"1": "1", "i": "j", "j": "k", "k": "i"}
    phi = tuple(index[(s, cycle[u])] for s, u in elems)
    return GroupData("Q8", labels, table, (index[(1, "i")], index[(1, "j")]), phi)


def cyclic_two() -> GroupData:
    return GroupData("C2", ("1", "-1"), ((0, 1), (1, 0)), (1,))


# ---------------------------------------------------------------------------
# Resolutions


@dataclass
class ResolutionSegment:
    """Minimal free resolution P_* -> Z/2^N over Z/2^N[G] through degree ``depth``.

    ``images[n][j]`` is d_n(e_j) as a vector of length ranks[n-1] * |G|,
    indexed by (generator i, group element g) -> i * |G| + g.
    """

    group: GroupData
    N: int
    ranks: list[int] = field(default_factory=list)
    images: list[list[list[int]]] = field(default_factory=list)

    def left_multiply(self, h: int, v: Sequence[int]) -> list[int]:
        n = self.group.order
        out = [0] * len(v)
        for idx, a in enumerate(v):
            if a:
                i, g = divmod(idx, n)
                out[i * n + self.group.mul(h, g)] = a
        return out

    def full_matrix(self, n: int) -> Matrix:
        """Z/2^N-matrix of d_n on the basis {h e_j}."""
        order = self.group.order
        rows = self.ranks[n - 1] * order if n >= 1 else 1
        cols = self.ranks[n] * order
        out = zeros(rows, cols)
        if n == 0:
            out[0, :] = 1
            return out
        for j, img in enumerate(self.images[n]):
            for h in range(order):
                out[:, j * order + h] = self.left_multiply(h, img)
        return out

    @property
    def depth(self) -> int:
        return len(self.ranks) - 1


def augmentation(group: GroupData) -> list[int]:
    return [1] * group.order


def resolve(group: GroupData, depth: int = DEFAULT_DEPTH, N: int = RESOLUTION_PRECISION) -> ResolutionSegment:
    """Build a minimal resolution through P_{depth+1}, checking exactness."""
    res = ResolutionSegment(group, N)
    res.ranks.append(1)
    res.images.append([augmentation(group)])
    mod = 1 << N
    order = group.order
    for n in range(1, depth + 2):
        d_prev = res.full_matrix(n - 1)
        K = kernel(d_prev, N)
        k = K.shape[1]
        kbar = [[int(K[r, c]) & 1 for r in range(K.shape[0])] for c in range(k)]
        ncols = K.shape[0]
        rad = []
        for vec in kbar:
            for g in group.generators:
                moved = res.left_multiply(g, vec)
                rad.append([(a + b) & 1 for a, b in zip(moved, vec)])
        # minimal generators: lift a basis of K/rad(K) over F2
        span, chosen = rad, []
        rank = f2_rank(span, ncols)
        for c in range(k):
            if f2_rank(span + [kbar[c]], ncols) > rank:
                chosen.append(c)
                span = span + [kbar[c]]
                rank += 1
        res.ranks.append(len(chosen))
        res.images.append([[int(K[r, c]) % mod for r in range(ncols)] for c in chosen])
        d_new = res.full_matrix(n)
        sf = smith_form(d_new, N)
        units = sum(1 for e in sf.exponents if e == 0)
        if units != k or any(0 < e < N for e in sf.exponents):
            raise ArithmeticError(f"resolution not exact at degree {n - 1}")
        if not is_zero_mod(matmul(d_prev, d_new), N):
            raise ArithmeticError(f"d∘d ≠ 0 at degree {n}")
    return res


@lru_cache(maxsize=None)
def _cached_resolution(name: str, depth: int, N: int) -> ResolutionSegment:
    group = quaternion_group() if name == "Q8" else cyclic_two()
    return resolve(group, depth, N)


def resolution(name: str, depth: int = DEFAULT_DEPTH, N: int = RESOLUTION_PRECISION) -> ResolutionSegment:
    return _cached_resolution(name, depth, N)


def cochain_complex(res: ResolutionSegment, M: int, depth: int | None = None) -> CochainComplex:
    """Hom_G(P_*, Z/2^M) with trivial action: C^n = (Z/2^M)^{r_n}."""
    if M > res.N:
        raise ValueError("coefficient precision exceeds the resolution precision")
    depth = res.depth if depth is None else depth
    order = res.group.order
    mod = 1 << M
    bounds = []
    for n in range(depth):
        r_src, r_tgt = res.ranks[n], res.ranks[n + 1]
        d = zeros(r_tgt, r_src)
        for j, img in enumerate(res.images[n + 1]):
            for i in range(r_src):
                d[j, i] = sum(img[i * order:(i + 1) * order]) % mod
        bounds.append(d)
    terms = [[M] * res.ranks[n] for n in range(depth + 1)]
    return CochainComplex(terms, bounds, M)


# ---------------------------------------------------------------------------
# The C3 action on Q8 cohomology


def chain_lift(res: ResolutionSegment) -> list[list[list[int]]]:
    """f_n : P_n -> P_n with f(g x) = φ(g) f(x), lifting the identity of Z."""
    group = res.group
    phi = group.automorphism
    if phi is None:
        raise ValueError(f"{group.name} has no automorphism")
    order = group.order
    N = res.N
    mod = 1 << N
    lifts: list[list[list[int]]] = []
    e0 = [0] * order
    e0[0] = 1
    lifts.append([e0])

    def apply(n: int, v: Sequence[int]) -> list[int]:
        out = [0] * (res.ranks[n] * order)
        for idx, a in enumerate(v):
            if a:
                i, g = divmod(idx, order)
                moved = res.left_multiply(phi[g], lifts[n][i])
                out = [(x + a * y) % mod for x, y in zip(out, moved)]
        return out

    for n in range(1, res.depth + 1):
        D = res.full_matrix(n)
        row = []
        for img in res.images[n]:
            target = apply(n - 1, img)
            x = solve(D, target, N)
            if x is None:
                raise ArithmeticError(f"chain lift obstructed in degree {n}")
            row.append([int(a) for a in x[:, 0]])
        lifts.append(row)
    return lifts


def cochain_action(res: ResolutionSegment, lifts: list[list[list[int]]], n: int, M: int) -> Matrix:
    """Matrix of c ↦ c∘f_n on C^n = (Z/2^M)^{r_n}."""
    order = res.group.order
    r = res.ranks[n]
    out = zeros(r, r)
    for j, img in enumerate(lifts[n]):
        for i in range(r):
            out[j, i] = sum(img[i * order:(i + 1) * order]) % (1 << M)
    return out


@dataclass
class QuaternionCohomology:
    """H^n(Q8; Z/2^M) with the induced C3 action, through degree ``depth``."""

    M: int
    depth: int
    groups: list
    actions: list

    def action(self, n: int) -> Matrix:
        return self.actions[n]

    def invariants(self, n: int) -> InvariantFactors:
        H = self.groups[n]
        exps = list(H.exponents)
        if not exps:
            return InvariantFactors()
        A = self.actions[n]
        mod = 1 << self.M
        inv3 = pow(3, -1, mod)
        k = len(exps)
        P = (identity(k) + A + matmul(A, A)) * inv3 % mod
        return image_of_idempotent(exps, P, self.M)


@lru_cache(maxsize=None)
def quaternion_cohomology(M: int, depth: int = DEFAULT_DEPTH) -> QuaternionCohomology:
    res = resolution("Q8", depth, max(RESOLUTION_PRECISION, M))
    C = cochain_complex(res, M, depth)
    C.check()
    lifts = chain_lift(res)
    groups, actions = [], []
    for n in range(depth):
        F = cochain_action(res, lifts, n, M)
        F_next = cochain_action(res, lifts, n + 1, M)
        # f^* commutes with the coboundary
        if not is_zero_mod(matmul(C.boundary(n), F) - matmul(F_next, C.boundary(n)), M):
            raise ArithmeticError(f"lift is not a chain map in degree {n}")
        H = C.homology_module(n)
        A = induced_endomorphism(H, F)
        A3 = matmul(matmul(A, A), A)
        k = len(H.exponents)
        for i in range(k):
            for j in range(k):
                diff = int(A3[i, j]) - (1 if i == j else 0)
                if diff % (1 << H.exponents[i]):
                    raise ArithmeticError(f"C3 action on H^{n} does not have order 3")
        groups.append(H)
        actions.append(A)
    return QuaternionCohomology(M, depth, groups, actions)


# ---------------------------------------------------------------------------
# Public cohomology


GROUPS = ("Q8", "G24", "C6")


def _coefficient_bits(coeffs: str | int) -> int:
    if coeffs in ("F2", 1):
        return 1
    if isinstance(coeffs, int):
        return coeffs
    if coeffs.startswith("Z/2^"):
        return int(coeffs[4:])
    raise ValueError(f"unknown coefficients {coeffs!r}")


def cohomology_finite(G: str, coeffs: str | int, n: int, depth: int = DEFAULT_DEPTH) -> InvariantFactors:
    """H^n(G; Z/2^M) with trivial action; coeffs is "F2", "Z/2^M" or M."""
    if G not in GROUPS:
        raise ValueError(f"unknown group {G!r}")
    if n < 0:
        return InvariantFactors()
    if n >= depth:
        raise ValueError(f"degree {n} exceeds resolution depth {depth}")
    M = _coefficient_bits(coeffs)
    if G == "C6":
        res = resolution("C2", depth, max(RESOLUTION_PRECISION, M))
        return cochain_complex(res, M, depth).homology(n)
    Q = quaternion_cohomology(M, depth)
    if G == "Q8":
        return Q.groups[n].invariant_factors()
    return Q.invariants(n)


def _multiset_minus(big: Sequence[int], small: Sequence[int]) -> list[int]:
    out = list(big)
    for e in small:
        if e not in out:
            raise ArithmeticError("universal coefficient decomposition failed")
        out.remove(e)
    return out


def integral_cohomology_finite(G: str, n_max: int, depth: int = DEFAULT_DEPTH,
                               M: int = 64, margin: int = STABILITY_MARGIN) -> list[InvariantFactors]:
    """H^n(G; Z2) for n <= n_max via the universal coefficient sequence.

    For M beyond the torsion exponent, H^n(G; Z/2^M) ≅ H^n(G; Z2)/2^M ⊕
    H^{n+1}(G; Z2)[2^M], so each integral group is peeled off from the
    previous one. Agreement at M and M + margin certifies the answer.
    """
    runs = []
    for bits in (M, M + margin):
        groups = [InvariantFactors((), 1)]
        prev_reduction = [bits]
        for n in range(n_max):
            h = cohomology_finite(G, bits, n, depth)
            nxt = _multiset_minus(h.torsion, prev_reduction)
            if any(e >= bits - 1 for e in nxt):
                raise ArithmeticError("integral torsion too close to precision")
            groups.append(InvariantFactors(tuple(nxt)))
            prev_reduction = nxt
        runs.append(groups)
    if runs[0] != runs[1]:
        raise ArithmeticError("integral cohomology unstable under precision change")
    return runs[0]


def periodicity_check(G: str, coeffs: str | int, n: int, depth: int = DEFAULT_DEPTH) -> bool:
    """H^{n+4} ≅ H^n as invariant factors (for n >= 1, or trivially n = 0 dims)."""
    if G != "Q8":
        raise ValueError("periodicity is checked for Q8")
    if n + 4 >= depth:
        raise ValueError("degree beyond resolution depth")
    a = cohomology_finite(G, coeffs, n, depth)
    b = cohomology_finite(G, coeffs, n + 4, depth)
    if n == 0:
        return a.mod2_dim() == b.mod2_dim()
    return a == b


def omega_on_h1() -> Matrix:
    """The C3 action on H^1(Q8; F2) in the computed basis."""
    return quaternion_cohomology(1).action(1)


def omega_matches_presentation() -> bool:
    """ω acts on H^1(Q8; F2) as x ↦ y, y ↦ x + y: A has order 3 with A² + A + 1 = 0."""
    A = omega_on_h1()
    if A.shape != (2, 2):
        return False
    S = (matmul(A, A) + A + identity(2)) % 2
    return is_zero_mod(S, 1) and not is_zero_mod(A - identity(2), 1)


# ---------------------------------------------------------------------------
# Presentations and restriction


def presentation_dims(ring: str, n_max: int) -> list[int]:
    """Degree-wise F2-dimensions of the quoted presentations."""
    if ring == "Q8":
        return _quotient_dims(n_max)
    if ring == "G24":
        return [int(n % 4 in (0, 3)) for n in range(n_max + 1)]
    if ring == "C6":
        return [1] * (n_max + 1)
    raise ValueError(ring)


def _quotient_dims(n_max: int) -> list[int]:
    """dim_n of F2[x, y, k]/(x²+xy+y², x²y+xy²) with |x| = |y| = 1, |k| = 4."""
    def monomials(n):
        return [(a, b, c) for c in range(n // 4 + 1) for a in range(n - 4 * c + 1)
                for b in [n - 4 * c - a]]

    rels = [{(2, 0, 0): 1, (1, 1, 0): 1, (0, 2, 0): 1}, {(2, 1, 0): 1, (1, 2, 0): 1}]
    dims = []
    for n in range(n_max + 1):
        basis = monomials(n)
        index = {m: i for i, m in enumerate(basis)}
        rows = []
        for rel in rels:
            rdeg = sum(a + b + 4 * c for (a, b, c) in [next(iter(rel))])
            if rdeg > n:
                continue
            for mult in monomials(n - rdeg):
                row = [0] * len(basis)
                for (a, b, c) in rel:
                    m = (a + mult[0], b + mult[1], c + mult[2])
                    row[index[m]] ^= 1
                rows.append(row)
        dims.append(len(basis) - f2_rank(rows, len(basis)))
    return dims


@dataclass(frozen=True)
class RingClass:
    """A monomial in a quoted presentation: exponents by generator name."""

    ring: str
    exponents: tuple[tuple[str, int], ...]

    @classmethod
    def of(cls, ring: str, **exps: int) -> "RingClass":
        return cls(ring, tuple(sorted((k, v) for k, v in exps.items() if v)))

    @property
    def degree(self) -> int:
        degs = {"x": 1, "y": 1, "k": 4, "z": 3, "h": 1, "g": 2}
        return sum(degs[k] * v for k, v in self.exponents)

    def exp(self, name: str) -> int:
        return dict(self.exponents).get(name, 0)

    def __mul__(self, other: "RingClass") -> "RingClass":
        if self.ring != other.ring:
            raise ValueError("product across presentations")
        exps = dict(self.exponents)
        for k, v in other.exponents:
            exps[k] = exps.get(k, 0) + v
        return RingClass.of(self.ring, **exps)

    def is_zero(self) -> bool:
        """Vanishing forced by the monomial relations z² = 0."""
        return self.ring == "G24/F2" and self.exp("z") >= 2

    def __str__(self) -> str:
        if not self.exponents:
            return "1"
        return "*".join(k if v == 1 else f"{k}^{v}" for k, v in self.exponents)


ZERO = None


def restriction_G24_to_C6(c: RingClass) -> RingClass | None:
    """Restriction along C6 ⊂ G24: integrally k ↦ g²; mod 2 z ↦ 0, k ↦ h⁴."""
    if c.ring == "G24/Z2":
        unknown = {k for k, _ in c.exponents} - {"k"}
        if unknown:
            raise ValueError(f"unknown class {c}")
        return RingClass.of("C6/Z2", g=2 * c.exp("k"))
    if c.ring == "G24/F2":
        unknown = {k for k, _ in c.exponents} - {"k", "z"}
        if unknown:
            raise ValueError(f"unknown class {c}")
        if c.exp("z") or c.is_zero():
            return ZERO
        return RingClass.of("C6/F2", h=4 * c.exp("k"))
    raise ValueError(f"restriction is defined on G24 classes, not {c.ring}")
