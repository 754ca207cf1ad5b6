"""Finitely generated modules over Z/2^N: Smith form, subquotients, homology.

Matrices are numpy arrays of Python integers (``dtype=object``) so that
arithmetic stays exact at any precision. A module ``R^m / diag(2^e)`` with
``R = Z/2^N`` is described by its list of exponents ``e`` (each at most N).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .coefficients import STABILITY_MARGIN, valuation

Matrix = np.ndarray


def mat(rows: Iterable[Iterable[int]], shape: tuple[int, int] | None = None) -> Matrix:
    """Object-dtype integer matrix; ``shape`` is needed for empty inputs."""
    rows = [[int(x) for x in row] for row in rows]
    if not rows or not rows[0]:
        return zeros(*(shape or (len(rows), 0)))
    out = zeros(len(rows), len(rows[0]))
    for i, row in enumerate(rows):
        out[i] = row
    return out


def zeros(m: int, n: int) -> Matrix:
    a = np.empty((m, n), dtype=object)
    a.fill(0)
    return a


def identity(n: int) -> Matrix:
    a = zeros(n, n)
    for i in range(n):
        a[i, i] = 1
    return a


def reduce_mod(a: Matrix, N: int) -> Matrix:
    mod = 1 << N
    out = zeros(*a.shape)
    for idx, x in np.ndenumerate(a):
        out[idx] = int(x) % mod
    return out


def matmul(a: Matrix, b: Matrix, N: int | None = None) -> Matrix:
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
    if a.shape[0] == 0 or b.shape[1] == 0 or a.shape[1] == 0:
        return zeros(a.shape[0], b.shape[1])
    out = a.dot(b)
    return out if N is None else reduce_mod(out, N)


def hstack(*blocks: Matrix) -> Matrix:
    rows = {b.shape[0] for b in blocks}
    if len(rows) != 1:
        raise ValueError("hstack of blocks with different heights")
    m = rows.pop()
    n = sum(b.shape[1] for b in blocks)
    out = zeros(m, n)
    col = 0
    for b in blocks:
        out[:, col:col + b.shape[1]] = b
        col += b.shape[1]
    return out


def is_zero_mod(a: Matrix, N: int) -> bool:
    mod = 1 << N
    return all(int(x) % mod == 0 for x in a.flat)


# ---------------------------------------------------------------------------
# Smith normal form over the chain ring Z/2^N


@dataclass(frozen=True)
class SmithForm:
    """``U @ A @ V = D`` over Z/2^N with explicit inverses of U and V."""

    D: Matrix
    U: Matrix
    V: Matrix
    Uinv: Matrix
    Vinv: Matrix
    N: int

    @property
    def exponents(self) -> tuple[int, ...]:
        """Valuations of the diagonal, N for zero entries."""
        k = min(self.D.shape)
        return tuple(valuation(int(self.D[i, i]), cap=self.N) for i in range(k))

    @property
    def rank(self) -> int:
        """Number of nonzero diagonal entries."""
        return sum(1 for e in self.exponents if e < self.N)


def smith_form(A: Matrix, N: int) -> SmithForm:
    """Smith normal form by pivoting on an entry of minimal 2-adic valuation."""
    mod = 1 << N
    A = reduce_mod(np.asarray(A, dtype=object), N)
    m, n = A.shape
    U, Uinv, V, Vinv = identity(m), identity(m), identity(n), identity(n)
    for k in range(min(m, n)):
        best = None
        for (i, j), x in np.ndenumerate(A[k:, k:]):
            if x:
                v = valuation(int(x))
                if best is None or v < best[0]:
                    best = (v, i + k, j + k)
                    if v == 0:
                        break
        if best is None:
            break
        v, i, j = best
        if i != k:
            A[[k, i]] = A[[i, k]]
            U[[k, i]] = U[[i, k]]
            Uinv[:, [k, i]] = Uinv[:, [i, k]]
        if j != k:
            A[:, [k, j]] = A[:, [j, k]]
            V[:, [k, j]] = V[:, [j, k]]
            Vinv[[k, j]] = Vinv[[j, k]]
        unit = int(A[k, k]) >> v
        unit_inv = pow(unit, -1, mod)
        A[k] = (A[k] * unit_inv) % mod
        U[k] = (U[k] * unit_inv) % mod
        Uinv[:, k] = (Uinv[:, k] * unit) % mod
        for i in range(m):
            if i != k and A[i, k]:
                c = int(A[i, k]) >> v
                A[i] = (A[i] - c * A[k]) % mod
                U[i] = (U[i] - c * U[k]) % mod
                Uinv[:, k] = (Uinv[:, k] + c * Uinv[:, i]) % mod
        for j in range(n):
            if j != k and A[k, j]:
                c = int(A[k, j]) >> v
                A[:, j] = (A[:, j] - c * A[:, k]) % mod
                V[:, j] = (V[:, j] - c * V[:, k]) % mod
                Vinv[k] = (Vinv[k] + c * Vinv[j]) % mod
    return SmithForm(A, U, V, Uinv, Vinv, N)


def kernel(A: Matrix, N: int) -> Matrix:
    """Columns generating {x : A x = 0} over Z/2^N."""
    A = np.asarray(A, dtype=object)
    n = A.shape[1]
    if n == 0:
        return zeros(0, 0)
    sf = smith_form(A, N)
    exps = list(sf.exponents) + [N] * (n - min(A.shape))
    cols = []
    for i, e in enumerate(exps):
        if e == 0:
            continue
        y = zeros(n, 1)
        y[i, 0] = 1 << (N - e) if e < N else 1
        cols.append(y)
    if not cols:
        return zeros(n, 0)
    return matmul(sf.V, hstack(*cols), N)


def solve(A: Matrix, b: Sequence[int] | Matrix, N: int) -> Matrix | None:
    """Some x with A x = b over Z/2^N, or None when b is not in the image."""
    mod = 1 << N
    A = np.asarray(A, dtype=object)
    m, n = A.shape
    b = np.asarray(b, dtype=object).reshape(m, 1)
    if n == 0:
        return zeros(0, 1) if is_zero_mod(b, N) else None
    sf = smith_form(A, N)
    ub = matmul(sf.U, b, N)
    z = zeros(n, 1)
    exps = sf.exponents
    for i in range(m):
        bi = int(ub[i, 0]) % mod
        e = exps[i] if i < len(exps) else N
        if e == N:
            if bi:
                return None
            continue
        if valuation(bi, cap=N) < e:
            return None
        d = int(sf.D[i, i]) >> e
        z[i, 0] = ((bi >> e) * pow(d, -1, mod)) % mod
    return matmul(sf.V, z, N)


def inverse(A: Matrix, N: int) -> Matrix:
    sf = smith_form(A, N)
    if A.shape[0] != A.shape[1] or any(e != 0 for e in sf.exponents):
        raise ValueError("matrix is not invertible over Z/2^N")
    # D is the identity, so A^{-1} = V U
    return matmul(sf.V, sf.U, N)


def relation_matrix(exps: Sequence[int], N: int) -> Matrix:
    """Columns 2^e_i * e_i presenting R^m / diag(2^e)."""
    m = len(exps)
    cols = [i for i, e in enumerate(exps) if e < N]
    out = zeros(m, len(cols))
    for c, i in enumerate(cols):
        out[i, c] = 1 << exps[i]
    return out


# ---------------------------------------------------------------------------
# Invariant factors


_FIELD_NAMES = {"Z2": "Z/2", "W": "F4"}


@dataclass(frozen=True)
class InvariantFactors:
    """A finitely generated 2-adic module: free rank plus cyclic 2-power orders.

    ``torsion`` holds exponents k of the summands Z/2^k in ascending order;
    ``free`` counts summands certified free (full precision at two precisions).
    ``ring`` is "Z2" or "W"; a W-module has W, W/2^k summands.
    """

    torsion: tuple[int, ...] = ()
    free: int = 0
    ring: str = "Z2"

    def __post_init__(self) -> None:
        t = tuple(sorted(int(e) for e in self.torsion if e > 0))
        object.__setattr__(self, "torsion", t)

    @classmethod
    def zero(cls, ring: str = "Z2") -> "InvariantFactors":
        return cls((), 0, ring)

    @classmethod
    def cyclic(cls, exponent: int, ring: str = "Z2") -> "InvariantFactors":
        return cls((exponent,), 0, ring)

    @classmethod
    def parse(cls, text: str) -> "InvariantFactors":
        """Inverse of ``str``: e.g. "Z2 + Z/4 + Z/8", "W + W/4", "F4", "0"."""
        text = text.strip()
        if text in ("0", ""):
            return cls()
        free, torsion, ring = 0, [], "Z2"
        for part in text.replace("⊕", "+").split("+"):
            part = part.strip()
            count = 1
            if "^" in part and not part.startswith("Z/"):
                part, c = part.split("^")
                count = int(c)
            elif part.startswith("(") and ")^" in part:
                inner, c = part[1:].split(")^")
                part, count = inner, int(c)
            if part in ("Z2", "W"):
                ring = "W" if part == "W" else ring
                free += count
            elif part in ("Z/2", "F4", "F2"):
                ring = "W" if part == "F4" else ring
                torsion += [1] * count
            elif part.startswith("Z/") or part.startswith("W/"):
                ring = "W" if part.startswith("W/") else ring
                order = int(part[2:])
                torsion += [valuation(order)] * count
            else:
                raise ValueError(f"cannot parse summand {part!r}")
        return cls(tuple(torsion), free, ring)

    def __add__(self, other: "InvariantFactors") -> "InvariantFactors":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.ring != other.ring:
            raise ValueError("direct sum across coefficient rings")
        return InvariantFactors(self.torsion + other.torsion, self.free + other.free, self.ring)

    def is_zero(self) -> bool:
        return not self.torsion and self.free == 0

    @property
    def log_order(self) -> int:
        """log2 of the order of the torsion part."""
        return sum(self.torsion)

    @property
    def order(self) -> int:
        if self.free:
            raise ValueError("infinite module has no finite order")
        return 1 << self.log_order

    @property
    def ngens(self) -> int:
        return self.free + len(self.torsion)

    def mod2_dim(self) -> int:
        """Rank of M/2 (equivalently of the 2-torsion of the torsion part plus free)."""
        return self.ngens

    def two_torsion_dim(self) -> int:
        return len(self.torsion)

    def factors(self, N: int) -> tuple[int, ...]:
        """Orders as 2-powers, free summands encoded as 2^N."""
        return tuple([1 << N] * self.free + [1 << e for e in sorted(self.torsion, reverse=True)])

    def with_ring(self, ring: str) -> "InvariantFactors":
        return InvariantFactors(self.torsion, self.free, ring)

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        base = "W" if self.ring == "W" else "Z2"
        parts = [base] * self.free
        for e in self.torsion:
            if e == 1:
                parts.append(_FIELD_NAMES[self.ring])
            else:
                parts.append(f"{'W' if self.ring == 'W' else 'Z'}/{1 << e}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"InvariantFactors({self})"


def finite_factors(exps: Iterable[int], N: int) -> InvariantFactors:
    """Invariant factors of a finite Z/2^N-module; 2^N stays a torsion order."""
    return InvariantFactors(tuple(e for e in exps if e > 0))


def stabilize(low: InvariantFactors, high: InvariantFactors, N: int,
              margin: int = STABILITY_MARGIN) -> InvariantFactors:
    """Compare answers computed at precisions N and N + margin.

    Torsion that stays put is genuine. A summand of order 2^e at precision N
    that becomes 2^(e + margin) is the shadow of a free summand (for instance
    a copy of 4*Z2 reads as Z/2^(N-2)). Only summands above N/2 are eligible,
    which separates them from the small torsion of every computation here.
    Anything else means the precision cannot separate the two and raises.
    """
    if low.free != high.free:
        raise ArithmeticError("free rank changed between precisions")
    pending = Counter(low.torsion)
    free, torsion = low.free, []
    for e in sorted(high.torsion, reverse=True):
        if e - margin > N // 2 and pending[e - margin]:
            pending[e - margin] -= 1
            free += 1
        elif pending[e]:
            pending[e] -= 1
            torsion.append(e)
        else:
            raise ArithmeticError(
                f"torsion unstable between precisions {N} and {N + margin}: {low} vs {high}")
    if sum(pending.values()):
        raise ArithmeticError(f"unmatched summands between precisions: {low} vs {high}")
    return InvariantFactors(tuple(torsion), free, low.ring)


# ---------------------------------------------------------------------------
# Subquotients with coordinates


class Subquotient:
    """The module S1 / (S1 ∩ S2) for submodules of (Z/2^N)^m given by generators.

    After construction, ``exponents`` lists the cyclic orders of the quotient,
    ``generators`` holds ambient representatives of the canonical cyclic
    generators, and ``coords`` maps an element of S1 to coordinates.
    """

    def __init__(self, S1: Matrix, S2: Matrix, N: int):
        S1 = np.asarray(S1, dtype=object)
        S2 = np.asarray(S2, dtype=object)
        self.N = N
        self.ambient = S1.shape[0]
        self.S1 = reduce_mod(S1, N)
        p = S1.shape[1]
        if S2.shape[1]:
            both = hstack(self.S1, reduce_mod(S2, N))
        else:
            both = self.S1
        rel = kernel(both, N)[:p] if p else zeros(0, 0)
        if p == 0:
            self._U = zeros(0, 0)
            self._Uinv = zeros(0, 0)
            self._exps: list[int] = []
        elif rel.shape[1] == 0:
            self._U, self._Uinv = identity(p), identity(p)
            self._exps = [N] * p
        else:
            sf = smith_form(rel, N)
            exps = list(sf.exponents) + [N] * (p - min(rel.shape))
            self._U, self._Uinv, self._exps = sf.U, sf.Uinv, exps
        self._keep = [i for i, e in enumerate(self._exps) if e > 0]

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(self._exps[i] for i in self._keep)

    @property
    def generators(self) -> Matrix:
        if not self._keep:
            return zeros(self.ambient, 0)
        cols = self._Uinv[:, self._keep]
        return matmul(self.S1, cols, self.N)

    def coords(self, x: Sequence[int] | Matrix) -> list[int]:
        c = solve(self.S1, x, self.N)
        if c is None:
            raise ValueError("element does not lie in the numerator submodule")
        y = matmul(self._U, c, self.N)
        return [int(y[i, 0]) % (1 << self._exps[i]) for i in self._keep]

    def invariant_factors(self) -> InvariantFactors:
        return finite_factors(self.exponents, self.N)

    def is_zero(self, x: Sequence[int] | Matrix) -> bool:
        return not any(self.coords(x))


def induced_endomorphism(H: Subquotient, f: Matrix) -> Matrix:
    """Matrix of the map induced by an ambient matrix f on a subquotient."""
    gens = H.generators
    k = gens.shape[1]
    out = zeros(k, k)
    for j in range(k):
        image = matmul(f, gens[:, [j]], H.N)
        out[:, j] = H.coords(image)
    return out


def image_of_idempotent(exps: Sequence[int], P: Matrix, N: int) -> InvariantFactors:
    """Invariant factors of P(M) for an idempotent P on M = ⊕ Z/2^e."""
    k = len(exps)
    one_minus = (identity(k) - P) % (1 << N)
    rel = hstack(one_minus, relation_matrix(exps, N)) if k else zeros(0, 0)
    return cokernel(rel, N)


def cokernel(A: Matrix, N: int) -> InvariantFactors:
    """Invariant factors of (Z/2^N)^m / column span of A."""
    m = A.shape[0]
    if m == 0:
        return InvariantFactors()
    if A.shape[1] == 0:
        return finite_factors([N] * m, N)
    sf = smith_form(A, N)
    exps = list(sf.exponents) + [N] * (m - min(A.shape))
    return finite_factors(exps, N)


# ---------------------------------------------------------------------------
# Presentations and cochain complexes


@dataclass(frozen=True)
class Presentation:
    """Generators with (internal, cohomological) degrees modulo relation columns."""

    generator_degrees: tuple[tuple[int, int], ...]
    relations: Matrix
    N: int

    def __post_init__(self) -> None:
        if self.relations.shape[0] != len(self.generator_degrees):
            raise ValueError("relation rows must match generators")
        for col in range(self.relations.shape[1]):
            degs = {self.generator_degrees[i] for i in range(self.relations.shape[0])
                    if int(self.relations[i, col]) % (1 << self.N)}
            if len(degs) > 1:
                raise ValueError("inhomogeneous relation")

    def invariant_factors(self) -> InvariantFactors:
        return cokernel(self.relations, self.N)


@dataclass
class CochainComplex:
    """Cochain complex C^0 -> C^1 -> ... over Z/2^N.

    ``terms[n]`` lists exponents of the cyclic summands of C^n (N for a free
    Z/2^N summand) and ``boundaries[n]`` is the matrix of d^n : C^n -> C^{n+1}.
    With ``lattice=True`` the terms are free Z2-lattices, the matrices are
    integral lifts known modulo 2^N, and homology is read off from elementary
    divisors.
    """

    terms: list[list[int]]
    boundaries: list[Matrix]
    N: int
    lattice: bool = False
    _checked: bool = field(default=False, repr=False)

    @classmethod
    def free(cls, ranks: Sequence[int], boundaries: Sequence[Matrix], N: int,
             lattice: bool = False) -> "CochainComplex":
        return cls([[N] * r for r in ranks], list(boundaries), N, lattice)

    def dim(self, n: int) -> int:
        return len(self.terms[n]) if 0 <= n < len(self.terms) else 0

    def boundary(self, n: int) -> Matrix:
        if 0 <= n < len(self.boundaries):
            return self.boundaries[n]
        return zeros(self.dim(n + 1), self.dim(n))

    def check(self) -> None:
        """Shapes, well-definedness on relations, and d∘d = 0."""
        N = self.N
        for n in range(len(self.terms)):
            d = self.boundary(n)
            if d.shape != (self.dim(n + 1), self.dim(n)):
                raise ValueError(f"boundary {n} has shape {d.shape}")
            if not self.lattice:
                src, tgt = self.terms[n], self.terms[n + 1] if n + 1 < len(self.terms) else []
                for j, e in enumerate(src):
                    for i, f in enumerate(tgt):
                        if (int(d[i, j]) << e) % (1 << f):
                            raise ArithmeticError(f"boundary {n} not defined on relations")
            dd = matmul(self.boundary(n + 1), d)
            tgt2 = self.terms[n + 2] if n + 2 < len(self.terms) else []
            for i in range(dd.shape[0]):
                f = N if self.lattice else tgt2[i]
                for j in range(dd.shape[1]):
                    if int(dd[i, j]) % (1 << f):
                        raise ArithmeticError(f"d∘d ≠ 0 at position {n}")
        self._checked = True

    def cycles(self, n: int) -> Matrix:
        """Generators of ker d^n modulo the relations of C^{n+1}."""
        N = self.N
        d = self.boundary(n)
        tgt = self.terms[n + 1] if n + 1 < len(self.terms) else []
        scaled = zeros(*d.shape)
        for i in range(d.shape[0]):
            scaled[i] = (d[i] * (1 << (N - tgt[i]))) % (1 << N)
        return kernel(scaled, N) if self.dim(n) else zeros(0, 0)

    def boundaries_in(self, n: int) -> Matrix:
        """Image of d^{n-1} together with the relations of C^n."""
        rel = relation_matrix(self.terms[n], self.N)
        if n == 0:
            return rel
        return hstack(self.boundary(n - 1), rel)

    def homology_module(self, n: int) -> Subquotient:
        if not self._checked:
            self.check()
        return Subquotient(self.cycles(n), self.boundaries_in(n), self.N)

    def homology(self, n: int) -> InvariantFactors:
        if not self._checked:
            self.check()
        if self.lattice:
            return self._lattice_homology(n)
        return self.homology_module(n).invariant_factors()

    def _lattice_homology(self, n: int) -> InvariantFactors:
        N = self.N
        m = self.dim(n)
        rank_out = smith_form(self.boundary(n), N).rank if m and self.dim(n + 1) else 0
        torsion: list[int] = []
        rank_in = 0
        if n > 0 and m and self.dim(n - 1):
            sf = smith_form(self.boundary(n - 1), N)
            rank_in = sf.rank
            torsion = [e for e in sf.exponents if 0 < e < N]
        free = m - rank_out - rank_in
        return InvariantFactors(tuple(torsion), free)


def homology(C: CochainComplex, n: int) -> InvariantFactors:
    return C.homology(n)


def lattice_homology_stable(build: Callable[[int], CochainComplex], n: int,
                            N: int, margin: int = STABILITY_MARGIN) -> InvariantFactors:
    """Lattice homology certified by agreement at precisions N and N + margin."""
    low = build(N).homology(n)
    high = build(N + margin).homology(n)
    if low != high:
        raise ArithmeticError(f"lattice homology unstable: {low} vs {high}")
    return low


# ---------------------------------------------------------------------------
# Linear algebra over F2 with deterministic pivots


def f2_rref(rows: Sequence[Sequence[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form over F2 (leftmost pivots) and pivot columns."""
    work = [[x & 1 for x in r] for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(work)) if work[i][c]), None)
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        for i in range(len(work)):
            if i != r and work[i][c]:
                work[i] = [a ^ b for a, b in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
    return work[:r], pivots


def f2_rank(rows: Sequence[Sequence[int]], ncols: int) -> int:
    return len(f2_rref(rows, ncols)[1])


def f2_nullspace(A: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Basis of {x : A x = 0} over F2, one vector per free column."""
    red, pivots = f2_rref(A, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [0] * ncols
        x[f] = 1
        for row, p in zip(red, pivots):
            if row[f]:
                x[p] = 1
        basis.append(x)
    return basis


def f2_reduce(v: Sequence[int], red: Sequence[Sequence[int]], pivots: Sequence[int]) -> list[int]:
    """Normal form of v modulo the row space of an RREF matrix."""
    out = [x & 1 for x in v]
    for row, p in zip(red, pivots):
        if out[p]:
            out = [a ^ b for a, b in zip(out, row)]
    return out


def f2_quotient_basis(Z: Sequence[Sequence[int]], B: Sequence[Sequence[int]],
                      ncols: int) -> list[list[int]]:
    """Normal-form representatives of a basis of span(Z)/span(B) (B ⊆ span Z).

    Representatives are reduced modulo B and echelonized, so the result is
    independent of the input generating sets.
    """
    redB, pivB = f2_rref(B, ncols)
    reduced = [f2_reduce(z, redB, pivB) for z in Z]
    red, piv = f2_rref(reduced, ncols)
    return [f2_reduce(r, redB, pivB) for r in red]
