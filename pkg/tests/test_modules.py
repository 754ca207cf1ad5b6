from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chromsplit.modules import (
    CochainComplex,
    InvariantFactors,
    cokernel,
    f2_nullspace,
    f2_quotient_basis,
    f2_rank,
    identity,
    mat,
    matmul,
    smith_form,
    solve,
    stabilize,
    zeros,
)

N = 16


def _random_matrix(rng: random.Random, m: int, n: int) -> np.ndarray:
    rows = []
    for _ in range(m):
        # mix units with high-valuation entries so the pivoting sees every case
        rows.append([rng.choice([0, 0, rng.getrandbits(N), 2 ** rng.randrange(N), 3 << rng.randrange(6)])
                     for _ in range(n)])
    return mat(rows, (m, n))


@settings(max_examples=1000)
@given(st.integers(0, 2 ** 32), st.integers(1, 6), st.integers(1, 6))
def test_smith_form_round_trip(seed, m, n):
    A = _random_matrix(random.Random(seed), m, n)
    sf = smith_form(A, N)
    D = matmul(matmul(sf.U, A, N), sf.V, N)
    assert np.array_equal(D % (1 << N), sf.D % (1 << N))
    assert np.array_equal(matmul(sf.U, sf.Uinv, N), identity(m))
    assert np.array_equal(matmul(sf.V, sf.Vinv, N), identity(n))
    off = [sf.D[i, j] for i in range(m) for j in range(n) if i != j]
    assert not any(off)
    exps = sf.exponents
    assert list(exps) == sorted(exps)


def test_invariant_factors_parse_and_format():
    for text in ("0", "Z2", "Z/2", "Z2 + Z/2", "Z/2 + Z/8", "W + W/4 + W/8", "F4"):
        assert str(InvariantFactors.parse(text)) == text
    g = InvariantFactors.parse("Z/8 + Z/2")
    assert g.torsion == (1, 3) and g.order == 16 and g.log_order == 4
    assert InvariantFactors.parse("Z/2") + InvariantFactors.cyclic(2) == InvariantFactors.parse("Z/2 + Z/4")
    assert InvariantFactors.parse("Z2 + Z/4").mod2_dim() == 2


def test_cokernel_and_solve():
    assert cokernel(mat([[2, 0], [0, 8]]), N) == InvariantFactors.parse("Z/2 + Z/8")
    x = solve(mat([[2, 0], [0, 3]]), [4, 9], N)
    assert x is not None
    assert solve(mat([[2]]), [1], N) is None


def test_homology_of_multiplication_by_two():
    C = CochainComplex.free([1, 1], [mat([[2]])], N, lattice=True)
    assert C.homology(0).is_zero()
    assert C.homology(1) == InvariantFactors.cyclic(1)


def test_contractible_summand_leaves_homology_unchanged():
    base = CochainComplex.free([1, 1], [mat([[4]])], N, lattice=True)
    bigger = CochainComplex.free([2, 2], [mat([[4, 0], [0, 1]])], N, lattice=True)
    for n in (0, 1):
        assert base.homology(n) == bigger.homology(n)


@given(st.lists(st.integers(1, 5), min_size=1, max_size=3), st.integers(0, 2 ** 16))
def test_euler_characteristic_of_finite_complexes(exps, seed):
    rng = random.Random(seed)
    A = mat([[rng.getrandbits(4) << (max(exps) - e) for e in exps] for _ in exps])
    C = CochainComplex([list(exps), list(exps)], [A], N)
    h0, h1 = C.homology(0), C.homology(1)
    # |C^0| / |C^1| = |H^0| / |H^1| when C^0 and C^1 have equal order
    assert h0.log_order == h1.log_order


def test_stabilize_distinguishes_free_from_torsion():
    low = InvariantFactors((3, N))
    high = InvariantFactors((3, N + 8))
    assert stabilize(low, high, N) == InvariantFactors.parse("Z2 + Z/8")


def test_f2_linear_algebra():
    A = [[1, 1, 0], [0, 1, 1]]
    assert f2_rank(A, 3) == 2
    null = f2_nullspace(A, 3)
    assert null == [[1, 1, 1]]
    Q = f2_quotient_basis([[1, 0, 0], [0, 1, 0]], [[1, 1, 0]], 3)
    assert len(Q) == 1


def test_zeros_identity_shapes():
    assert zeros(2, 3).shape == (2, 3)
    assert np.array_equal(identity(2), mat([[1, 0], [0, 1]]))
