"""The mod-2 action of the quaternion units on F4[u1]/(u1^T)[u^{±1}].

Only the action on v1 = u1 u^{-1} and v2 = u^{-3} is encoded: i, j, k fix
v1 and send v2 to v2 (ω^n u1 + 1)^3 with n = 0, 1, 2. An element is in the
domain of the action when each of its monomials u1^a u^b is a product
v1^a v2^m, that is when a + b is divisible by 3.
"""

from __future__ import annotations

from .coefficients import F4_ONE, F4_ZERO, OMEGA, F4Elem, MSeries, series, series_mul, series_pow

GROUP_ELEMENTS = ("e", "i", "j", "k")
DEFAULT_TRUNCATION = 16

_ROTATION = {"i": 0, "j": 1, "k": 2}


def _unit_factor(g: str, m: int, T: int) -> tuple[F4Elem, ...]:
    """(ω^n u1 + 1)^{3m} as a truncated series."""
    c = OMEGA ** _ROTATION[g]
    return series_pow(series([F4_ONE, c], T), 3 * m)


def _v2_exponent(a: int, b: int) -> int:
    if (a + b) % 3:
        raise ValueError(f"u1^{a} u^{b} is not a monomial in v1 and v2")
    return -(a + b) // 3


def act(g: str, x: MSeries) -> MSeries:
    """g_*(x) for g in {e, i, j, k}, truncated at u1^T."""
    if g not in GROUP_ELEMENTS:
        raise ValueError(f"unknown group element {g!r}")
    if g == "e" or x.is_zero():
        return x
    T = x.T
    out = MSeries(tuple([F4_ZERO] * T), x.uexp)
    for a, c in enumerate(x.coeffs):
        if not c:
            continue
        m = _v2_exponent(a, x.uexp)
        mono = [F4_ZERO] * T
        mono[a] = c
        out = out + MSeries(series_mul(tuple(mono), _unit_factor(g, m, T)), x.uexp)
    return out


def quaternion_norm_sum(x: MSeries) -> MSeries:
    """(e + i + j + k)_*(x)."""
    out = MSeries(tuple([F4_ZERO] * x.T), x.uexp)
    for g in GROUP_ELEMENTS:
        out = out + act(g, x)
    return out


def reduce_c4(T: int = DEFAULT_TRUNCATION) -> MSeries:
    """c4 = 9(u1^4 u^{-4} + 8 u1 u^{-4}) reduced mod 2."""
    integral = {4: 9, 1: 9 * 8}
    coeffs = [F4Elem(integral.get(m, 0) % 2, 0) for m in range(T)]
    return MSeries(tuple(coeffs), -4)


def v1v2_identity(T: int) -> bool:
    v1, v2 = MSeries.v1(T), MSeries.v2(T)
    return quaternion_norm_sum(v1 * v2) == v1 ** 4


def fixes_v1(T: int = DEFAULT_TRUNCATION) -> bool:
    v1 = MSeries.v1(T)
    return all(act(g, v1) == v1 for g in GROUP_ELEMENTS)


def domain_monomials(T: int, uexp_range: range) -> list[MSeries]:
    """All monomials u1^a u^b with a < T in the domain of the action."""
    out = []
    for b in uexp_range:
        for a in range(T):
            if (a + b) % 3 == 0:
                out.append(MSeries.monomial(a, b, T))
    return out


def ideal_check(T: int = DEFAULT_TRUNCATION, uexp_range: range = range(-12, 13)) -> bool:
    """The norm sum sends monomials in (2, u1^4) into (2, u1^5)."""
    for x in domain_monomials(T, uexp_range):
        if x.u1_valuation() >= 4 and quaternion_norm_sum(x).u1_valuation() < 5:
            return False
    return True


def frobenius_symmetry(T: int = DEFAULT_TRUNCATION, uexp_range: range = range(-12, 13)) -> bool:
    """Frobenius intertwines j and k, and fixes the action of i."""
    for x in domain_monomials(T, uexp_range):
        for c in (F4_ONE, OMEGA):
            y = x.scale(c)
            if act("j", y).frobenius() != act("k", y.frobenius()):
                return False
            if act("i", y).frobenius() != act("i", y.frobenius()):
                return False
    return True


def verify(T_range: range = range(4, 17)) -> dict[str, bool]:
    """Every identity this module checks, keyed by a short label."""
    c4 = reduce_c4()
    return {
        "norm_sum_v1v2": all(v1v2_identity(T) for T in T_range),
        "reduce_c4": c4 == MSeries.v1(DEFAULT_TRUNCATION) ** 4 and c4.degree == 8,
        "fixes_v1": fixes_v1(),
        "ideal_2_u1^4": ideal_check(),
        "frobenius_symmetry": frobenius_symmetry(),
    }
