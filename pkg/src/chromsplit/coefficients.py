"""Exact coefficient arithmetic: Z/2^N, F4, W(F4) and truncated u1-series."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

DEFAULT_PRECISION = 64
STABILITY_MARGIN = 8


def working_precision() -> int:
    """Default 2-adic precision, overridable through WORKBENCH_PRECISION."""
    raw = os.environ.get("WORKBENCH_PRECISION")
    if raw is None:
        return DEFAULT_PRECISION
    value = int(raw)
    if value < 4:
        raise ValueError("WORKBENCH_PRECISION must be at least 4")
    return value


def valuation(x: int, cap: int | None = None) -> int:
    """2-adic valuation of an integer; ``cap`` is returned for zero."""
    if x == 0:
        if cap is None:
            raise ValueError("valuation of zero needs a cap")
        return cap
    return (x & -x).bit_length() - 1


def odd_part(x: int) -> int:
    return x >> valuation(x)


IntLike = Union[int, "Residue2Adic"]


@dataclass(frozen=True)
class Residue2Adic:
    """A 2-adic integer known modulo 2^precision."""

    value: int
    precision: int

    def __post_init__(self) -> None:
        if self.precision < 0:
            raise ValueError("negative precision")
        object.__setattr__(self, "value", self.value % (1 << self.precision))

    @classmethod
    def of(cls, x: IntLike, precision: int) -> "Residue2Adic":
        if isinstance(x, Residue2Adic):
            return x.reduce(min(precision, x.precision))
        return cls(int(x), precision)

    @property
    def modulus(self) -> int:
        return 1 << self.precision

    def reduce(self, precision: int) -> "Residue2Adic":
        if precision > self.precision:
            raise ValueError("cannot raise precision by reduction")
        return Residue2Adic(self.value, precision)

    def _coerce(self, other: IntLike) -> tuple[int, int]:
        if isinstance(other, Residue2Adic):
            return other.value, min(self.precision, other.precision)
        return int(other), self.precision

    def __add__(self, other: IntLike) -> "Residue2Adic":
        v, p = self._coerce(other)
        return Residue2Adic(self.value + v, p)

    __radd__ = __add__

    def __sub__(self, other: IntLike) -> "Residue2Adic":
        v, p = self._coerce(other)
        return Residue2Adic(self.value - v, p)

    def __rsub__(self, other: IntLike) -> "Residue2Adic":
        v, p = self._coerce(other)
        return Residue2Adic(v - self.value, p)

    def __neg__(self) -> "Residue2Adic":
        return Residue2Adic(-self.value, self.precision)

    def __mul__(self, other: IntLike) -> "Residue2Adic":
        v, p = self._coerce(other)
        return Residue2Adic(self.value * v, p)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Residue2Adic":
        if e < 0:
            return self.inverse() ** (-e)
        return Residue2Adic(pow(self.value, e, self.modulus), self.precision)

    def is_unit(self) -> bool:
        return self.precision > 0 and self.value % 2 == 1

    def inverse(self) -> "Residue2Adic":
        if not self.is_unit():
            raise ZeroDivisionError("not a 2-adic unit")
        return Residue2Adic(pow(self.value, -1, self.modulus), self.precision)

    def valuation(self) -> int:
        """Valuation, equal to ``precision`` when the residue is zero."""
        return valuation(self.value, cap=self.precision)

    def signed(self) -> int:
        """Representative in (-2^(N-1), 2^(N-1)]."""
        half = self.modulus >> 1
        return self.value - self.modulus if self.value > half else self.value

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.signed()} mod 2^{self.precision}"


def _unit_int(x: IntLike, precision: int) -> tuple[int, int]:
    """Integer representative of x and the number of digits it is known to."""
    if isinstance(x, Residue2Adic):
        return x.value, x.precision
    return int(x), precision


def project_sign(x: IntLike, precision: int | None = None) -> tuple[int, Residue2Adic]:
    """Split a 2-adic unit as eps * y with eps = +-1 and y = 1 mod 4."""
    precision = working_precision() if precision is None else precision
    v, p = _unit_int(x, precision)
    if v % 2 == 0:
        raise ValueError("project_sign needs an odd input")
    if p < 2:
        raise ValueError("sign of a unit needs two known digits")
    if v % 4 == 1:
        return 1, Residue2Adic(v, p)
    return -1, Residue2Adic(-v, p)


def quarter_log(x: IntLike, precision: int | None = None) -> Residue2Adic:
    """(1/4) log(x) for x = 1 mod 4, exact to the requested number of digits.

    With x = 1 + 4m the series is sum_j (-1)^(j+1) 4^(j-1) m^j / j. The j-th
    term carries 2^(2(j-1) - v(j)), so only the odd part of j is inverted and
    summation stops once that exponent reaches the target precision. A
    Residue2Adic input known to P digits determines m to P - 2 digits, and
    the result is truncated accordingly.
    """
    precision = working_precision() if precision is None else precision
    v, p = _unit_int(x, precision + 2)
    if v % 4 != 1:
        raise ValueError("quarter_log needs x = 1 mod 4")
    target = min(precision, p - 2)
    if target <= 0:
        return Residue2Adic(0, 0)
    mod = 1 << target
    m = (v - 1) >> 2
    total = 0
    j = 1
    while True:
        if 2 * (j - 1) - (j.bit_length() - 1) >= target:
            # lower bound for the shift of this and every later term
            break
        shift = 2 * (j - 1) - valuation(j)
        odd = odd_part(j)
        term = (pow(m, j, mod) << shift) * pow(odd, -1, mod)
        total += term if j % 2 == 1 else -term
        j += 1
    return Residue2Adic(total, target)


@dataclass(frozen=True)
class F4Elem:
    """a + b*omega in F4 with omega^2 + omega + 1 = 0."""

    a: int
    b: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", self.a & 1)
        object.__setattr__(self, "b", self.b & 1)

    @classmethod
    def zero(cls) -> "F4Elem":
        return cls(0, 0)

    @classmethod
    def one(cls) -> "F4Elem":
        return cls(1, 0)

    @classmethod
    def omega(cls) -> "F4Elem":
        return cls(0, 1)

    @classmethod
    def all(cls) -> list["F4Elem"]:
        return [cls(a, b) for b in (0, 1) for a in (0, 1)]

    def __add__(self, other: "F4Elem") -> "F4Elem":
        return F4Elem(self.a ^ other.a, self.b ^ other.b)

    __sub__ = __add__

    def __neg__(self) -> "F4Elem":
        return self

    def __mul__(self, other: "F4Elem") -> "F4Elem":
        a, b, c, d = self.a, self.b, other.a, other.b
        return F4Elem((a & c) ^ (b & d), (a & d) ^ (b & c) ^ (b & d))

    def __pow__(self, e: int) -> "F4Elem":
        if not self:
            if e < 0:
                raise ZeroDivisionError("zero in F4")
            return F4Elem.one() if e == 0 else self
        out = F4Elem.one()
        for _ in range(e % 3):
            out = out * self
        return out

    def __bool__(self) -> bool:
        return bool(self.a or self.b)

    def inverse(self) -> "F4Elem":
        if not self:
            raise ZeroDivisionError("zero in F4")
        return self * self

    def frobenius(self) -> "F4Elem":
        return F4Elem(self.a ^ self.b, self.b)

    def __repr__(self) -> str:
        names = {(0, 0): "0", (1, 0): "1", (0, 1): "w", (1, 1): "w^2"}
        return names[(self.a, self.b)]


F4_ZERO = F4Elem(0, 0)
F4_ONE = F4Elem(1, 0)
OMEGA = F4Elem(0, 1)


@dataclass(frozen=True)
class WittElem:
    """c0 + c1*omega in W(F4), on the basis {1, omega}."""

    c0: Residue2Adic
    c1: Residue2Adic

    @classmethod
    def of(cls, c0: IntLike, c1: IntLike = 0, precision: int | None = None) -> "WittElem":
        precision = working_precision() if precision is None else precision
        return cls(Residue2Adic.of(c0, precision), Residue2Adic.of(c1, precision))

    @property
    def precision(self) -> int:
        return min(self.c0.precision, self.c1.precision)

    def __add__(self, other: "WittElem") -> "WittElem":
        return WittElem(self.c0 + other.c0, self.c1 + other.c1)

    def __sub__(self, other: "WittElem") -> "WittElem":
        return WittElem(self.c0 - other.c0, self.c1 - other.c1)

    def __neg__(self) -> "WittElem":
        return WittElem(-self.c0, -self.c1)

    def __mul__(self, other: "WittElem") -> "WittElem":
        # omega^2 = -1 - omega
        x0, x1, y0, y1 = self.c0, self.c1, other.c0, other.c1
        cross = x1 * y1
        return WittElem(x0 * y0 - cross, x0 * y1 + x1 * y0 - cross)

    def reduce(self) -> F4Elem:
        return F4Elem(self.c0.value, self.c1.value)

    def __repr__(self) -> str:
        return f"({self.c0.signed()} + {self.c1.signed()}w) mod 2^{self.precision}"


def frobenius(w: WittElem | F4Elem) -> WittElem | F4Elem:
    """The Galois involution omega -> omega^2 = -1 - omega."""
    if isinstance(w, F4Elem):
        return w.frobenius()
    return WittElem(w.c0 - w.c1, -w.c1)


# ---------------------------------------------------------------------------
# F4[u1]/(u1^T) and the graded series ring F4[u1]/(u1^T)[u^{+-1}]


Series = tuple[F4Elem, ...]


def series(coeffs: Iterable[F4Elem | int], T: int) -> Series:
    out = [F4Elem(c, 0) if isinstance(c, int) else c for c in coeffs]
    out = (out + [F4_ZERO] * T)[:T]
    return tuple(out)


def series_mul(f: Series, g: Series) -> Series:
    T = len(f)
    out = [F4_ZERO] * T
    for i, a in enumerate(f):
        if not a:
            continue
        for j in range(T - i):
            if g[j]:
                out[i + j] = out[i + j] + a * g[j]
    return tuple(out)


def series_inverse(f: Series) -> Series:
    if not f[0]:
        raise ZeroDivisionError("series with zero constant term")
    T = len(f)
    inv0 = f[0].inverse()
    out = [F4_ZERO] * T
    out[0] = inv0
    for n in range(1, T):
        acc = F4_ZERO
        for k in range(1, n + 1):
            acc = acc + f[k] * out[n - k]
        out[n] = acc * inv0
    return tuple(out)


def series_pow(f: Series, e: int) -> Series:
    base = series_inverse(f) if e < 0 else f
    e = abs(e)
    out = series([1], len(f))
    while e:
        if e & 1:
            out = series_mul(out, base)
        base = series_mul(base, base)
        e >>= 1
    return out


def series_compose(f: Series, g: Series) -> Series:
    """f(g(u1)) for g with zero constant term."""
    if g[0]:
        raise ValueError("inner series must vanish at u1 = 0")
    T = len(f)
    out = [F4_ZERO] * T
    power = series([1], T)
    for c in f:
        if c:
            out = [x + c * y for x, y in zip(out, power)]
        power = series_mul(power, g)
    return tuple(out)


@dataclass(frozen=True)
class MSeries:
    """Homogeneous element  (sum_m c_m u1^m) * u^uexp  of F4[u1]/(u1^T)[u^{+-1}]."""

    coeffs: Series
    uexp: int

    @property
    def T(self) -> int:
        return len(self.coeffs)

    @property
    def degree(self) -> int:
        return -2 * self.uexp

    @classmethod
    def monomial(cls, u1exp: int, uexp: int, T: int, coeff: F4Elem = F4_ONE) -> "MSeries":
        c = [F4_ZERO] * T
        if 0 <= u1exp < T:
            c[u1exp] = coeff
        return cls(tuple(c), uexp)

    @classmethod
    def v1(cls, T: int) -> "MSeries":
        return cls.monomial(1, -1, T)

    @classmethod
    def v2(cls, T: int) -> "MSeries":
        return cls.monomial(0, -3, T)

    @classmethod
    def one(cls, T: int) -> "MSeries":
        return cls.monomial(0, 0, T)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other: "MSeries") -> "MSeries":
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.uexp != other.uexp or self.T != other.T:
            raise ValueError("sum of inhomogeneous series")
        return MSeries(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.uexp)

    def __mul__(self, other: "MSeries") -> "MSeries":
        return MSeries(series_mul(self.coeffs, other.coeffs), self.uexp + other.uexp)

    def __pow__(self, e: int) -> "MSeries":
        if e < 0 and self.coeffs[0]:
            return MSeries(series_pow(self.coeffs, e), self.uexp * e)
        if e < 0:
            raise ZeroDivisionError("series not invertible")
        out = MSeries.one(self.T)
        for _ in range(e):
            out = out * self
        return out

    def scale(self, c: F4Elem) -> "MSeries":
        return MSeries(tuple(c * a for a in self.coeffs), self.uexp)

    def frobenius(self) -> "MSeries":
        return MSeries(tuple(a.frobenius() for a in self.coeffs), self.uexp)

    def u1_valuation(self) -> int:
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return self.T

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MSeries):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return self.T == other.T
        return self.coeffs == other.coeffs and self.uexp == other.uexp

    def __hash__(self) -> int:
        return hash((self.coeffs, self.uexp) if not self.is_zero() else (self.T,))

    def __repr__(self) -> str:
        terms = [
            f"{c!r}*u1^{m}" if m else repr(c)
            for m, c in enumerate(self.coeffs)
            if c
        ]
        body = " + ".join(terms) if terms else "0"
        return f"({body}) u^{self.uexp}"


def f4_vector(bits: Sequence[int]) -> Series:
    return tuple(F4Elem(b, 0) for b in bits)
