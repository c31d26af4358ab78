"""Exact arithmetic with roots of unity in Q[x]/(x^M - 1).

Elements are sparse coefficient dicts on exponents mod M; equality of the
algebraic numbers they represent is decided by reducing the difference
modulo the M-th cyclotomic polynomial.  Square roots of integers are
expressed through quadratic Gauss sums, so Gauss-sum identities can be
checked exactly.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache


class CycloElement:
    __slots__ = ("M", "coeffs")

    def __init__(self, M: int, coeffs: dict[int, Fraction] | None = None):
        self.M = M
        self.coeffs = {}
        if coeffs:
            for e, c in coeffs.items():
                if c:
                    k = e % M
                    v = self.coeffs.get(k, 0) + c
                    if v:
                        self.coeffs[k] = v
                    else:
                        self.coeffs.pop(k, None)

    @classmethod
    def root(cls, M: int, k: int) -> "CycloElement":
        """e^{2 pi i k / M}."""
        return cls(M, {k % M: Fraction(1)})

    @classmethod
    def integer(cls, M: int, v) -> "CycloElement":
        return cls(M, {0: Fraction(v)})

    def __add__(self, other: "CycloElement") -> "CycloElement":
        assert self.M == other.M
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return CycloElement(self.M, out)

    def __neg__(self) -> "CycloElement":
        return CycloElement(self.M, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: "CycloElement") -> "CycloElement":
        return self + (-other)

    def __mul__(self, other) -> "CycloElement":
        if isinstance(other, (int, Fraction)):
            return CycloElement(self.M, {e: c * other for e, c in self.coeffs.items()})
        assert self.M == other.M
        out: dict[int, Fraction] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                k = (e1 + e2) % self.M
                v = out.get(k, 0) + c1 * c2
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return CycloElement(self.M, out)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        """Zero as an algebraic number (reduction mod the cyclotomic polynomial)."""
        if not self.coeffs:
            return True
        poly = [Fraction(0)] * self.M
        for e, c in self.coeffs.items():
            poly[e] = c
        rem = _poly_mod(poly, cyclotomic_poly(self.M))
        return all(c == 0 for c in rem)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CycloElement):
            return NotImplemented
        return (self - other).is_zero()

    def __repr__(self) -> str:
        parts = [f"{c}*z^{e}" for e, c in sorted(self.coeffs.items())]
        return f"Cyclo[{self.M}](" + (" + ".join(parts) or "0") + ")"

    def to_complex(self) -> complex:
        from cmath import exp, pi

        return sum(complex(c) * exp(2j * pi * e / self.M) for e, c in self.coeffs.items())


@lru_cache(maxsize=None)
def cyclotomic_poly(M: int) -> tuple[Fraction, ...]:
    """Coefficients (ascending) of the M-th cyclotomic polynomial."""
    if M == 1:
        return (Fraction(-1), Fraction(1))
    # (x^M - 1) / prod_{d | M, d < M} Phi_d
    num = [Fraction(0)] * (M + 1)
    num[0], num[M] = Fraction(-1), Fraction(1)
    for d in range(1, M):
        if M % d == 0:
            num = _poly_div_exact(num, cyclotomic_poly(d))
    return tuple(num)


def _poly_div_exact(num: list[Fraction], den) -> list[Fraction]:
    num = list(num)
    den = list(den)
    out = [Fraction(0)] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1] / den[-1]
        out[k] = c
        if c:
            for i, dc in enumerate(den):
                num[k + i] -= c * dc
    assert all(c == 0 for c in num), "inexact polynomial division"
    return out


def _poly_mod(num: list[Fraction], den) -> list[Fraction]:
    num = list(num)
    den = list(den)
    dn = len(den) - 1
    for k in range(len(num) - 1, dn - 1, -1):
        c = num[k] / den[-1]
        if c:
            for i in range(len(den)):
                num[k - dn + i] -= c * den[i]
    return num[:dn]


def sqrt_integer(n: int, M: int) -> CycloElement:
    """sqrt(n) for positive n as an element of Q(zeta_M).

    Needs 8 | M when n is even or not a perfect square, and p | M for every
    odd prime p dividing the squarefree part; built from quadratic Gauss sums.
    """
    if n <= 0:
        raise ValueError("need a positive integer")
    out = CycloElement.integer(M, 1)
    square, rest = 1, n
    d = 2
    while d * d <= rest:
        while rest % (d * d) == 0:
            rest //= d * d
            square *= d
        d += 1
    out = out * square
    m = rest
    d = 2
    while d <= m:
        if m % d == 0:
            out = out * _sqrt_prime(d, M)
            m //= d
        d += 1
    return out


def _sqrt_prime(p: int, M: int) -> CycloElement:
    if p == 2:
        if M % 8:
            raise ValueError("sqrt(2) needs 8 | M")
        return CycloElement.root(M, M // 8) + CycloElement.root(M, -M // 8)
    if M % p:
        raise ValueError(f"sqrt({p}) needs {p} | M")
    g = CycloElement(M, {})
    for a in range(1, p):
        leg = pow(a, (p - 1) // 2, p)
        sign = 1 if leg == 1 else -1
        g = g + sign * CycloElement.root(M, a * (M // p))
    if p % 4 == 1:
        return g
    # g = i sqrt(p): multiply by -i
    if M % 4:
        raise ValueError("need 4 | M to undo the i factor")
    return g * CycloElement.root(M, 3 * M // 4)
