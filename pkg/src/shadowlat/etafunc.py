"""Eta quotients with multiplier tracking, and the per-level generator series.

An :class:`EtaQuotient` is a formal product  c * sqrt(s) * e^{pi i phase/24}
* (z/i)^{zpow/2} * prod eta(a_j z + b_j)^{e_j}  with c rational, s a positive
squarefree integer, phase an integer mod 48 and zpow an integer counting
half-powers of (z/i).  The scales a_j have denominator at most 2 and the
shifts b_j lie in {0, 1/2}; everything expands on the 1/24 grid.

The conventions (q = e^{pi i z} throughout):

    eta(z)        = q^{1/12} prod_{m>=1} (1 - q^{2m})
    eta(w + 1)    = e^{pi i/12} eta(w)                         [phase += 2]
    eta(w + 1/2)  = e^{pi i/24} eta(2w)^3 / (eta(w) eta(4w))   [half-shift elimination]
    eta(-1/w)     = sqrt(w/i) eta(w)                           [Fricke building block]

Expansion is only permitted once the multiplier has collapsed to a real
rational scalar: zpow = 0, sqrt part trivial, total phase in {0, 24}.

This module also builds, for each admissible level N, the four generator
series g1, g2, s1, s2 of the extremal machinery and verifies the identity
suite relating them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from . import qseries as qs
from .qseries import QSeries, Rational

#: Levels with genus-zero theta groups; the only N accepted by build_basis.
ADMISSIBLE_N = (1, 2, 3, 5, 6, 7, 11, 14, 15, 23)

#: Critical dimensions, indexed like ADMISSIBLE_N.
CRITICAL_DIMENSION = {1: 24, 2: 16, 3: 12, 5: 8, 6: 8, 7: 6, 11: 4, 14: 4, 15: 4, 23: 2}


class EtaError(ValueError):
    pass


class UnresolvedMultiplier(EtaError):
    """Expansion attempted while the multiplier is not a real rational."""


class UnsupportedN(EtaError):
    pass


class UnsupportedCombination(EtaError):
    pass


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def sigma(n: int) -> int:
    return sum(divisors(n))


def _squarefree_split(n: int) -> tuple[int, int]:
    """n = r^2 * s with s squarefree; returns (r, s). n must be positive."""
    r, s = 1, 1
    d = 2
    m = n
    while d * d <= m:
        k = 0
        while m % d == 0:
            m //= d
            k += 1
        r *= d ** (k // 2)
        if k % 2:
            s *= d
        d += 1
    return r, s * m


@dataclass(frozen=True, order=True)
class EtaTerm:
    """eta(a z + b)^e with a = a2/2, b = b2/2 (b2 in {0,1})."""

    a2: int  # twice the scale
    b2: int  # twice the shift, 0 or 1
    e: int

    @property
    def a(self) -> Fraction:
        return Fraction(self.a2, 2)

    @property
    def b(self) -> Fraction:
        return Fraction(self.b2, 2)

    def lead_exponent(self) -> Fraction:
        return Fraction(self.a2, 24) * self.e  # e * a/12


def _norm_term(a: Rational, b: Rational, e: int) -> tuple[EtaTerm, int]:
    """Normalize eta(a z + b)^e pulling b into [0,1); returns (term, phase units)."""
    af = Fraction(a)
    bf = Fraction(b)
    if af <= 0 or af.denominator > 2:
        raise EtaError(f"eta scale {a} must be positive with denominator dividing 2")
    if bf.denominator > 2:
        raise EtaError(f"eta shift {b} must be a multiple of 1/2")
    carry = bf.numerator // bf.denominator if bf.denominator == 1 else (bf.numerator - (bf.numerator % 2)) // 2
    b0 = bf - carry
    assert b0 in (Fraction(0), Fraction(1, 2))
    # eta(w + 1) = e^{pi i/12} eta(w): 2 phase units per unit carry per power
    return EtaTerm(int(af * 2), int(b0 * 2), e), (2 * carry * e) % 48


class EtaQuotient:
    """Formal eta quotient with tracked scalar, phase and (z/i)-power."""

    __slots__ = ("terms", "scalar", "sqrt_part", "phase", "zpow")

    def __init__(
        self,
        terms: Iterable[EtaTerm] = (),
        scalar: Rational = 1,
        phase: int = 0,
        zpow: int = 0,
        sqrt_part: int = 1,
    ):
        merged: dict[tuple[int, int], int] = {}
        for t in terms:
            key = (t.a2, t.b2)
            merged[key] = merged.get(key, 0) + t.e
        self.terms = tuple(
            sorted(EtaTerm(a2, b2, e) for (a2, b2), e in merged.items() if e)
        )
        self.scalar = Fraction(scalar)
        self.phase = phase % 48
        self.zpow = zpow
        if sqrt_part <= 0:
            raise EtaError("sqrt part must be positive")
        r, s = _squarefree_split(sqrt_part)
        self.scalar *= r
        self.sqrt_part = s

    # -- construction helpers ------------------------------------------------

    @classmethod
    def eta(cls, a: Rational, b: Rational = 0, e: int = 1) -> "EtaQuotient":
        term, ph = _norm_term(a, b, e)
        return cls([term], phase=ph)

    def __mul__(self, other) -> "EtaQuotient":
        if isinstance(other, (int, Fraction)):
            return EtaQuotient(self.terms, self.scalar * other, self.phase, self.zpow, self.sqrt_part)
        if not isinstance(other, EtaQuotient):
            return NotImplemented
        return EtaQuotient(
            self.terms + other.terms,
            self.scalar * other.scalar,
            self.phase + other.phase,
            self.zpow + other.zpow,
            self.sqrt_part * other.sqrt_part,
        )

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "EtaQuotient":
        if k == 0:
            return EtaQuotient()
        if self.scalar == 0:
            raise EtaError("cannot raise zero scalar to a power")
        terms = tuple(EtaTerm(t.a2, t.b2, t.e * k) for t in self.terms)
        # (c sqrt(s))^k = c^k s^(k//2) sqrt(s)^(k%2), floor conventions for k<0
        return EtaQuotient(
            terms,
            self.scalar**k * Fraction(self.sqrt_part) ** (k // 2),
            self.phase * k,
            self.zpow * k,
            self.sqrt_part ** (k % 2),
        )

    def __repr__(self) -> str:
        return f"EtaQuotient({self.to_text()})"

    def to_text(self) -> str:
        num, den = [], []
        for t in self.terms:
            arg = "z" if t.a == 1 else (f"{t.a}z" if t.a.denominator == 1 else f"{t.a} z")
            if t.b2:
                arg += " + 1/2"
            piece = f"eta({arg})" + (f"^{abs(t.e)}" if abs(t.e) != 1 else "")
            (num if t.e > 0 else den).append(piece)
        s = " ".join(num) if num else "1"
        for piece in den:
            s += f" / {piece}"
        if self.scalar != 1:
            s += f" * {self.scalar}"
        if self.sqrt_part != 1:
            s += f" * sqrt({self.sqrt_part})"
        if self.phase:
            s += f" * e^(pi i {self.phase}/24)"
        if self.zpow:
            s += f" * (z/i)^({Fraction(self.zpow, 2)})"
        return s

    # -- substitutions --------------------------------------------------------

    def shift_z_plus_1(self) -> "EtaQuotient":
        """z -> z + 1 termwise: eta(az+b) -> eta(az + (a+b))."""
        terms = []
        phase = self.phase
        for t in self.terms:
            nt, ph = _norm_term(t.a, t.a + t.b, t.e)
            terms.append(nt)
            phase += ph
        return EtaQuotient(terms, self.scalar, phase, self.zpow, self.sqrt_part)

    def eliminate_half_shifts(self) -> "EtaQuotient":
        """Rewrite every eta(az + 1/2) via eta(w+1/2) = e^{pi i/24} eta(2w)^3/(eta(w) eta(4w))."""
        out = EtaQuotient((), self.scalar, self.phase, self.zpow, self.sqrt_part)
        for t in self.terms:
            if t.b2 == 0:
                out = out * EtaQuotient([t])
            else:
                repl = EtaQuotient(
                    [EtaTerm(2 * t.a2, 0, 3 * t.e), EtaTerm(t.a2, 0, -t.e), EtaTerm(4 * t.a2, 0, -t.e)],
                    phase=t.e,
                )
                out = out * repl
        return out

    def fricke_transform(self, N: int) -> "EtaQuotient":
        """Substitute z -> -1/(N z) via eta(az)|... = sqrt((N/a) z/i) eta((N/a) z).

        Requires every shift b = 0; accumulates (z/i)-powers and sqrt scalars.
        """
        if N <= 0:
            raise EtaError("Fricke level must be positive")
        terms = []
        zpow = self.zpow
        mult_sq = Fraction(1)  # square of the accumulated sqrt((N/a)^e) factors
        for t in self.terms:
            if t.b2:
                raise EtaError("Fricke transform requires all eta shifts to be zero")
            new_a = Fraction(2 * N, t.a2)  # N / a
            if new_a.denominator > 2:
                raise qs.GridOverflow(f"transformed scale {new_a} leaves the admissible grid")
            terms.append(EtaTerm(int(new_a * 2), 0, t.e))
            zpow += t.e
            mult_sq *= new_a**t.e
        r2, s2 = _squarefree_split(mult_sq.numerator * mult_sq.denominator)
        # sqrt(p/q) = sqrt(pq)/q = r2 sqrt(s2) / q
        scalar = self.scalar * Fraction(r2, mult_sq.denominator)
        return EtaQuotient(terms, scalar, self.phase, zpow, self.sqrt_part * s2)

    def drop_z_power(self, N: int) -> "EtaQuotient":
        """Remove the (z/i)^{zpow/2} factor and divide by N^{zpow/4}.

        This is the renormalization that turns the Fricke image of a weight
        zpow/4 theta-type quotient back into a q-series (the analytic
        prefactor of the shadow transformation); validated against the
        closed forms for odd N and N = 2.
        """
        if self.zpow == 0:
            return self
        from math import isqrt

        zp = self.zpow
        M = N**zp  # divide by M^{1/4}
        m2 = isqrt(M)
        if m2 * m2 != M:
            raise EtaError(f"N^zpow = {N}^{zp} is not a perfect square; cannot renormalize")
        p, v = _squarefree_split(m2)  # M^{1/4} = p sqrt(v)
        # 1/(p sqrt(v)) = sqrt(v)/(p v)
        scalar = self.scalar * Fraction(1, p * v)
        return EtaQuotient(self.terms, scalar, self.phase, 0, self.sqrt_part * v)

    # -- expansion -------------------------------------------------------------

    def total_phase(self) -> int:
        """Stored phase plus the e^{pi i b/12} phases carried by b = 1/2 factors."""
        ph = self.phase
        for t in self.terms:
            if t.b2:
                ph += t.e
        return ph % 48

    def lead_exponent(self) -> Fraction:
        return sum((t.lead_exponent() for t in self.terms), Fraction(0))

    def expand(self, order: Rational) -> QSeries:
        """Exact q-expansion through the given order (q-units)."""
        if self.zpow != 0:
            raise UnresolvedMultiplier(f"pending (z/i)^({Fraction(self.zpow,2)}) factor")
        if self.sqrt_part != 1:
            raise UnresolvedMultiplier(f"pending sqrt({self.sqrt_part}) factor")
        ph = self.total_phase()
        if ph not in (0, 24):
            raise UnresolvedMultiplier(f"total phase e^(pi i {ph}/24) is not real")
        sign = -1 if ph == 24 else 1
        onum = qs.exponent_num(order)
        total_lead = self.lead_exponent()
        acc = QSeries.monomial(self.scalar * sign, 0, order=None)
        for t in self.terms:
            # expand this factor far enough that the full product is sound at `order`
            fac_order = Fraction(onum, qs.GRID) - (total_lead - t.lead_exponent())
            acc = acc * _eta_power(t, fac_order)
        return acc.truncated(Fraction(onum, qs.GRID))


def _eta_power(term: EtaTerm, order: Fraction) -> QSeries:
    """(eta(az+b))^e as a series, with the e^{pi i b/12} phase left to the caller."""
    a = term.a
    lead = a / 12
    e = term.e
    # pow_int is sound through B + (e-1)*lead for e>0 and through
    # B - (|e|+1)*lead for e<0 (inverse loses 2*lead, each power -lead)
    if e > 0:
        base_order = order - (e - 1) * lead
    else:
        base_order = order + (-e + 1) * lead
    base_order = max(base_order, lead + Fraction(1, qs.GRID))
    alt = term.b2 == 1
    body = qs.product_over_m(
        lambda m: 2 * a * m,
        (lambda m: 1 if m % 2 else -1) if alt else (lambda m: -1),
        base_order - lead,
    )
    base = QSeries.monomial(1, lead) * body.truncated(base_order - lead)
    return qs.pow_int(base, e).truncated(order)


# -- standard building blocks -------------------------------------------------


def eta_level_product(N: int, scale: Rational = 1, e: int = 1) -> EtaQuotient:
    """prod_{d|N} eta(d * scale * z)^e."""
    out = EtaQuotient()
    for d in divisors(N):
        out = out * EtaQuotient.eta(d * Fraction(scale), 0, e)
    return out


def eta_level_shifted(N: int, e: int = 1) -> EtaQuotient:
    """prod_{d|N} eta(d (z+1)/2)^e."""
    out = EtaQuotient()
    for d in divisors(N):
        out = out * EtaQuotient.eta(Fraction(d, 2), Fraction(d, 2), e)
    return out


def theta3_quotient(scale: Rational = 1) -> EtaQuotient:
    """theta_3(a z) = eta(az)^5 / (eta(az/2) eta(2az))^2."""
    a = Fraction(scale)
    return (
        EtaQuotient.eta(a, 0, 5)
        * EtaQuotient.eta(a / 2, 0, -2)
        * EtaQuotient.eta(2 * a, 0, -2)
    )


def theta2_quotient(scale: Rational = 1) -> EtaQuotient:
    """theta_2(a z) = 2 eta(2az)^2 / eta(az)."""
    a = Fraction(scale)
    return 2 * (EtaQuotient.eta(2 * a, 0, 2) * EtaQuotient.eta(a, 0, -1))


def theta4_quotient(scale: Rational = 1) -> EtaQuotient:
    """theta_4(a z) = eta(az/2)^2 / eta(az)."""
    a = Fraction(scale)
    return EtaQuotient.eta(a / 2, 0, 2) * EtaQuotient.eta(a, 0, -1)


def theta3_direct(order: Rational, scale: int = 1) -> QSeries:
    """theta_3(scale * z) by direct summation over n in Z (independent oracle)."""
    onum = qs.exponent_num(order)
    terms = {0: 1}
    n = 1
    while True:
        e = qs.exponent_num(scale * n * n)
        if e >= onum:
            break
        terms[e] = 2
        n += 1
    return QSeries(terms, onum)


def fricke_shift(quotient: EtaQuotient, N: int) -> EtaQuotient:
    """The substitution z -> 1 - 1/(N z): shift z+1 first, then Fricke at N.

    Half-integral shifts produced by the z+1 step are eliminated before the
    Fricke step, which only acts on shift-free terms.
    """
    return quotient.shift_z_plus_1().eliminate_half_shifts().fricke_transform(N)


# -- generator bases -----------------------------------------------------------


@dataclass(frozen=True)
class GeneratorBasis:
    """The four generator series for level N, expanded through ``order``."""

    N: int
    dim_c: int  # dim C^(N) = number of divisors of N
    D: int  # critical dimension
    s: int  # D / dim_c
    ord1_g1: Fraction  # order of g1 at cusp class 1, per copy
    oddity_c: int  # oddity of C^(N) mod 8
    order: Fraction
    g1: QSeries
    g2: QSeries
    s1: QSeries
    s2: QSeries


def oddity_c_lattice(N: int) -> int:
    """Oddity of C^(N) = sum over d|N of the oddity of the rank one form <d>.

    For odd u the form <u> contributes u; for <2u> it contributes u plus 4
    when u = +-3 mod 8 (the antisquare correction).  Cross-checked against
    the Gauss-sum computation in the lattice module.
    """
    total = 0
    for d in divisors(N):
        if d % 2:
            total += d
        else:
            u = d // 2
            total += u + (4 if u % 8 in (3, 5) else 0)
    return total % 8


def g1_quotient(N: int) -> EtaQuotient:
    out = EtaQuotient()
    for d in divisors(N):
        out = out * theta3_quotient(d)
    return out


def g2_quotient(N: int) -> EtaQuotient:
    dim_c = len(divisors(N))
    s = CRITICAL_DIMENSION[N] // dim_c
    if N % 2:
        base = (
            eta_level_product(N, Fraction(1, 2))
            * eta_level_product(N, 2)
            * eta_level_product(N, 1, -2)
        )
    else:
        M = N // 2
        base = (
            eta_level_product(M, Fraction(1, 2))
            * eta_level_product(M, 4)
            * eta_level_product(M, 1, -1)
            * eta_level_product(M, 2, -1)
        )
    return base**s


def s1_quotient(N: int) -> EtaQuotient:
    """Closed form for N odd (prod theta_2(dz)) and for N = 2; transformation otherwise."""
    if N % 2:
        out = EtaQuotient()
        for d in divisors(N):
            out = out * theta2_quotient(d)
        return out
    if N == 2:
        return 2 * (
            EtaQuotient.eta(1, 0, 5)
            * EtaQuotient.eta(4, 0, 2)
            * EtaQuotient.eta(Fraction(1, 2), 0, -2)
            * EtaQuotient.eta(2, 0, -3)
        )
    return fricke_shift(g1_quotient(N), N).drop_z_power(N)


def s2_quotient(N: int) -> EtaQuotient:
    if N % 2:
        dim_c = len(divisors(N))
        s = CRITICAL_DIMENSION[N] // dim_c
        base = eta_level_product(N, 1) * eta_level_product(N, 2, -1)
        return -Fraction(1, 2 ** (CRITICAL_DIMENSION[N] // 2)) * base**s
    if N == 2:
        return -Fraction(1, 16) * (
            EtaQuotient.eta(Fraction(1, 2), 0, 8)
            * EtaQuotient.eta(2, 0, 16)
            * EtaQuotient.eta(1, 0, -16)
            * EtaQuotient.eta(4, 0, -8)
        )
    return fricke_shift(g2_quotient(N), N)


@lru_cache(maxsize=None)
def _build_basis_cached(N: int, order_num: int) -> GeneratorBasis:
    order = Fraction(order_num, qs.GRID)
    dim_c = len(divisors(N))
    D = CRITICAL_DIMENSION[N]
    s = D // dim_c
    ord1 = Fraction(sigma(N), 8) if N % 2 else Fraction(sigma(N), 6)
    g1 = g1_quotient(N).expand(order)
    g2 = g2_quotient(N).expand(order)
    s1 = s1_quotient(N).expand(order)
    s2 = s2_quotient(N).expand(order)
    lead = g2.leading()
    if lead is None or lead != (Fraction(1), Fraction(1)):
        raise EtaError(f"g2 for N={N} does not start with q^1")
    if g1.coefficient(0) != 1:
        raise EtaError(f"g1 for N={N} does not have constant term 1")
    return GeneratorBasis(
        N=N, dim_c=dim_c, D=D, s=s, ord1_g1=ord1, oddity_c=oddity_c_lattice(N),
        order=order, g1=g1, g2=g2, s1=s1, s2=s2,
    )


def build_basis(N: int, order: Rational | None = None) -> GeneratorBasis:
    """Generator series for level N, to ``order`` (default qseries.DEFAULT_ORDER)."""
    if N not in ADMISSIBLE_N:
        raise UnsupportedN(f"N={N} not in {ADMISSIBLE_N}")
    if order is None:
        order = qs.DEFAULT_ORDER
    return _build_basis_cached(N, qs.exponent_num(order))


# -- identity verification ------------------------------------------------------


@dataclass(frozen=True)
class IdentityReport:
    name: str
    N: int
    ok: bool
    first_diff: tuple[Fraction, Fraction, Fraction] | None

    def __bool__(self) -> bool:
        return self.ok


ODD_IDENTITIES = ("ED1", "ED2", "ED3", "ED4", "ED5", "ED6", "ED7", "ED8")
EVEN2_IDENTITIES = ("ED9", "ED10", "ED11", "ED12", "ED13", "ED14")
IDENTITY_NAMES = ODD_IDENTITIES + EVEN2_IDENTITIES + ("Z4ETA",)


def _pow_half(f: QSeries, s: int) -> QSeries:
    """f^{s/2} for a series whose leading coefficient is a rational square."""
    if s % 2 == 0:
        return qs.pow_int(f, s // 2)
    return qs.pow_int(f, s // 2) * qs.sqrt(f) if s > 1 else qs.sqrt(f)


def _identity_sides(name: str, N: int, order: Fraction) -> tuple[QSeries, QSeries]:
    margin = Fraction(6)
    work = order + margin
    if name == "Z4ETA":
        t3 = theta3_quotient(1).expand(work)
        t3_4 = theta3_quotient(4).expand(work)
        lhs = t3_4 * qs.theta_op(t3) - qs.theta_op(t3_4) * t3
        # the paper's derivative normalization differs from theta_op by a
        # global factor; matching leading terms fixes it at 2
        rhs = 2 * EtaQuotient.eta(2, 0, 6).expand(work)
        return lhs, rhs

    if name in ODD_IDENTITIES:
        if N % 2 == 0 or N not in ADMISSIBLE_N:
            raise UnsupportedCombination(f"{name} applies to odd N from {ADMISSIBLE_N}")
        basis = build_basis(N, work)
        s = basis.s
        D = basis.D
        eta_n = eta_level_product(N).expand(work)
        if name == "ED1":
            return basis.g2**2 * qs.pow_int(basis.g1, s), qs.pow_int(eta_n, s)
        if name == "ED2":
            return basis.g2 * qs.pow_int(basis.g1, s), -(eta_level_shifted(N, s).expand(work))
        if name == "ED3":
            return basis.s2**2 * qs.pow_int(basis.s1, s), qs.pow_int(eta_n, s)
        if name == "ED4":
            rhs = -(2 ** (D // 2)) * qs.pow_int(eta_level_product(N, 2).expand(work), s)
            return basis.s2 * qs.pow_int(basis.s1, s), rhs
        if name == "ED5":
            lhs = basis.g2 * qs.shift_z_plus_1(basis.g2) * basis.s2
            return lhs, QSeries.monomial(Fraction(1, 2 ** (D // 2)), 0)
        if name == "ED6":
            # cleared-denominator form of 1/g2 + 1/g2(z+1) + 1/s2 = 2s
            g2z1 = qs.shift_z_plus_1(basis.g2)
            lhs = g2z1 * basis.s2 + basis.g2 * basis.s2 + basis.g2 * g2z1
            return lhs, (2 * s) * (basis.g2 * g2z1 * basis.s2)
        if name == "ED7":
            lhs = basis.g1 * qs.shift_z_plus_1(basis.g1) * basis.s1
            return lhs, (2**basis.dim_c) * qs.pow_int(eta_n, 3)
        if name == "ED8":
            lhs = (
                _pow_half(basis.g1, s)
                - _pow_half(qs.shift_z_plus_1(basis.g1), s)
                - _pow_half(basis.s1, s)
            )
            return lhs, (2 * s) * _pow_half(eta_n, s)

    if name in EVEN2_IDENTITIES:
        if N != 2:
            raise UnsupportedCombination(f"{name} applies to N=2 only")
        basis = build_basis(2, work)
        g2z1 = qs.shift_z_plus_1(basis.g2)
        s2z1 = qs.shift_z_plus_1(basis.s2)
        if name == "ED9":
            lhs = qs.pow_int(basis.g1, 8) * basis.g2**2
            rhs = EtaQuotient.eta(1, 0, 8).expand(work) * EtaQuotient.eta(2, 0, 8).expand(work)
            return lhs, rhs
        if name == "ED10":
            lhs = qs.pow_int(basis.s1, 4) * basis.s2**2
            rhs = Fraction(1, 16) * qs.pow_int(theta4_quotient(1).expand(work), 4) * qs.pow_int(
                theta3_quotient(2).expand(work), 4
            )
            return lhs, rhs
        if name == "ED11":
            lhs = qs.pow_int(basis.s1, 8) * basis.s2**2
            rhs = EtaQuotient.eta(1, 0, 8).expand(work) * EtaQuotient.eta(2, 0, 8).expand(work)
            return lhs, rhs
        if name == "ED12":
            # both products of the double identity must equal 1/16
            lhs = basis.g2 * s2z1
            rhs = g2z1 * basis.s2
            const = QSeries.monomial(Fraction(1, 16), 0)
            d1 = qs.first_difference(lhs, const, None)
            if d1 is not None:
                return lhs, const
            return rhs, const
        if name == "ED13":
            lhs = basis.g2 * g2z1 * basis.s2 * s2z1
            return lhs, QSeries.monomial(Fraction(1, 256), 0)
        if name == "ED14":
            # cleared form of 1/g2 + 1/g2(z+1) + 1/s2 + 1/s2(z+1) = 16
            prod = basis.g2 * g2z1 * basis.s2 * s2z1
            lhs = (
                g2z1 * basis.s2 * s2z1
                + basis.g2 * basis.s2 * s2z1
                + basis.g2 * g2z1 * s2z1
                + basis.g2 * g2z1 * basis.s2
            )
            return lhs, 16 * prod

    raise UnsupportedCombination(f"unknown identity {name}")


def verify_identity(name: str, N: int, order: Rational | None = None) -> IdentityReport:
    """Check one of the generator identities exactly through ``order``."""
    if order is None:
        order = qs.DEFAULT_ORDER
    order = Fraction(order)
    lhs, rhs = _identity_sides(name, N, order)
    diff = qs.first_difference(lhs, rhs, order)
    return IdentityReport(name=name, N=N, ok=diff is None, first_diff=diff)


def applicable_identities(N: int) -> tuple[str, ...]:
    if N == 2:
        return EVEN2_IDENTITIES + ("Z4ETA",)
    if N % 2 and N in ADMISSIBLE_N:
        return ODD_IDENTITIES + (("Z4ETA",) if N == 1 else ())
    return ()
