"""Exact formal series in the nome q = e^{pi i z}.

Series live on the exponent grid (1/24)*Z: every exponent is stored as an
integer numerator over the fixed denominator 24, which is fine enough for
eta functions of half-integral arguments (q^{1/24}), the theta constants
(q^{1/4}) and shadow series (q^{o/4}).  Coefficients are exact rationals
(plain ints where possible, ``fractions.Fraction`` otherwise); there is no
floating point anywhere in this module.

Truncation discipline: a series carries an ``order`` (again a grid
numerator, or None for an exact finite sum).  Coefficients are correct for
all exponents strictly below the order, and every operation propagates the
tightest sound bound derivable from its inputs.  Operations never silently
extend precision; inverting an exact series requires an explicit order (or
falls back to DEFAULT_ORDER).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Union

GRID = 24

#: Default working order (in q-exponent units) for identity checks and for
#: inverses of exact series.  Overridable per call everywhere it matters.
DEFAULT_ORDER = Fraction(48)

Rational = Union[int, Fraction]


class QSeriesError(ValueError):
    pass


class NonIntegralExponent(QSeriesError):
    """A substitution required integer exponents but found a fractional one."""


class GridOverflow(QSeriesError):
    """An exponent left the 1/24 grid."""


class ZeroDivision(QSeriesError):
    """Inverse or logarithmic derivative of a series that is zero through its order."""


class PrecisionExceeded(QSeriesError):
    """A coefficient beyond the sound truncation order was requested."""


def _norm_coeff(c: Rational) -> Rational:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def exponent_num(e: Rational) -> int:
    """Grid numerator of an exponent given in q-units."""
    f = Fraction(e)
    num = f.numerator * GRID
    if num % f.denominator:
        raise GridOverflow(f"exponent {e} is not a multiple of 1/{GRID}")
    return num // f.denominator


def _min_order(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class QSeries:
    """Sparse Laurent-Puiseux series over Q with exponents in (1/24)*Z."""

    __slots__ = ("terms", "order")

    def __init__(self, terms: Mapping[int, Rational], order: int | None, *, _clean: bool = False):
        # internal representation: grid-numerator -> nonzero rational
        if _clean:
            self.terms = dict(terms)
        else:
            self.terms = {e: _norm_coeff(c) for e, c in terms.items() if c}
        if order is not None:
            self.terms = {e: c for e, c in self.terms.items() if e < order}
        self.order = order

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_terms(cls, terms: Mapping[Rational, Rational], order: Rational | None = None) -> "QSeries":
        onum = None if order is None else exponent_num(order)
        return cls({exponent_num(e): Fraction(c) for e, c in terms.items()}, onum)

    @classmethod
    def one(cls) -> "QSeries":
        return cls({0: 1}, None, _clean=True)

    @classmethod
    def zero(cls, order: Rational | None = None) -> "QSeries":
        return cls({}, None if order is None else exponent_num(order), _clean=True)

    @classmethod
    def monomial(cls, coeff: Rational, exponent: Rational, order: Rational | None = None) -> "QSeries":
        return cls.from_terms({exponent: coeff}, order)

    # -- basic accessors ----------------------------------------------------

    @property
    def order_q(self) -> Fraction | None:
        return None if self.order is None else Fraction(self.order, GRID)

    def support(self) -> list[Fraction]:
        return [Fraction(e, GRID) for e in sorted(self.terms)]

    def items(self) -> list[tuple[Fraction, Rational]]:
        return [(Fraction(e, GRID), self.terms[e]) for e in sorted(self.terms)]

    def coefficient(self, exponent: Rational) -> Fraction:
        e = exponent_num(exponent)
        if self.order is not None and e >= self.order:
            raise PrecisionExceeded(f"coefficient of q^{exponent} beyond order {self.order_q}")
        return Fraction(self.terms.get(e, 0))

    def leading(self) -> tuple[Fraction, Fraction] | None:
        """(exponent, coefficient) of the lowest-order term, or None if zero."""
        if not self.terms:
            return None
        e = min(self.terms)
        return Fraction(e, GRID), Fraction(self.terms[e])

    def _vlead(self) -> int | None:
        """Sound lower bound (grid units) on the valuation; None means +infinity."""
        if self.terms:
            return min(self.terms)
        return self.order  # zero through order: could have a term right at it

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        parts = []
        for e in sorted(self.terms)[:6]:
            parts.append(f"{self.terms[e]}*q^({Fraction(e, GRID)})")
        body = " + ".join(parts) if parts else "0"
        if len(self.terms) > 6:
            body += " + ..."
        tail = "" if self.order is None else f" + O(q^{self.order_q})"
        return f"QSeries({body}{tail})"

    def __eq__(self, other: object) -> bool:
        if isinstance(other, QSeries):
            return self.terms == other.terms and self.order == other.order
        if isinstance(other, (int, Fraction)):
            return self.order is None and self.terms == ({0: _norm_coeff(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        return hash((frozenset(self.terms.items()), self.order))

    # -- ring operations ----------------------------------------------------

    def truncated(self, order: Rational | None) -> "QSeries":
        onum = None if order is None else exponent_num(order)
        return QSeries(self.terms, _min_order(self.order, onum), _clean=True)

    def __neg__(self) -> "QSeries":
        return QSeries({e: -c for e, c in self.terms.items()}, self.order, _clean=True)

    def __add__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            other = QSeries({0: _norm_coeff(other)} if other else {}, None, _clean=True)
        if not isinstance(other, QSeries):
            return NotImplemented
        order = _min_order(self.order, other.order)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, 0) + c
            if s:
                terms[e] = _norm_coeff(s)
            else:
                terms.pop(e, None)
        return QSeries(terms, order)

    __radd__ = __add__

    def __sub__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            return self + (-other)
        if not isinstance(other, QSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "QSeries":
        return (-self) + other

    def __mul__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            c = _norm_coeff(other)
            if not c:
                return QSeries({}, self.order, _clean=True)
            return QSeries({e: _norm_coeff(v * c) for e, v in self.terms.items()}, self.order, _clean=True)
        if not isinstance(other, QSeries):
            return NotImplemented
        return _mul_series(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "QSeries":
        return pow_int(self, e)

    # serialization ---------------------------------------------------------

    def to_data(self) -> dict:
        return {
            "grid": GRID,
            "terms": [[e, str(Fraction(self.terms[e]))] for e in sorted(self.terms)],
            "order_num": self.order,
        }

    @classmethod
    def from_data(cls, data: Mapping) -> "QSeries":
        if data.get("grid", GRID) != GRID:
            raise GridOverflow(f"unsupported grid {data.get('grid')}")
        terms = {int(e): Fraction(c) for e, c in data["terms"]}
        return cls(terms, data.get("order_num"))


def _mul_series(f: QSeries, g: QSeries) -> QSeries:
    # sound order: min(Of + val(g), Og + val(f)); None = +infinity
    bounds = []
    for a, b in ((f, g), (g, f)):
        if a.order is not None:
            v = b._vlead()
            bounds.append(None if v is None else a.order + v)
    order = None
    for bnd in bounds:
        order = _min_order(order, bnd)
    if not f.terms or not g.terms:
        return QSeries({}, order, _clean=True)

    fe = sorted(f.terms)
    ge = sorted(g.terms)
    if len(fe) > len(ge):
        f, g, fe, ge = g, f, ge, fe
    out: dict[int, Rational] = {}
    # integer fast path when both series have integral coefficients
    if all(isinstance(c, int) for c in f.terms.values()) and all(
        isinstance(c, int) for c in g.terms.values()
    ):
        fc = f.terms
        gc = g.terms
        for e1 in fe:
            c1 = fc[e1]
            if order is None:
                for e2 in ge:
                    k = e1 + e2
                    out[k] = out.get(k, 0) + c1 * gc[e2]
            else:
                lim = order - e1
                for e2 in ge:
                    if e2 >= lim:
                        break
                    k = e1 + e2
                    out[k] = out.get(k, 0) + c1 * gc[e2]
    else:
        fc = f.terms
        gc = g.terms
        for e1 in fe:
            c1 = fc[e1]
            if order is None:
                for e2 in ge:
                    k = e1 + e2
                    out[k] = out.get(k, 0) + c1 * gc[e2]
            else:
                lim = order - e1
                for e2 in ge:
                    if e2 >= lim:
                        break
                    k = e1 + e2
                    out[k] = out.get(k, 0) + c1 * gc[e2]
    return QSeries(out, order)


# -- the spec operations ----------------------------------------------------


def mul(f: QSeries, g: QSeries) -> QSeries:
    return f * g


def inverse(f: QSeries, order: Rational | None = None) -> QSeries:
    """Multiplicative inverse; Laurent leading terms allowed.

    The result order is the sound bound Of - 2*val(f); for exact inputs the
    requested ``order`` (default DEFAULT_ORDER) is used instead.
    """
    if not f.terms:
        raise ZeroDivision("cannot invert a series that is zero through its order")
    lead_e = min(f.terms)
    lead_c = Fraction(f.terms[lead_e])
    if f.order is not None:
        sound = f.order - 2 * lead_e
    else:
        sound = None
    req = None if order is None else exponent_num(order)
    onum = _min_order(sound, req)
    if onum is None:
        onum = exponent_num(DEFAULT_ORDER)
    # shifted unit part u: f = lead_c * q^lead_e * (1 + u), val(u) > 0
    u = {e - lead_e: Fraction(c) / lead_c for e, c in f.terms.items() if e != lead_e}
    # recurrence for (1+u)^{-1} on the monoid generated by supp(u)
    k = onum + lead_e  # work far enough that the final shift lands at onum
    inv = _power_series_inverse_unit(u, k)
    terms = {e - lead_e: _norm_coeff(c / lead_c) for e, c in inv.items()}
    return QSeries(terms, onum)


def _support_step(u: dict[int, Fraction]) -> int:
    step = 0
    for e in u:
        step = gcd(step, e)
    return step if step else 1


def _power_series_inverse_unit(u: dict[int, Rational], order: int) -> dict[int, Rational]:
    """Coefficients of 1/(1+u) through exponent < order, u with positive valuation."""
    out: dict[int, Rational] = {0: 1}
    if not u:
        return out
    step = _support_step(u)
    ue = sorted(u)
    for n in range(step, max(order, 0), step):
        s = 0
        for e in ue:
            if e > n:
                break
            c = out.get(n - e)
            if c is not None:
                s += u[e] * c
        if s:
            out[n] = _norm_coeff(-s)
    return {e: c for e, c in out.items() if e < order}


def pow_int(f: QSeries, e: int) -> QSeries:
    """Binary powering; pow_int(f, 0) = 1, negative powers via inverse."""
    if e == 0:
        return QSeries.one()
    if e < 0:
        return pow_int(inverse(f), -e)
    result = None
    base = f
    k = e
    while k:
        if k & 1:
            result = base if result is None else result * base
        k >>= 1
        if k:
            base = base * base
    return result


def sqrt(f: QSeries) -> QSeries:
    """Formal square root; leading coefficient must be a rational square."""
    if not f.terms:
        raise ZeroDivision("square root of a series that is zero through its order")
    lead_e = min(f.terms)
    if lead_e % 2:
        raise GridOverflow("square root would leave the exponent grid")
    lead_c = Fraction(f.terms[lead_e])
    root = _rational_sqrt(lead_c)
    if root is None:
        raise QSeriesError(f"leading coefficient {lead_c} is not a rational square")
    u = {e - lead_e: Fraction(c) / lead_c for e, c in f.terms.items() if e != lead_e}
    onum = None if f.order is None else f.order - lead_e // 2
    k = exponent_num(DEFAULT_ORDER) + lead_e if onum is None else onum + lead_e // 2
    # s with s^2 = 1+u: s_n = (u_n - sum_{0<m<n} s_m s_{n-m}) / 2
    out: dict[int, Rational] = {0: 1}
    if u:
        step = _support_step(u)
        for n in range(step, max(k, 0), step):
            s = Fraction(u.get(n, 0))
            for m in out:
                if 0 < m < n and (n - m) in out:
                    s -= out[m] * out[n - m]
            if s:
                out[n] = _norm_coeff(s / 2)
    terms = {e + lead_e // 2: _norm_coeff(root * c) for e, c in out.items()}
    return QSeries(terms, onum)


def _rational_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    from math import isqrt

    pn, qd = x.numerator, x.denominator
    rn, rd = isqrt(pn), isqrt(qd)
    if rn * rn == pn and rd * rd == qd:
        return Fraction(rn, rd)
    return None


def theta_op(f: QSeries) -> QSeries:
    """q d/dq: each term a*q^e maps to (a*e)*q^e.

    This is the paper-style derivative with the global d/dz scaling absorbed;
    all downstream identities are calibrated to this convention.
    """
    terms = {e: _norm_coeff(Fraction(e, GRID) * c) for e, c in f.terms.items() if e}
    return QSeries(terms, f.order, _clean=True)


def log_derivative(f: QSeries) -> QSeries:
    """theta_op(f)/f; additive over products, log_derivative(q^c * f) = c + L(f)."""
    return theta_op(f) * inverse(f)


def shift_z_plus_1(f: QSeries) -> QSeries:
    """Substitute z -> z+1, i.e. q^j -> (-1)^j q^j for integer j."""
    terms = {}
    for e, c in f.terms.items():
        if e % GRID:
            raise NonIntegralExponent(
                f"z -> z+1 on a term q^({Fraction(e, GRID)}) would need nontrivial roots of unity"
            )
        terms[e] = -c if (e // GRID) % 2 else c
    return QSeries(terms, f.order, _clean=True)


def scale_variable(f: QSeries, m: Rational) -> QSeries:
    """Substitute z -> m z (q^e -> q^{me}); m positive with denominator dividing 2."""
    mf = Fraction(m)
    if mf <= 0 or mf.denominator > 2:
        raise GridOverflow(f"scale factor {m} not a positive rational with denominator dividing 2")
    terms = {}
    for e, c in f.terms.items():
        num = e * mf.numerator
        if num % mf.denominator:
            raise GridOverflow(f"scaled exponent {Fraction(e, GRID) * mf} leaves the grid")
        terms[num // mf.denominator] = c
    order = None
    if f.order is not None:
        num = f.order * mf.numerator
        order = num // mf.denominator  # floor keeps the bound sound
    return QSeries(terms, order, _clean=True)


# -- comparisons and parity helpers -----------------------------------------


def first_difference(
    f: QSeries, g: QSeries, order: Rational | None = None
) -> tuple[Fraction, Fraction, Fraction] | None:
    """First exponent below the sound comparison bound where f and g differ."""
    bound = _min_order(f.order, g.order)
    if order is not None:
        bound = _min_order(bound, exponent_num(order))
    exps = set(f.terms) | set(g.terms)
    for e in sorted(exps):
        if bound is not None and e >= bound:
            break
        cf = Fraction(f.terms.get(e, 0))
        cg = Fraction(g.terms.get(e, 0))
        if cf != cg:
            return Fraction(e, GRID), cf, cg
    return None


def equal_through(f: QSeries, g: QSeries, order: Rational | None = None) -> bool:
    return first_difference(f, g, order) is None


def is_integral(f: QSeries, order: Rational | None = None) -> bool:
    bound = f.order if order is None else _min_order(f.order, exponent_num(order))
    return all(
        Fraction(c).denominator == 1
        for e, c in f.terms.items()
        if bound is None or e < bound
    )


def reduces_mod_2(f: QSeries, order: Rational | None = None) -> int | None:
    """If every coefficient is an integer and all nonconstant ones are even,
    return the constant term mod 2; otherwise None.

    This is the exact "series reduces to c mod 2" predicate used by the
    feasibility checks.
    """
    if not is_integral(f, order):
        return None
    bound = f.order if order is None else _min_order(f.order, exponent_num(order))
    const = 0
    for e, c in f.terms.items():
        if bound is not None and e >= bound:
            continue
        if e == 0:
            const = int(c) % 2
        elif int(c) % 2:
            return None
    return const


def product_over_m(
    factor_exponent,  # callable m -> exponent (q units, Rational) of the m-th factor's q-power
    factor_coeff,  # callable m -> coefficient s_m in (1 + s_m q^{e_m})
    order: Rational,
) -> QSeries:
    """Expand an infinite product prod_{m>=1} (1 + s_m q^{e_m}) through ``order``.

    Factors with e_m >= order contribute nothing and terminate the loop
    (exponents must be nondecreasing in m for the cutoff to be sound).
    """
    onum = exponent_num(order)
    acc = QSeries({0: 1}, onum, _clean=True)
    m = 1
    while True:
        e = exponent_num(factor_exponent(m))
        if e >= onum:
            break
        c = factor_coeff(m)
        if c:
            acc = acc * QSeries({0: 1, e: _norm_coeff(Fraction(c))}, onum)
        m += 1
    return acc
