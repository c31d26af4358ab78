"""Concrete lattices via Gram matrices: duals, prime-split duals, shadows,
theta series by enumeration, genus invariants, modularities and neighbors.

A lattice is stored as a row basis inside an ambient rational quadratic
space, so sublattice/superlattice constructions (duals, even sublattices,
shadows, neighbors) stay comparable: two lattices built from the same
ambient frame can be tested for literal equality of their Z-spans.  A
lattice built from a bare Gram matrix gets its own frame with basis I.

Conventions are Conway-Sloane throughout: oddity and p-excess live in Z/8,
gamma_2 = xi^oddity and gamma_p = xi^{-p-excess} with xi = e^{pi i/4}; the
oddity is computed from the 2-adic Gauss sum over the shadow coset in exact
cyclotomic arithmetic rather than from 2-adic Jordan symbols.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd

import numpy as np

from . import _enum, _linalg as la
from . import qseries as qs
from ._cyclotomic import CycloElement, sqrt_integer
from .qseries import QSeries, Rational


class LatticeError(ValueError):
    pass


class NotIntegral(LatticeError):
    pass


class DimensionTooLarge(LatticeError):
    pass


class HypothesisViolation(LatticeError):
    pass


class GaussSumMismatch(LatticeError):
    pass


class LevelViolation(LatticeError):
    pass


def _frac_rows(rows) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


@dataclass(frozen=True)
class GramLattice:
    """Full-rank lattice: row basis in an ambient rational quadratic space."""

    basis: tuple[tuple[Fraction, ...], ...]
    ambient: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_gram(cls, gram) -> "GramLattice":
        g = _frac_rows(gram)
        if not la.is_symmetric([list(r) for r in g]):
            raise LatticeError("gram matrix must be symmetric")
        if not la.is_positive_definite([list(r) for r in g]):
            raise LatticeError("gram matrix must be positive definite")
        n = len(g)
        return cls(basis=_frac_rows(la.identity(n)), ambient=g)

    def with_basis(self, rows) -> "GramLattice":
        return GramLattice(basis=_frac_rows(rows), ambient=self.ambient)

    @property
    def n(self) -> int:
        return len(self.basis)

    @cached_property
    def gram(self) -> list[list[Fraction]]:
        b = [list(r) for r in self.basis]
        a = [list(r) for r in self.ambient]
        return la.mat_mul(la.mat_mul(b, a), la.transpose(b))

    @cached_property
    def det(self) -> Fraction:
        return la.det(self.gram)

    @property
    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self.gram for x in row)

    @property
    def is_two_integral(self) -> bool:
        return all(x.denominator % 2 for row in self.gram for x in row)

    @property
    def is_even(self) -> bool:
        return self.is_integral and all(self.gram[i][i] % 2 == 0 for i in range(self.n))

    @property
    def is_odd(self) -> bool:
        return self.is_integral and not self.is_even

    def norm(self, coords) -> Fraction:
        v = la.vec_mat([Fraction(x) for x in coords], [list(r) for r in self.basis])
        return _ambient_norm(self, v)

    def canonical_basis(self) -> tuple[tuple[Fraction, ...], ...]:
        return _frac_rows(la.hnf_rational([list(r) for r in self.basis]))

    def same_lattice(self, other: "GramLattice") -> bool:
        return self.ambient == other.ambient and self.canonical_basis() == other.canonical_basis()

    def to_data(self, name: str = "") -> dict:
        return {"name": name, "gram": [[str(x) for x in row] for row in self.gram]}

    @classmethod
    def from_data(cls, data) -> "GramLattice":
        return cls.from_gram([[Fraction(x) for x in row] for row in data["gram"]])

    def __repr__(self) -> str:
        return f"GramLattice(n={self.n}, det={self.det})"


def _ambient_norm(L: GramLattice, v) -> Fraction:
    a = L.ambient
    return sum(v[i] * a[i][j] * v[j] for i in range(len(v)) for j in range(len(v)))


def _ambient_dot(L: GramLattice, v, w) -> Fraction:
    a = L.ambient
    return sum(v[i] * a[i][j] * w[j] for i in range(len(v)) for j in range(len(v)))


@dataclass(frozen=True)
class CosetLattice:
    """base + offset, offset in the base's basis coordinates (Babai-reduced)."""

    base: GramLattice
    offset: tuple[Fraction, ...]

    @classmethod
    def make(cls, base: GramLattice, offset_coords) -> "CosetLattice":
        off = [Fraction(x) for x in offset_coords]
        reduced = tuple(x - Fraction((x + Fraction(1, 2)).__floor__()) for x in off)
        return cls(base=base, offset=reduced)

    @property
    def is_trivial(self) -> bool:
        return all(x == 0 for x in self.offset)

    def ambient_offset(self) -> list[Fraction]:
        return la.vec_mat(list(self.offset), [list(r) for r in self.base.basis])

    def __repr__(self) -> str:
        return f"CosetLattice(offset={[str(x) for x in self.offset]}, base={self.base!r})"


# -- elementary constructions ----------------------------------------------------


def from_gram(gram) -> GramLattice:
    return GramLattice.from_gram(gram)


def dual(L: GramLattice) -> GramLattice:
    """Dual basis rows gram^{-1} B in the same ambient frame."""
    rows = la.mat_mul(la.mat_inv(L.gram), [list(r) for r in L.basis])
    return L.with_basis(rows)


def scale_norms(L: GramLattice, c: Rational) -> GramLattice:
    """sqrt(c)-rescaled lattice: same basis, ambient form multiplied by c."""
    cf = Fraction(c)
    if cf <= 0:
        raise LatticeError("scale factor must be positive")
    amb = _frac_rows([[cf * x for x in row] for row in L.ambient])
    return GramLattice(basis=L.basis, ambient=amb)


def scale_coset(C: CosetLattice, c: Rational) -> CosetLattice:
    return CosetLattice(base=scale_norms(C.base, c), offset=C.offset)


def direct_sum(a: GramLattice, b: GramLattice) -> GramLattice:
    ga, gb = a.gram, b.gram
    n, m = a.n, b.n
    gram = [[ga[i][j] if i < n and j < n else Fraction(0) for j in range(n + m)] for i in range(n)]
    gram += [
        [gb[i - n][j - n] if j >= n else Fraction(0) for j in range(n + m)] for i in range(n, n + m)
    ]
    return GramLattice.from_gram(gram)


def lattice_sum(a: GramLattice, b: GramLattice) -> GramLattice:
    if a.ambient != b.ambient:
        raise LatticeError("lattices live in different ambient frames")
    rows = [list(r) for r in a.basis] + [list(r) for r in b.basis]
    return a.with_basis(la.hnf_rational(rows))


def lattice_intersect(a: GramLattice, b: GramLattice) -> GramLattice:
    return dual(lattice_sum(dual(a), dual(b)))


def sublattice_index(sub: GramLattice, sup: GramLattice) -> Fraction:
    return (sub.det / sup.det) ** Fraction(1, 2)


def contains(L: GramLattice, ambient_vector) -> bool:
    coords = la.vec_mat(
        [Fraction(x) for x in ambient_vector],
        la.mat_inv([list(r) for r in L.basis]),
    )
    return all(x.denominator == 1 for x in coords)


def coset_contains(C: CosetLattice, ambient_vector) -> bool:
    diff = [Fraction(x) - y for x, y in zip(ambient_vector, C.ambient_offset())]
    return contains(C.base, diff)


# -- prime-split duals -------------------------------------------------------------


def _relevant_primes(L: GramLattice) -> list[int]:
    d = L.det
    return sorted(set(la.prime_factors(d.numerator) + la.prime_factors(d.denominator)))


def _p_part_between(X: GramLattice, D: GramLattice, p: int) -> GramLattice:
    """D + (p-primary part of X/D), for D a finite-index sublattice of X."""
    coords = la.mat_mul([list(r) for r in D.basis], la.mat_inv([list(r) for r in X.basis]))
    a = la.int_matrix(coords)
    u, s, v = la.snf(a)
    vinv = la.mat_inv(la.frac_matrix(v))
    # adapted basis of X: rows of v^{-1} (in X-coords); D = span{s_i * adapted_i}
    rows = []
    n = X.n
    for i in range(n):
        si = s[i][i]
        q = la.part_of(si, [p])
        scagve = Fraction(si, q)
        rows.append([scagve * x for x in vinv[i]])
    in_ambient = la.mat_mul(rows, [list(r) for r in X.basis])
    return X.with_basis(la.hnf_rational(in_ambient))


def pi_dual(L: GramLattice, primes) -> GramLattice:
    """The lattice agreeing with the dual at primes in Pi and with L elsewhere."""
    pi = {int(p) for p in primes}
    Ld = dual(L)
    relevant = _relevant_primes(L)
    if not any(p in pi for p in relevant):
        return L
    if all(p in pi for p in relevant):
        return Ld
    T = lattice_sum(L, Ld)
    D = lattice_intersect(L, Ld)
    acc = D
    for p in relevant:
        X = Ld if p in pi else L
        acc = lattice_sum(acc, _p_part_between(X, D, p))
    return acc


def det_part(L: GramLattice, primes) -> Fraction:
    """Pi-part of det L: (det L / det L^{*Pi})^{1/2}."""
    ratio = L.det / pi_dual(L, primes).det
    num = _sqrt_exact(ratio.numerator)
    den = _sqrt_exact(ratio.denominator)
    if num is None or den is None:
        raise LatticeError(f"determinant ratio {ratio} is not a square")
    return Fraction(num, den)


def _sqrt_exact(n: int) -> int | None:
    from math import isqrt

    r = isqrt(n)
    return r if r * r == n else None


# -- even sublattice and shadows -----------------------------------------------------


def _parity(x: Fraction) -> int:
    if x.denominator % 2 == 0:
        raise NotIntegral("entry is not 2-integral")
    return x.numerator % 2


def even_sublattice(L: GramLattice) -> GramLattice:
    """Kernel of u -> u.u mod 2; equals L when L is even, index 2 otherwise."""
    if not L.is_two_integral:
        raise NotIntegral("even sublattice needs a 2-integral lattice")
    g = L.gram
    values = [_parity(g[i][i]) for i in range(L.n)]
    if not any(values):
        return L
    k = la.kernel_mod(values, 2)
    rows = la.mat_mul(la.frac_matrix(k), [list(r) for r in L.basis])
    return L.with_basis(la.hnf_rational(rows))


def _shadow_two_integral(L: GramLattice) -> CosetLattice:
    """Shadow of a 2-integral lattice: dual coset characterized by
    2 w.u = u.u mod 2Z_2 for all u in L."""
    Ld = dual(L)
    L0 = even_sublattice(L)
    if L0.same_lattice(L):
        return CosetLattice.make(Ld, [Fraction(0)] * L.n)
    D0 = dual(L0)
    binv = la.mat_inv([list(r) for r in Ld.basis])
    for row in D0.basis:
        coords = la.vec_mat(list(row), binv)
        if any(x.denominator != 1 for x in coords):
            return CosetLattice.make(Ld, coords)
    raise LatticeError("even sublattice dual did not extend the dual")  # unreachable


def shadow(L: GramLattice) -> CosetLattice:
    if not L.is_integral:
        raise NotIntegral("shadow needs an integral lattice")
    return _shadow_two_integral(L)


def pi_shadow(L: GramLattice, primes) -> CosetLattice:
    """S_Pi: shadow of the co-Pi dual, rescaled through the 2-level when 2 is
    not in Pi; a coset of the Pi-dual."""
    if not L.is_integral:
        raise NotIntegral("pi_shadow needs an integral lattice")
    pi = {int(p) for p in primes}
    co_pi = [p for p in _relevant_primes(L) if p not in pi]
    M = pi_dual(L, co_pi)
    if 2 in pi:
        return _shadow_two_integral(M)
    l2 = la.part_of(level(L), [2])
    s = _shadow_two_integral(scale_norms(M, l2))
    return scale_coset(s, l2)


# -- theta series ----------------------------------------------------------------------


def _reduced_gram_offset(obj) -> tuple[list[list[Fraction]], list[Fraction] | None]:
    if isinstance(obj, CosetLattice):
        g = obj.base.gram
        off = list(obj.offset)
    else:
        g = obj.gram
        off = None
    n = len(g)
    if n > 2:
        red, t = la.lll_reduce(g)
        if off is not None:
            off = la.vec_mat(off, la.mat_inv(la.frac_matrix(t)))
        return red, off
    return g, off


def theta_series(obj: GramLattice | CosetLattice, order: Rational) -> QSeries:
    """Sum over (coset) vectors of q^{v.v}, exact through exponents < order."""
    bound = Fraction(order)
    g, off = _reduced_gram_offset(obj)
    hist = _enum.norms_upto(g, bound, off, inclusive=False)
    terms = {}
    for norm, count in hist.items():
        terms[qs.exponent_num(norm)] = count  # raises GridOverflow off the 1/24 grid
    return QSeries(terms, qs.exponent_num(bound))


def min_norm(obj: GramLattice | CosetLattice) -> Fraction:
    g, off = _reduced_gram_offset(obj)
    return _enum.min_norm(g, off)


def short_vector_coords(L: GramLattice, bound: Rational) -> list[tuple[tuple[int, ...], Fraction]]:
    """All (coords, norm) with norm <= bound, in the lattice's own basis."""
    return _enum.vectors_upto(L.gram, Fraction(bound), None)


# -- isometry and modularities ------------------------------------------------------


def is_isometric(L1: GramLattice, L2: GramLattice, max_dim: int = 26):
    """Backtracking isometry test on short-vector candidates.

    Returns (True, T) with T integer, T G2 T^t = G1 (rows are the images of
    the first lattice's basis in the second's coordinates), or (False, None).
    """
    if L1.n != L2.n:
        return False, None
    if L1.n > max_dim:
        raise DimensionTooLarge(f"isometry search limited to dim <= {max_dim}")
    if L1.det != L2.det:
        return False, None
    g1r, t1 = la.lll_reduce(L1.gram)
    g2r, t2 = la.lll_reduce(L2.gram)
    n = L1.n
    maxnorm = max(max(g1r[i][i] for i in range(n)), max(g2r[i][i] for i in range(n)))
    vecs1 = _enum.norms_upto(g1r, maxnorm)
    vecs2_list = _enum.vectors_upto(g2r, maxnorm)
    hist2: dict[Fraction, int] = {}
    for _, nm in vecs2_list:
        hist2[nm] = hist2.get(nm, 0) + 1
    if {k: v for k, v in vecs1.items() if k != 0} != {k: v for k, v in hist2.items() if k != 0}:
        return False, None
    cand = np.array([c for c, _ in vecs2_list], dtype=np.int64)
    norms = np.array([int(nm * 1) if nm.denominator == 1 else -1 for _, nm in vecs2_list])
    denoms = {nm.denominator for _, nm in vecs2_list}
    exact_norms = [nm for _, nm in vecs2_list]
    g2np_den = 1
    for row in g2r:
        for x in row:
            g2np_den = g2np_den * x.denominator // gcd(g2np_den, x.denominator)
    g2np = np.array([[int(x * g2np_den) for x in row] for row in g2r], dtype=np.int64)
    cand_g2 = cand @ g2np  # scaled inner products
    target_norm = [Fraction(g1r[i][i]) for i in range(n)]
    norm_ok = []
    for i in range(n):
        t = target_norm[i] * g2np_den
        if t.denominator != 1:
            return False, None
        mask = np.array([exact_norms[j] == target_norm[i] for j in range(len(exact_norms))])
        norm_ok.append(mask)

    rows: list[np.ndarray] = []

    def dfs(i: int) -> bool:
        if i == n:
            return True
        mask = norm_ok[i].copy()
        for j, rowv in enumerate(rows):
            tij = Fraction(g1r[i][j]) * g2np_den
            if tij.denominator != 1:
                return False
            mask &= (cand_g2 @ rowv) == int(tij)
            if not mask.any():
                return False
        for idx in np.flatnonzero(mask):
            rows.append(cand[idx])
            if dfs(i + 1):
                return True
            rows.pop()
        return False

    if not dfs(0):
        return False, None
    tr = la.frac_matrix([[int(x) for x in row] for row in rows])
    # map back through the reduction transforms: witness W with W G2 W^t = G1
    w = la.mat_mul(la.mat_mul(la.mat_inv(la.frac_matrix(t1)), tr), la.frac_matrix(t2))
    check = la.mat_mul(la.mat_mul(w, L2.gram), la.transpose(w))
    assert check == L1.gram, "isometry witness failed verification"
    return True, [[int(x) for x in row] for row in w]


def level(L: GramLattice) -> int:
    """Smallest l with sqrt(l) L* integral."""
    if not L.is_integral:
        raise NotIntegral("level needs an integral lattice")
    ginv = la.mat_inv(L.gram)
    l = 1
    for row in ginv:
        for x in row:
            l = l * x.denominator // gcd(l, x.denominator)
    return l


def even_level(L: GramLattice) -> int | None:
    """Smallest l with sqrt(l) L* even; None when L is odd."""
    if not L.is_even:
        return None
    lp = level(L)
    ginv = la.mat_inv(L.gram)
    if all((lp * ginv[i][i]) % 2 == 0 for i in range(L.n)):
        return lp
    return 2 * lp


def exact_divisors(n: int) -> list[int]:
    return [m for m in range(1, n + 1) if n % m == 0 and gcd(m, n // m) == 1]


def modularity_levels(L: GramLattice, max_dim: int = 26) -> set[int]:
    """{m exactly dividing the level : sqrt(m) L^{*Pi(m)} is isometric to L}."""
    if not L.is_integral:
        raise NotIntegral("modularities need an integral lattice")
    out = {1}
    for m in exact_divisors(level(L)):
        if m == 1:
            continue
        M = scale_norms(pi_dual(L, la.prime_factors(m)), m)
        if M.det != L.det:
            continue
        ok, _ = is_isometric(M, L, max_dim)
        if ok:
            out.add(m)
    return out


def is_strongly_modular(L: GramLattice, N: int, max_dim: int = 26) -> bool:
    """Level divides N and every exact divisor of N is a modularity level."""
    lv = level(L)
    if N % lv:
        return False
    levels = modularity_levels(L, max_dim)
    for m in exact_divisors(N):
        if m == 1 or m in levels:
            continue
        M = scale_norms(pi_dual(L, la.prime_factors(m)), m)
        if M.det != L.det:
            return False
        ok, _ = is_isometric(M, L, max_dim)
        if not ok:
            return False
    return True


# -- genus invariants ------------------------------------------------------------------


@dataclass(frozen=True)
class GenusData:
    det: Fraction
    level: int
    even_level: int | None
    oddity: int
    p_excess: dict  # odd prime -> int mod 8
    gamma: dict  # prime -> int mod 8 (gamma_p = xi^gamma[p])

    def to_data(self) -> dict:
        return {
            "det": str(self.det),
            "level": self.level,
            "even_level": self.even_level,
            "oddity": self.oddity,
            "p_excess": {str(p): v for p, v in sorted(self.p_excess.items())},
            "gamma": {str(p): v for p, v in sorted(self.gamma.items())},
        }


_VINF = 10**9


def _v_p(x: Fraction, p: int) -> int:
    if x == 0:
        return _VINF
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _diagonalize_p(gram, p: int) -> list[Fraction]:
    """Diagonal entries of a p-adic diagonalization (odd p only: the vector
    e_a + e_b always rescues a minimal-valuation off-diagonal entry)."""
    g = [[Fraction(x) for x in row] for row in gram]
    n = len(g)
    out = []
    idx = list(range(n))
    while idx:
        best = None
        for a in idx:
            for b in idx:
                if g[a][b]:
                    v = _v_p(g[a][b], p)
                    if best is None or v < best[0]:
                        best = (v, a, b)
        assert best is not None, "degenerate block in p-adic diagonalization"
        v, a, b = best
        if a == b:
            pivot = a
        elif _v_p(g[a][a], p) <= v:
            pivot = a
        elif _v_p(g[b][b], p) <= v:
            pivot = b
        else:
            # e_a += e_b: diagonal entry becomes g_aa + 2 g_ab + g_bb, valuation v
            for j in range(n):
                g[a][j] += g[b][j]
            for i in range(n):
                g[i][a] += g[i][b]
            pivot = a
        d = g[pivot][pivot]
        out.append(d)
        idx.remove(pivot)
        factors = {i: g[i][pivot] / d for i in idx}
        for i in idx:
            if factors[i]:
                for j in range(n):
                    g[i][j] -= factors[i] * g[pivot][j]
        for i in idx:
            if factors[i]:
                for j in range(n):
                    g[j][i] -= factors[i] * g[j][pivot]
    return out


def _legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def p_excess(L: GramLattice, p: int) -> int:
    """Conway-Sloane p-excess (odd p) from a rational p-adic diagonalization."""
    if p == 2:
        raise LatticeError("use the oddity for p = 2")
    diag = _diagonalize_p(L.gram, p)
    by_level: dict[int, list[Fraction]] = {}
    for d in diag:
        by_level.setdefault(_v_p(d, p), []).append(d)
    total = 0
    for k, entries in by_level.items():
        q = Fraction(p) ** k
        total += (q - 1) * len(entries)  # stays integral: q - 1 times count
        eps = 1
        for d in entries:
            u = d / q
            eps *= _legendre(u.numerator * u.denominator, p)
        if k % 2 and eps == -1:
            total += 4
    return int(total) % 8


def _quotient_reps(sup: GramLattice, sub: GramLattice):
    """Ambient-coordinate representatives of sup/sub (sub of finite index)."""
    coords = la.mat_mul([list(r) for r in sub.basis], la.mat_inv([list(r) for r in sup.basis]))
    a = la.int_matrix(coords)
    u, s, v = la.snf(a)
    vinv = la.mat_inv(la.frac_matrix(v))
    adapted = la.mat_mul(vinv, [list(r) for r in sup.basis])
    diag = [s[i][i] for i in range(len(s))]
    reps = []

    def rec(i, current):
        if i == len(diag):
            reps.append(list(current))
            return
        for t in range(abs(diag[i])):
            rec(i + 1, [c + t * x for c, x in zip(current, adapted[i])])

    rec(0, [Fraction(0)] * sup.n)
    return reps


def oddity(L: GramLattice) -> int:
    """2-adic Gauss sum over S_2(L)/L matched against sqrt(det_2) xi^k."""
    if not L.is_integral:
        raise NotIntegral("oddity needs an integral lattice")
    odd_primes = [p for p in _relevant_primes(L) if p != 2]
    M = pi_dual(L, odd_primes)  # dual at odd primes, L at 2
    sh = _shadow_two_integral(M)
    base = sh.base  # = L^{*2}
    off = sh.ambient_offset()
    reps = _quotient_reps(base, L)
    norms = [_ambient_norm(L, [o + r for o, r in zip(off, rep)]) for rep in reps]
    den = 1
    for nm in norms:
        den = den * nm.denominator // gcd(den, nm.denominator)
    assert den & (den - 1) == 0, "shadow norms at 2 must have 2-power denominators"
    Mc = 8 * den
    total = CycloElement(Mc, {})
    for nm in norms:
        # e^{pi i nm} = zeta_Mc^{nm * Mc / 2}
        expo = Fraction(nm * Mc, 2)
        assert expo.denominator == 1
        total = total + CycloElement.root(Mc, int(expo))
    det2 = la.part_of(L.det.numerator, [2])
    scale = sqrt_integer(det2, Mc)
    for k in range(8):
        xi_k = CycloElement.root(Mc, k * Mc // 8)
        if total == scale * xi_k:
            return k
    raise GaussSumMismatch("2-adic Gauss sum did not match sqrt(det_2) * xi^k")


_GENUS_CACHE: dict[GramLattice, GenusData] = {}


def genus_data(L: GramLattice) -> GenusData:
    cached = _GENUS_CACHE.get(L)
    if cached is not None:
        return cached
    if not L.is_integral:
        raise NotIntegral("genus data needs an integral lattice")
    odd_primes = [p for p in _relevant_primes(L) if p != 2]
    pe = {p: p_excess(L, p) for p in odd_primes}
    o = oddity(L)
    if (o - sum(pe.values())) % 8 != L.n % 8:
        raise GaussSumMismatch(
            f"oddity formula violated: {o} - {sum(pe.values())} != {L.n} mod 8"
        )
    gamma = {2: o % 8}
    for p, v in pe.items():
        gamma[p] = (-v) % 8
    out = GenusData(
        det=L.det,
        level=level(L),
        even_level=even_level(L),
        oddity=o,
        p_excess=pe,
        gamma=gamma,
    )
    _GENUS_CACHE[L] = out
    return out


def gauss_sum_gamma(L: GramLattice, primes, verify: bool = False) -> int:
    """Exponent k with gamma_Pi(L) = xi^k, from the oddity / p-excess route.

    With verify=True (even lattices) the direct coset sum of the defining
    identity is recomputed in exact cyclotomic arithmetic and compared.
    """
    gd = genus_data(L)
    pi = {int(p) for p in primes}
    k = 0
    for p in pi:
        if p == 2:
            k += gd.oddity
        else:
            k += -gd.p_excess.get(p, 0)
    k %= 8
    if verify:
        if not L.is_even:
            raise LatticeError("direct Gauss-sum verification requires an even lattice")
        if not _verify_gamma_direct(L, pi, k):
            raise GaussSumMismatch(f"direct coset sum disagrees with xi^{k}")
    return k


def _verify_gamma_direct(L: GramLattice, pi, k: int) -> bool:
    Lpi = pi_dual(L, pi)
    reps = _quotient_reps(Lpi, L)
    norms = [_ambient_norm(L, rep) for rep in reps]
    den = 1
    for nm in norms:
        den = den * nm.denominator // gcd(den, nm.denominator)
    det_pi = det_part(L, pi)
    assert det_pi.denominator == 1
    Mc = 8 * den
    for p in la.prime_factors(int(det_pi)):
        if p != 2 and Mc % p:
            Mc *= p
    total = CycloElement(Mc, {})
    for nm in norms:
        expo = Fraction(nm * Mc, 2)
        assert expo.denominator == 1
        total = total + CycloElement.root(Mc, int(expo))
    rhs = sqrt_integer(int(det_pi), Mc) * CycloElement.root(Mc, k * Mc // 8)
    return total == rhs


# -- Kronecker symbol and the theta multiplier -------------------------------------------


def kronecker(a: int, n: int) -> int:
    """Kronecker-Jacobi symbol (a|n), multiplicative in both arguments."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            sign = -sign
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


def chi_cd(L: GramLattice, c: int, d: int) -> int:
    """Theta multiplier chi_{c,d} as an exponent mod 48 (value e^{pi i k/24}).

    Defined for integral L and a bottom row (c, d) of an SL2(Z) matrix with
    cd divisible by the even-level (even L) resp. twice the level (odd L).
    """
    if not L.is_integral:
        raise NotIntegral("chi_{c,d} needs an integral lattice")
    if d == 0:
        raise LevelViolation("d = 0 is not admissible")
    if gcd(c, d) != 1:
        raise LevelViolation("(c, d) must be coprime")
    lv = even_level(L) if L.is_even else 2 * level(L)
    if (c * d) % lv:
        raise LevelViolation(f"cd must be a multiple of {lv}")
    n = L.n
    det_int = int(L.det)
    pi_d = la.prime_factors(d)
    pi_c = la.prime_factors(c) if c else []
    det_d = int(det_part(L, pi_d))
    det_c = int(det_part(L, pi_c)) if c else det_int
    xi = 0  # exponent of xi = e^{pi i/4}, mod 8
    xi -= gauss_sum_gamma(L, pi_d)
    sign = kronecker(c, det_d) * kronecker(d, det_c)
    if c % 2:
        sign *= kronecker(d, abs(c)) ** n
        sign *= kronecker(kronecker(-1, c), det_int)
        xi += -(c - 1) * n
    else:
        sign *= kronecker(c, d) ** n
        sign *= kronecker(kronecker(-1, d), det_int)
        xi += (d - 1) * n
    if sign < 0:
        xi += 4
    return (6 * (xi % 8)) % 48


# -- even neighbor ------------------------------------------------------------------------


def even_neighbor(L: GramLattice, max_dim: int = 26) -> GramLattice:
    """The even {2}-modular neighbor of an odd {2}-modular lattice with
    dimension and oddity divisible by 4; two applications of
    L -> sqrt(2) (L_0)^{*2}."""
    if not L.is_integral:
        raise HypothesisViolation("lattice must be integral")
    if not L.is_odd:
        raise HypothesisViolation("lattice must be odd")
    if L.n % 4:
        raise HypothesisViolation("dimension must be divisible by 4")
    if oddity(L) % 4:
        raise HypothesisViolation("oddity must be divisible by 4")
    if 2 not in modularity_levels(L, max_dim):
        raise HypothesisViolation("lattice must be {2}-modular")

    def step(M: GramLattice) -> GramLattice:
        return scale_norms(pi_dual(even_sublattice(M), [2]), 2)

    prime = step(L)
    if not prime.is_integral:
        raise HypothesisViolation("intermediate neighbor is not integral")
    second = step(prime)
    if not second.is_even:
        raise HypothesisViolation("even neighbor construction produced an odd lattice")
    return second


def even_neighbor_theta_identity(L: GramLattice, order: Rational) -> bool:
    """Theta of the even neighbor equals the four-term average of the lattice
    and empty-set-shadow theta series (with their z+1 twists)."""
    nb = even_neighbor(L)
    t_nb = theta_series(nb, order)
    t_l = theta_series(L, order)
    s = pi_shadow(L, ())
    t_s = theta_series(s, order)
    rhs = Fraction(1, 2) * (
        t_l + qs.shift_z_plus_1(t_l) + t_s + qs.shift_z_plus_1(t_s)
    )
    return qs.equal_through(t_nb, rhs, order)


# -- Gauss-sum rescaling law ------------------------------------------------------------


def rescale_check(L: GramLattice, primes, t: int) -> bool:
    """Exact check of the gamma_Pi rescaling identity for sqrt(t) L."""
    if t <= 0:
        raise LatticeError("t must be a positive integer")
    pi = {int(p) for p in primes}
    lhs = (gauss_sum_gamma(scale_norms(L, t), pi) - gauss_sum_gamma(L, pi)) % 8
    t1 = la.part_of(t, pi)
    t2 = t // t1
    n = L.n
    det_int = int(L.det)
    det_pi = int(det_part(L, pi))
    co = [p for p in _relevant_primes(L) if p not in pi]
    det_co = int(det_part(L, co))
    sign = kronecker(t1, det_co) * kronecker(t2, det_pi)
    if 2 not in pi:
        sign *= kronecker(t2, t1) ** n
        sign *= kronecker(kronecker(-1, t1), det_int)
        xi = -(t1 - 1) * n
    else:
        sign *= kronecker(t1, t2) ** n
        sign *= kronecker(kronecker(-1, t2), det_int)
        xi = (t2 - 1) * n
    rhs = (xi + (4 if sign < 0 else 0)) % 8
    return lhs == rhs
