"""Extremal theta-series machinery: bounds, triangular solves, shadows, scans.

A strongly N-modular lattice rationally equivalent to k copies of the base
lattice of level N has theta series  g1^k sum_{i<=t} c_i g2^i  with
t = floor(k * ord1(g1)); its empty-set shadow then has theta series
s1^k sum_i c_i s2^i.  Prescribing the first coefficients of the theta
series determines the c_i by a unit triangular solve because g2 = q + ...;
the Bürmann-Lagrange extraction provides an independent route to the same
coefficients and the proof's sign certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import etafunc as ef
from . import qseries as qs
from .etafunc import ADMISSIBLE_N, CRITICAL_DIMENSION, UnsupportedN, build_basis, divisors
from .qseries import QSeries, Rational


class ExtremalError(ValueError):
    pass


class InconsistentSystem(ExtremalError):
    """Triangular solve hit a zero pivot; guards the ord1(g1) truncation rule."""


class IndexOutOfRange(ExtremalError):
    pass


def critical_dimension(N: int) -> int:
    """24 d(N) / prod_{p|N} (p+1)."""
    if N not in ADMISSIBLE_N:
        raise UnsupportedN(f"N={N} not in {ADMISSIBLE_N}")
    return CRITICAL_DIMENSION[N]


def bound_mu(N: int, n: int) -> int:
    """Minimal-norm bound 2 floor(n/D_N) + 2, with the odd-N short-dimension
    exception n = D_N - dim C^(N) where the bound is 3."""
    D = critical_dimension(N)
    d_n = len(divisors(N))
    if n <= 0 or n % d_n:
        raise ExtremalError(f"dimension {n} is not a positive multiple of dim C^({N}) = {d_n}")
    if N % 2 and n == D - d_n:
        return 3
    return 2 * (n // D) + 2


def z4_bound(n: int) -> int:
    """Minimal Euclidean norm bound for self-dual codes over Z/4Z of length n."""
    if n < 1:
        raise ExtremalError("length must be positive")
    b = 8 * (n // 24) + 8
    if n % 24 == 23:
        b += 4
    return b


@dataclass(frozen=True)
class ExtremalProblem:
    N: int
    n: int
    k: int
    t: int

    @property
    def basis_order(self) -> Fraction:
        return None


def make_problem(N: int, n: int) -> ExtremalProblem:
    D = critical_dimension(N)
    d_n = len(divisors(N))
    if n <= 0 or n % d_n:
        raise ExtremalError(f"dimension {n} is not a positive multiple of dim C^({N}) = {d_n}")
    k = n // d_n
    ord1 = Fraction(ef.sigma(N), 8) if N % 2 else Fraction(ef.sigma(N), 6)
    t = int(k * ord1)  # floor
    return ExtremalProblem(N=N, n=n, k=k, t=t)


@dataclass(frozen=True)
class Verdict:
    feasible: bool
    reasons: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.feasible


@dataclass(frozen=True)
class ExtremalSolution:
    problem: ExtremalProblem
    c: tuple[Fraction, ...]
    theta: QSeries
    shadow: QSeries
    verdict: Verdict | None = None

    def with_verdict(self, verdict: Verdict) -> "ExtremalSolution":
        return ExtremalSolution(self.problem, self.c, self.theta, self.shadow, verdict)

    def to_data(self) -> dict:
        data = {
            "N": self.problem.N,
            "n": self.problem.n,
            "c": [str(ci) for ci in self.c],
            "theta": self.theta.to_data(),
            "shadow": self.shadow.to_data(),
        }
        if self.verdict is not None:
            data["verdict"] = "feasible" if self.verdict.feasible else "infeasible"
            data["reasons"] = list(self.verdict.reasons)
        return data


def _work_order(problem: ExtremalProblem, order: Rational | None) -> Fraction:
    base = Fraction(qs.DEFAULT_ORDER if order is None else Fraction(order))
    # shadow powers reach down to the lead of s2^t; keep everything sound
    return base + 2 * problem.t + max(problem.n, 8)


def _solve_triangular(problem: ExtremalProblem, targets: Sequence[Fraction], rows: int,
                      order: Rational | None = None) -> tuple[list[Fraction], list[QSeries]]:
    """Coefficients c_0..c_{rows-1} with [q^j] g1^k sum c_i g2^i = targets[j].

    The products g1^k g2^i start at q^i with unit coefficient, so the system
    is unit lower triangular in (j, i).
    """
    work = _work_order(problem, order)
    basis = build_basis(problem.N, work)
    powers = [qs.pow_int(basis.g1, problem.k)]
    for _ in range(1, rows):
        powers.append(powers[-1] * basis.g2)
    c: list[Fraction] = []
    for j in range(rows):
        acc = Fraction(targets[j]) if j < len(targets) else Fraction(0)
        for i in range(j):
            acc -= c[i] * powers[i].coefficient(j)
        pivot = powers[j].coefficient(j)
        if pivot == 0:
            raise InconsistentSystem(f"zero pivot at row {j} (N={problem.N}, n={problem.n})")
        c.append(acc / pivot)
    return c, powers


def solve_prescribed(problem: ExtremalProblem, prefix: Sequence[Rational],
                     order: Rational | None = None) -> ExtremalSolution:
    """Unique c_0..c_t matching the prescribed low-order theta coefficients.

    ``prefix`` gives the coefficients of q^0, q^1, ... and is padded with
    zeros through q^t; theta and shadow are expanded to the working order.
    """
    if len(prefix) > problem.t + 1:
        raise ExtremalError(f"prefix longer than t+1 = {problem.t + 1}")
    c, powers = _solve_triangular(problem, [Fraction(p) for p in prefix], problem.t + 1, order)
    theta = QSeries.zero()
    for ci, p in zip(c, powers):
        theta = theta + ci * p
    out_order = Fraction(qs.DEFAULT_ORDER if order is None else Fraction(order))
    theta = theta.truncated(out_order)
    shadow = shadow_from_coeffs(problem, c, order).truncated(out_order)
    return ExtremalSolution(problem, tuple(c), theta, shadow)


def shadow_from_coeffs(problem: ExtremalProblem, c: Sequence[Rational],
                       order: Rational | None = None) -> QSeries:
    """Theta series of the empty-set shadow: s1^k sum_i c_i s2^i."""
    if len(c) > problem.t + 1:
        raise ExtremalError(f"coefficient list longer than t+1 = {problem.t + 1}")
    work = _work_order(problem, order)
    basis = build_basis(problem.N, work)
    acc = QSeries.zero()
    power = QSeries.one()
    for i, ci in enumerate(c):
        if i:
            power = power * basis.s2
        acc = acc + Fraction(ci) * power
    out = qs.pow_int(basis.s1, problem.k) * acc
    out_order = Fraction(qs.DEFAULT_ORDER if order is None else Fraction(order))
    return out.truncated(out_order)


def bl_coefficient(problem: ExtremalProblem, i: int, order: Rational | None = None) -> Fraction:
    """c_i via the Bürmann-Lagrange extraction:

        c_i = -(k/i) [q^i] theta_op(g1) g1^{-k-1} (q/g2)^i

    with the copy count k in place of the dimension (the N = 1 proof has
    k = n); the triangular solve is the cross-check for this generalization.
    """
    if not 1 <= i <= problem.t:
        raise IndexOutOfRange(f"i={i} outside 1..t={problem.t}")
    work = Fraction(i + 4)
    basis = build_basis(problem.N, work + 2 * i + problem.n + 4)
    g1, g2 = basis.g1, basis.g2
    q_over_g2 = QSeries.monomial(1, 1) * qs.inverse(g2)
    expr = (
        qs.theta_op(g1)
        * qs.pow_int(g1, -(problem.k + 1))
        * qs.pow_int(q_over_g2, i)
    )
    return -Fraction(problem.k, i) * expr.coefficient(i)


def c2m_sign(n: int, order: Rational | None = None) -> Fraction:
    """The proof's sign certificate for N = 1: write n = 24m - l (1 <= l <= 24),
    impose theta = 1 + O(q^{2m+1}) and return the forced c_{2m}.

    Negative for every n except n = 23, where it vanishes.  When 2m exceeds
    t the system is extended through row 2m: the returned value is then the
    obstruction the series must cancel.
    """
    problem = make_problem(1, n)
    m = n // 24 + 1
    rows = max(problem.t, 2 * m) + 1
    c, _ = _solve_triangular(problem, [Fraction(1)], rows, order)
    return c[2 * m]


def _v2(x: Fraction) -> int:
    """2-adic valuation of a nonzero rational."""
    num, den = x.numerator, x.denominator
    v = 0
    while num % 2 == 0:
        num //= 2
        v += 1
    while den % 2 == 0:
        den //= 2
        v -= 1
    return v


def feasibility_check(problem: ExtremalProblem, solution: ExtremalSolution, mu_target: int,
                      order: Rational | None = None) -> Verdict:
    """Series-level necessary conditions for a lattice with minimal norm mu_target.

    Checks, reporting all failures: nonnegative integral theta coefficients
    vanishing below mu_target; theta = 1 mod 2; shadow coefficients
    nonnegative integers of a single parity; the two shadow small-vector
    counting inequalities; and (odd N) the shadow-norm congruence mod 2Z_2.
    """
    reasons: list[str] = []
    bound = Fraction(qs.DEFAULT_ORDER if order is None else Fraction(order))
    theta, shadow = solution.theta, solution.shadow

    # (a) theta: constant 1, vanishing below mu, nonnegative integers
    if theta.coefficient(0) != 1:
        reasons.append(f"theta constant term {theta.coefficient(0)} != 1")
    for e, coeff in theta.items():
        c = Fraction(coeff)
        if 0 < e < mu_target and c != 0:
            reasons.append(f"theta coefficient {c} at q^{e} violates minimal norm {mu_target}")
        if c.denominator != 1:
            reasons.append(f"theta coefficient {c} at q^{e} not an integer")
        elif c < 0:
            reasons.append(f"theta coefficient {c} at q^{e} negative")

    # (b) theta = 1 mod 2
    if qs.is_integral(theta) and qs.reduces_mod_2(theta) != 1:
        reasons.append("theta is not congruent to 1 mod 2")

    # (c) shadow: nonnegative integers, single common parity
    parities = set()
    for e, coeff in shadow.items():
        c = Fraction(coeff)
        if c.denominator != 1:
            reasons.append(f"shadow coefficient {c} at q^{e} not an integer")
            continue
        if c < 0:
            reasons.append(f"shadow coefficient {c} at q^{e} negative")
        if e != 0:
            parities.add(int(c) % 2)
    if parities == {0, 1}:
        reasons.append("shadow coefficients do not share a common parity")

    # (d) small-vector counts: none below mu/4, at most 2 below mu/2.  These
    # apply to odd lattices only; a constant term in the shadow series means
    # 0 is in the empty-set shadow, i.e. the candidate is even.
    if shadow.terms.get(0, 0) == 0:
        low4 = sum(Fraction(c) for e, c in shadow.items() if e < Fraction(mu_target, 4))
        low2 = sum(Fraction(c) for e, c in shadow.items() if e < Fraction(mu_target, 2))
        if low4 != 0:
            reasons.append(f"shadow has weight {low4} below norm mu/4 = {Fraction(mu_target, 4)}")
        if low2 > 2:
            reasons.append(f"shadow has weight {low2} below norm mu/2 = {Fraction(mu_target, 2)} (allowed 2)")

    # (e) shadow support congruence (odd determinant only, i.e. odd N):
    # every norm = oddity/4 mod 2 Z_2
    if problem.N % 2:
        odd4 = Fraction(ef.oddity_c_lattice(problem.N) * problem.k, 4)
        for e, coeff in shadow.items():
            if coeff == 0:
                continue
            r = e - odd4
            if r != 0 and _v2(r) < 1:
                reasons.append(
                    f"shadow exponent {e} violates the oddity congruence (oddity/4 = {odd4} mod 2)"
                )
                break

    return Verdict(feasible=not reasons, reasons=tuple(reasons))


def solve_extremal(N: int, n: int, mu: int | None = None,
                   order: Rational | None = None) -> ExtremalSolution:
    """Solve with prefix (1, 0, ..., 0) and attach the feasibility verdict at mu
    (default: the theorem bound)."""
    problem = make_problem(N, n)
    if mu is None:
        mu = bound_mu(N, n)
    solution = solve_prescribed(problem, [Fraction(1)], order)
    return solution.with_verdict(feasibility_check(problem, solution, mu, order))


class ScanUnsupported(ExtremalError):
    """The free-coefficient search space cannot be pinned rigorously here."""


def _solve_linear(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Exact solve of a small (possibly overdetermined) full-column-rank system;
    None when inconsistent or rank-deficient."""
    m, cols = len(rows), len(rows[0]) if rows else 0
    a = [list(map(Fraction, rows[i])) + [Fraction(rhs[i])] for i in range(m)]
    piv_rows = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, m) if a[i][c] != 0), None)
        if p is None:
            return None
        a[r], a[p] = a[p], a[r]
        pr = a[r]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c] / pr[c]
                a[i] = [x - f * y for x, y in zip(a[i], pr)]
        piv_rows.append(r)
        r += 1
    for i in range(r, m):
        if a[i][cols] != 0:
            return None
    sol = [Fraction(0)] * cols
    for c, i in enumerate(piv_rows):
        sol[c] = a[i][cols] / a[i][c]
    return sol


class _Family:
    """Affine family of candidate series with c_mu..c_t free.

    theta(x) = theta0 + sum x_j T_j and shadow(x) = shadow0 + sum x_j S_j
    where x are the free coefficients; supports pinning by shadow values.
    """

    def __init__(self, problem: ExtremalProblem, mu: int, order: Rational | None):
        self.problem = problem
        self.mu = mu
        self.order = order
        self.window = Fraction(qs.DEFAULT_ORDER if order is None else Fraction(order))
        base, powers = _solve_triangular(problem, [Fraction(1)] + [Fraction(0)] * (mu - 1), mu, order)
        self.c_low = base
        self.free = list(range(mu, problem.t + 1))
        work = _work_order(problem, order)
        basis = build_basis(problem.N, work)
        spow = [QSeries.one()]
        for _ in range(problem.t):
            spow.append(spow[-1] * basis.s2)
        s1k = qs.pow_int(basis.s1, problem.k)
        self.shadow_parts = [s1k * p for p in spow]  # index by i
        while len(powers) < problem.t + 1:
            powers.append(powers[-1] * basis.g2)
        self.theta_parts = powers
        self.theta0 = QSeries.zero()
        self.shadow0 = QSeries.zero()
        for i, ci in enumerate(self.c_low):
            self.theta0 = self.theta0 + ci * self.theta_parts[i]
            self.shadow0 = self.shadow0 + ci * self.shadow_parts[i]

    def shadow_exponents_below(self, cutoff: Fraction) -> list[Fraction]:
        exps = set()
        for i in range(self.problem.t + 1):
            for e, _ in self.shadow_parts[i].items():
                if e < cutoff:
                    exps.add(e)
        return sorted(exps)

    def solution_for(self, x: Sequence[Fraction]) -> ExtremalSolution:
        c = list(self.c_low) + [Fraction(v) for v in x]
        theta = self.theta0
        shadow = self.shadow0
        for j, i in enumerate(self.free):
            theta = theta + c[i] * self.theta_parts[i]
            shadow = shadow + c[i] * self.shadow_parts[i]
        return ExtremalSolution(
            self.problem, tuple(c), theta.truncated(self.window), shadow.truncated(self.window)
        )

    def solve_pinned(self, pins: list[tuple[Fraction, Fraction]]) -> list[Fraction] | None:
        """Free coefficients from shadow-value pins [(exponent, value), ...]."""
        rows = [[self.shadow_parts[i].coefficient(e) for i in self.free] for e, _ in pins]
        rhs = [v - self.shadow0.coefficient(e) for e, v in pins]
        return _solve_linear(rows, rhs)

    def solve_even_branch(self) -> list[Fraction] | None:
        """Pin the free coefficients by shadow = theta on the lowest exponents
        (an even candidate has empty-set shadow equal to the lattice itself)."""
        exps = self.shadow_exponents_below(Fraction(self.problem.t + len(self.free) + 2))
        rows, rhs = [], []
        for e in exps:
            row = [
                self.shadow_parts[i].coefficient(e) - self.theta_parts[i].coefficient(e)
                for i in self.free
            ]
            rows.append(row)
            rhs.append(self.theta0.coefficient(e) - self.shadow0.coefficient(e))
            if len(rows) >= len(self.free) + 3:
                break
        return _solve_linear(rows, rhs) if rows else None


def _candidate_assignments(family: _Family) -> tuple[list[list[tuple[Fraction, Fraction]]], list[Fraction]]:
    """Finite pin assignments for the odd-lattice branch, plus any exponents
    constrained only weakly (>= mu/2) that stay as search variables."""
    mu = family.mu
    lows = family.shadow_exponents_below(Fraction(mu, 2))
    fixed0 = [e for e in lows if e < Fraction(mu, 4)]
    two_slots = [e for e in lows if e >= Fraction(mu, 4)]
    assignments = []
    base = [(e, Fraction(0)) for e in fixed0]
    assignments.append(base + [(e, Fraction(0)) for e in two_slots])
    for chosen in two_slots:
        assignments.append(
            base + [(e, Fraction(2) if e == chosen else Fraction(0)) for e in two_slots]
        )
    f = len(family.free)
    extra_exponents = []
    if len(lows) < f:
        grid = family.shadow_exponents_below(Fraction(family.problem.t + f + 4))
        extra_exponents = [e for e in grid if e >= Fraction(mu, 2)][: f - len(lows)]
    return assignments, extra_exponents


def candidate_feasible(N: int, n: int, mu: int, order: Rational | None = None) -> Verdict:
    """Decide whether some admissible theta/shadow pair has minimal norm mu.

    Free coefficients beyond the forced window are pinned through the shadow
    small-norm counting constraints (finitely many cases); exponents at or
    above mu/2 are searched over a rigorously bounded range of even values.
    Feasible means a concrete series passed every check; infeasible means
    every admissible completion failed one.
    """
    problem = make_problem(N, n)
    if problem.t + 1 <= mu:
        sol = solve_prescribed(problem, [Fraction(1)], order)
        return feasibility_check(problem, sol, mu, order)
    family = _Family(problem, mu, order)
    assignments, extra = _candidate_assignments(family)
    reasons: list[str] = []

    def try_x(x: Sequence[Fraction]) -> Verdict:
        sol = family.solution_for(x)
        return feasibility_check(problem, sol, mu, order)

    for pins in assignments:
        if not extra:
            x = family.solve_pinned(pins)
            if x is None:
                continue
            v = try_x(x)
            if v.feasible:
                return v
            reasons.extend(v.reasons[:1])
        elif len(extra) == 1:
            v = _search_last_free(family, pins, extra[0], try_x)
            if v is not None and v.feasible:
                return v
            if v is not None:
                reasons.extend(v.reasons[:1])
        else:
            # feasibility-only grid; cannot certify infeasibility here
            for grid in _small_grids(len(extra)):
                x = family.solve_pinned(pins + list(zip(extra, grid)))
                if x is None:
                    continue
                v = try_x(x)
                if v.feasible:
                    return v
            reasons.append("no feasible completion found over the searched grid")
            raise ScanUnsupported(
                f"(N={N}, n={n}, mu={mu}): {len(extra)} unconstrained shadow slots"
            )
    # even-lattice branch: empty-set shadow equals the lattice
    x = family.solve_even_branch()
    if x is not None:
        v = try_x(x)
        if v.feasible:
            return v
        reasons.extend(v.reasons[:1])
    seen = tuple(dict.fromkeys(reasons))[:4]
    return Verdict(feasible=False, reasons=seen or ("no admissible completion",))


def _small_grids(k: int):
    from itertools import product

    yield from product([Fraction(v) for v in (0, 2, 4, 6, 8)], repeat=k)


def _search_last_free(family: _Family, pins, exponent: Fraction, try_x) -> Verdict | None:
    """Enumerate the one remaining even shadow value over its rigorous range.

    The candidate series is affine in the value; every window coefficient
    constrained to be nonnegative bounds the value from one side, and the
    range is scanned over even integers.
    """
    x0 = family.solve_pinned(pins + [(exponent, Fraction(0))])
    x1 = family.solve_pinned(pins + [(exponent, Fraction(2))])
    if x0 is None or x1 is None:
        return None
    sol0 = family.solution_for(x0)
    sol1 = family.solution_for(x1)
    lo, hi = Fraction(0), None
    for series0, series1 in ((sol0.theta, sol1.theta), (sol0.shadow, sol1.shadow)):
        exps = set(series0.terms) | set(series1.terms)
        for enum in exps:
            a = Fraction(series0.terms.get(enum, 0))
            b = (Fraction(series1.terms.get(enum, 0)) - a) / 2  # per unit of the pin value
            if b < 0:
                cap = -a / b
                hi = cap if hi is None else min(hi, cap)
            elif b > 0:
                need = -a / b
                if need > lo:
                    lo = need
    if hi is None:
        # unbounded direction: only a feasibility probe is possible
        for v in (0, 2, 4, 8, 16):
            x = family.solve_pinned(pins + [(exponent, Fraction(v))])
            if x is not None:
                verdict = try_x(x)
                if verdict.feasible:
                    return verdict
        raise ScanUnsupported(f"unbounded shadow slot at exponent {exponent}")
    last = None
    v = 0
    while v <= hi:
        if v >= lo:
            x = family.solve_pinned(pins + [(exponent, Fraction(v))])
            if x is not None:
                last = try_x(x)
                if last.feasible:
                    return last
        v += 2
    return last or Verdict(False, (f"empty range for shadow value at q^{exponent}",))


@dataclass(frozen=True)
class ScanRow:
    n: int
    bound: int
    best_mu: int | None  # largest candidate-feasible mu, None if all fail
    verdicts: tuple[tuple[int, Verdict], ...]

    @property
    def extremal_feasible(self) -> bool:
        return self.best_mu is not None and self.best_mu >= self.bound


def scan(N: int, n_max: int, order: Rational | None = None, jobs: int = 1) -> list[ScanRow]:
    """Candidate-feasibility table for n = d(N), 2 d(N), ..., n_max.

    For each dimension, mu is tested downward from the theorem bound until
    the series constraints pass; passing is necessary but not sufficient for
    lattice existence, so rows report candidate-feasible, never existence.
    """
    d_n = len(divisors(N))
    dims = [n for n in range(d_n, n_max + 1, d_n)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_scan_one, [(N, n, order) for n in dims]))
    return [_scan_one((N, n, order)) for n in dims]


def _scan_one(args: tuple[int, int, Rational | None]) -> ScanRow:
    N, n, order = args
    bound = bound_mu(N, n)
    verdicts = []
    best = None
    for mu in range(bound, 0, -1):
        v = candidate_feasible(N, n, mu, order)
        verdicts.append((mu, v))
        if v.feasible:
            best = mu
            break
    return ScanRow(n=n, bound=bound, best_mu=best, verdicts=tuple(verdicts))


def ln2_nonneg_check(a: int, b: int, c: int, order: Rational) -> bool:
    """Nonnegativity certificate for q^c s1^{-2a} s2^{-2b} at level N = 2.

    Returns True when the expansion has nonnegative coefficients through
    ``order`` and, whenever c > 0 is supplied, the logarithmic derivative
    does as well.  The claim holds for 2b <= a <= 4b (series) and
    2b <= a <= min(2b + c, 4b) (logarithmic derivative).
    """
    work = Fraction(order)
    basis = build_basis(2, work + 2 * (a + b) + 8)
    expr = QSeries.monomial(1, c) * qs.pow_int(basis.s1, -2 * a) * qs.pow_int(basis.s2, -2 * b)
    ok = all(Fraction(cf) >= 0 for e, cf in expr.items() if e < work)
    if ok and a <= 2 * b + c:  # part (ii) range; outside it the lemma makes no claim
        ld = qs.log_derivative(expr)
        ok = all(Fraction(cf) >= 0 for e, cf in ld.items() if e < work)
    return ok
