"""Exact integer and rational matrix utilities.

Matrices are lists of lists; rational entries are Fractions (or ints).
Everything here is desk-scale (dimensions well under a hundred), so the
textbook algorithms with exact arithmetic are the right tool.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

Matrix = list[list[Fraction]]


def frac_matrix(rows) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def int_matrix(rows) -> list[list[int]]:
    out = []
    for row in rows:
        r = []
        for x in row:
            f = Fraction(x)
            if f.denominator != 1:
                raise ValueError(f"entry {x} is not an integer")
            r.append(f.numerator)
        out.append(r)
    return out


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a: Matrix, v) -> list[Fraction]:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def vec_mat(v, a: Matrix) -> list[Fraction]:
    return [sum(v[i] * a[i][j] for i in range(len(v))) for j in range(len(a[0]))]


def is_symmetric(a: Matrix) -> bool:
    n = len(a)
    return all(a[i][j] == a[j][i] for i in range(n) for j in range(i))


def mat_inv(a: Matrix) -> Matrix:
    n = len(a)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        p = next((r for r in range(c, n) if aug[r][c]), None)
        if p is None:
            raise ValueError("matrix is singular")
        aug[c], aug[p] = aug[p], aug[c]
        inv = Fraction(1) / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def det(a: Matrix) -> Fraction:
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    sign = 1
    result = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            sign = -sign
        result *= m[c][c]
        inv = Fraction(1) / m[c][c]
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] * inv
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return sign * result


def solve(a: Matrix, rhs) -> list[Fraction]:
    """Solve a x = rhs for square nonsingular a."""
    n = len(a)
    aug = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(a)]
    for c in range(n):
        p = next((r for r in range(c, n) if aug[r][c]), None)
        if p is None:
            raise ValueError("matrix is singular")
        aug[c], aug[p] = aug[p], aug[c]
        inv = Fraction(1) / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [aug[i][n] for i in range(n)]


def ldl(a: Matrix) -> tuple[Matrix, list[Fraction]]:
    """a = L diag(d) L^T with L unit lower triangular; requires positive definite."""
    n = len(a)
    l = identity(n)
    d = [Fraction(0)] * n
    work = [[Fraction(x) for x in row] for row in a]
    for j in range(n):
        d[j] = work[j][j] - sum(l[j][k] * l[j][k] * d[k] for k in range(j))
        if d[j] <= 0:
            raise ValueError("matrix is not positive definite")
        for i in range(j + 1, n):
            l[i][j] = (work[i][j] - sum(l[i][k] * l[j][k] * d[k] for k in range(j))) / d[j]
    return l, d


def is_positive_definite(a: Matrix) -> bool:
    try:
        ldl(a)
        return True
    except ValueError:
        return False


# -- integer normal forms ------------------------------------------------------


def hnf(rows: list[list[int]]) -> list[list[int]]:
    """Row-style Hermite normal form (nonzero rows, positive pivots, reduced above)."""
    m = [list(r) for r in rows]
    if not m:
        return []
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        # clear below via gcd steps
        for i in range(r + 1, len(m)):
            while m[i][c]:
                q = m[r][c] // m[i][c]
                m[r] = [x - q * y for x, y in zip(m[r], m[i])]
                m[r], m[i] = m[i], m[r]
        if m[r][c] < 0:
            m[r] = [-x for x in m[r]]
        for i in range(r):
            q = m[i][c] // m[r][c]
            if q:
                m[i] = [x - q * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return [row for row in m[:r] if any(row)]


def hnf_rational(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """HNF-canonical basis of the Z-span of rational rows."""
    rows = [[Fraction(x) for x in row] for row in rows]
    denom = 1
    for row in rows:
        for x in row:
            denom = denom * x.denominator // gcd(denom, x.denominator)
    scaled = [[int(x * denom) for x in row] for row in rows]
    return [[Fraction(x, denom) for x in row] for row in hnf(scaled)]


def snf(a: list[list[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Smith normal form: returns (u, s, v) with u a v = s, u and v unimodular,
    s diagonal with s[i][i] | s[i+1][i+1]."""
    m = [list(r) for r in a]
    rows, cols = len(m), len(m[0]) if m else 0
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(i, j, q):  # row_i -= q * row_j
        m[i] = [x - q * y for x, y in zip(m[i], m[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def add_col(i, j, q):  # col_i -= q * col_j
        for row in m:
            row[i] -= q * row[j]
        for row in v:
            row[i] -= q * row[j]

    t = 0
    limit = min(rows, cols)
    while t < limit:
        # find a nonzero pivot
        piv = None
        for i in range(t, rows):
            for j in range(t, cols):
                if m[i][j]:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        stable = False
        while not stable:
            stable = True
            for i in range(t + 1, rows):
                if m[i][t]:
                    q = m[i][t] // m[t][t]
                    add_row(i, t, q)
                    if m[i][t]:
                        swap_rows(t, i)
                        stable = False
            for j in range(t + 1, cols):
                if m[t][j]:
                    q = m[t][j] // m[t][t]
                    add_col(j, t, q)
                    if m[t][j]:
                        swap_cols(t, j)
                        stable = False
        # divisibility sweep: pivot must divide everything below-right
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if m[i][j] % m[t][t]:
                    add_row(t, i, -1)
                    stable = False
                    break
            else:
                continue
            break
        if not stable:
            continue
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    # transposed convention: we built u m0 v' ... reconstruct s = current m
    return u, m, v


def kernel_mod(phi: list[int], modulus: int) -> list[list[int]]:
    """Basis of {x in Z^n : sum x_i phi_i = 0 mod modulus} (n rows)."""
    n = len(phi)
    # kernel of the 1 x (n+1) integer map (x, k) -> x.phi - k*modulus
    a = [phi + [-modulus]]
    u, s, v = snf(a)
    # columns of v beyond the rank span the kernel of a v^{-1}... we need
    # integer kernel basis: x with a x = 0: x = v * y where (s y) = 0: y free
    # where s diagonal entry is 0; s is 1 x (n+1) with one pivot
    vt = transpose([[Fraction(x) for x in row] for row in v])
    ker = []
    for j in range(n + 1):
        if j >= len(s) or all(s[i][j] == 0 for i in range(len(s))):
            ker.append([int(x) for x in vt[j]])
    # project away the auxiliary coordinate
    basis = [row[:n] for row in ker]
    return [row for row in hnf(basis) if any(row)]


# -- LLL -------------------------------------------------------------------------


def lll_reduce(gram: Matrix, delta: Fraction = Fraction(3, 4)) -> tuple[Matrix, list[list[int]]]:
    """Exact LLL on a positive-definite Gram matrix.

    Returns (reduced_gram, t) with t integer unimodular and
    reduced = t gram t^T.
    """
    n = len(gram)
    t = [[int(i == j) for j in range(n)] for i in range(n)]
    g = [[Fraction(x) for x in row] for row in gram]

    def gram_schmidt():
        mu = [[Fraction(0)] * n for _ in range(n)]
        b = [Fraction(0)] * n
        for i in range(n):
            b[i] = g[i][i] - sum(mu[i][k] * mu[i][k] * b[k] for k in range(i))
            for j in range(i + 1, n):
                mu[j][i] = (g[j][i] - sum(mu[j][k] * mu[i][k] * b[k] for k in range(i))) / b[i]
        return mu, b

    def row_op(i, j, q):  # basis_i -= q basis_j
        t[i] = [x - q * y for x, y in zip(t[i], t[j])]
        for k in range(n):
            g[i][k] -= q * g[j][k]
        for k in range(n):
            g[k][i] -= q * g[k][j]

    def swap(i, j):
        t[i], t[j] = t[j], t[i]
        g[i], g[j] = g[j], g[i]
        for row in g:
            row[i], row[j] = row[j], row[i]

    mu, b = gram_schmidt()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                row_op(k, j, q)
                mu, b = gram_schmidt()
        if b[k] >= (delta - mu[k][k - 1] ** 2) * b[k - 1]:
            k += 1
        else:
            swap(k, k - 1)
            mu, b = gram_schmidt()
            k = max(k - 1, 1)
    return g, t


def prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def part_of(n: int, primes) -> int:
    """Largest divisor of n supported on the given primes."""
    n = abs(n)
    out = 1
    for p in primes:
        while n % p == 0:
            n //= p
            out *= p
    return out
