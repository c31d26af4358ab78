"""Short-vector enumeration for positive-definite rational quadratic forms.

Fincke-Pohst with a float Cholesky for pruning and exact integer arithmetic
for the final norms: the float intervals are widened by a safety slack and
every candidate's norm is recomputed exactly (scaled to integers), so the
results are exact provided the slack covers the rounding error, which at
desk scale (entries and bounds a few thousand) it does by many orders of
magnitude.

A pure-Fraction reference enumerator is included as the independent oracle
for the fast path.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from math import ceil, floor, gcd, sqrt

import numpy as np

SLACK = 1e-6
CHUNK = 1_000_000


def _lcm_den(values) -> int:
    d = 1
    for v in values:
        d = d * v.denominator // gcd(d, v.denominator)
    return d


def _scaled_ints(gram, offset):
    """(Gi, s, o_num, r): s*gram integer, offset = o_num/r."""
    flat = [Fraction(x) for row in gram for x in row]
    s = _lcm_den(flat)
    gi = [[int(Fraction(x) * s) for x in row] for row in gram]
    if offset is None:
        return gi, s, [0] * len(gram), 1
    off = [Fraction(x) for x in offset]
    r = _lcm_den(off)
    return gi, s, [int(x * r) for x in off], r


def norms_upto(gram, bound, offset=None, inclusive: bool = True):
    """Exact histogram {norm: count} of (x+offset) G (x+offset)^T <= bound.

    gram: rational positive-definite matrix; offset: rational vector or None.
    Returns a dict mapping Fraction norms to integer counts (the zero vector
    is included when it lies in the coset).
    """
    hist: Counter = Counter()
    den = None

    def sink(norms_scaled: np.ndarray, _coords):
        hist.update(Counter(norms_scaled.tolist()))

    den = _enumerate(gram, bound, offset, inclusive, sink, want_coords=False)
    return {Fraction(int(k), den): v for k, v in hist.items()}


def vectors_upto(gram, bound, offset=None, inclusive: bool = True, limit: int | None = None):
    """Exact list of (coords, norm) with coords integer tuples (x, not x+offset)."""
    rows: list[tuple[tuple[int, ...], Fraction]] = []

    def sink(norms_scaled: np.ndarray, coords: np.ndarray):
        for v, ns in zip(coords, norms_scaled.tolist()):
            rows.append((tuple(int(c) for c in v), ns))
        if limit is not None and len(rows) > limit:
            raise OverflowError(f"enumeration exceeded limit {limit}")

    den = _enumerate(gram, bound, offset, inclusive, sink, want_coords=True)
    return [(c, Fraction(int(ns), den)) for c, ns in rows]


def _enumerate(gram, bound, offset, inclusive, sink, want_coords: bool) -> int:
    n = len(gram)
    gi, s, o_num, r = _scaled_ints(gram, offset)
    den = s * r * r
    bound = Fraction(bound)
    # exact threshold on scaled norms: ns <= bound*den (or strict)
    tnum = bound.numerator * den
    tden = bound.denominator
    gf = np.array([[float(x) for x in row] for row in gram], dtype=float)
    of = np.array([float(Fraction(x)) for x in (offset or [0] * n)], dtype=float)
    bf = float(bound) * (1 + 1e-9) + SLACK
    try:
        chol = np.linalg.cholesky(gf)
    except np.linalg.LinAlgError as exc:
        raise ValueError("gram matrix is not positive definite") from exc
    diag = np.array([chol[j, j] ** 2 for j in range(n)])
    # mu[i][j] = chol[i][j]/chol[j][j] for i > j (contribution of x_i to center at level j)
    mu = chol / chol.diagonal()[None, :]

    gi_np = np.array(gi, dtype=np.int64)
    onum_np = np.array(o_num, dtype=np.int64)

    def flush(coords: np.ndarray):
        if coords.shape[0] == 0:
            return
        y = r * coords.astype(np.int64) + onum_np[None, :]
        m1 = y @ gi_np
        ns = np.einsum("ij,ij->i", y, m1)
        keep = ns * tden <= tnum if inclusive else ns * tden < tnum
        ns = ns[keep]
        sink(ns, coords[keep] if want_coords else None)

    def expand(level: int, coords: np.ndarray, budget: np.ndarray):
        """coords: (k, n-1-level) int32 columns for x_{level+1..n-1}; budget left."""
        k = coords.shape[0]
        if k == 0:
            return
        if level < 0:
            flush(coords[:, ::-1])
            return
        # (C^T(x+o))_level / C[level,level] = x_level + o_level + sum_{i>level} mu[i,level] (x_i + o_i)
        base = of[level] + float(np.dot(mu[level + 1 :, level], of[level + 1 :]))
        if coords.shape[1]:
            center = base + coords.astype(float) @ mu[level + 1 :, level][::-1]
        else:
            center = np.full(k, base)
        radius = np.sqrt(np.maximum(budget, 0.0) / diag[level]) + SLACK
        lo = np.ceil(-center - radius).astype(np.int64)
        hi = np.floor(-center + radius).astype(np.int64)
        counts = np.maximum(hi - lo + 1, 0)
        total = int(counts.sum())
        if total == 0:
            return
        if total > CHUNK and k > 1:
            half = k // 2
            expand(level, coords[:half], budget[:half])
            expand(level, coords[half:], budget[half:])
            return
        idx = np.repeat(np.arange(k), counts)
        starts = np.repeat(lo, counts)
        within = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        vals = starts + within
        dev = vals.astype(float) + np.repeat(center, counts)
        new_budget = np.repeat(budget, counts) - diag[level] * dev * dev
        new_budget += SLACK  # keep boundary nodes alive for the exact filter
        new_coords = np.concatenate(
            [coords[idx], vals.astype(np.int32)[:, None]], axis=1
        )
        keep = new_budget >= -SLACK
        expand(level - 1, new_coords[keep], new_budget[keep])

    expand(n - 1, np.zeros((1, 0), dtype=np.int32), np.array([bf], dtype=float))
    return den


# -- exact reference (oracle) ---------------------------------------------------


def vectors_upto_exact(gram, bound, offset=None, inclusive: bool = True):
    """Pure-Fraction enumeration; exponentially slower, used to validate the
    fast path on small instances."""
    from ._linalg import ldl

    n = len(gram)
    g = [[Fraction(x) for x in row] for row in gram]
    off = [Fraction(x) for x in (offset or [0] * n)]
    l, d = ldl(g)
    bound = Fraction(bound)
    out = []
    coords = [0] * n

    def rec(level: int, remaining: Fraction):
        if level < 0:
            v = [coords[i] + off[i] for i in range(n)]
            norm = sum(v[i] * g[i][j] * v[j] for i in range(n) for j in range(n))
            if (norm <= bound) if inclusive else (norm < bound):
                out.append((tuple(coords), norm))
            return
        center = off[level] + sum(
            l[i][level] * (coords[i] + off[i]) for i in range(level + 1, n)
        )
        limit = remaining / d[level]  # d[level] (x + center)^2 <= remaining
        lo = int(floor(float(-center) - float(limit) ** 0.5)) - 2
        hi = int(ceil(float(-center) + float(limit) ** 0.5)) + 2
        for xv in range(lo, hi + 1):
            dev = xv + center
            used = d[level] * dev * dev
            if used <= remaining:
                coords[level] = xv
                rec(level - 1, remaining - used)
        coords[level] = 0

    rec(n - 1, bound)
    return out


def min_norm(gram, offset=None) -> Fraction:
    """Least nonzero norm of a lattice, or least norm over a proper coset."""
    in_lattice = offset is None or all(Fraction(x).denominator == 1 for x in offset)
    bound = max(min(Fraction(gram[i][i]) for i in range(len(gram))), Fraction(1))
    while True:
        hist = norms_upto(gram, bound, offset)
        candidates = [nm for nm in hist if nm > 0 or not in_lattice]
        if candidates:
            return min(candidates)
        bound *= 2
