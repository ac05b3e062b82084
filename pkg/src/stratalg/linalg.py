r"""Exact rank computations for pairing matrices.

Two routes, used to certify each other:

- fraction-free Bareiss elimination over the integers (after clearing row
  denominators), the confirmation path for matrices under ~200x200;
- row elimination modulo several word-sized primes (> 2^30, so products fit
  in int64) with agreement across the primes as the certificate.

Ranks over Q of a matrix with entries p/q equal ranks mod ell for all primes
ell away from a finite bad set; agreement across independent primes plus the
Bareiss confirmation on small instances is the standard multimodular
certificate.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np

# primes just under 2^31: products of two residues stay below 2^62 < int64 max
DEFAULT_PRIMES = (2147483647, 2147483629, 2147483587)


def clear_denominators(rows: list[list[Fraction]]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators (rank is unchanged)."""
    out = []
    for row in rows:
        ell = 1
        for x in row:
            q = Fraction(x).denominator
            ell = ell * q // gcd(ell, q)
        out.append([int(Fraction(x) * ell) for x in row])
    return out


def rank_bareiss(rows) -> int:
    """Fraction-free Gaussian elimination over Z; exact, no modular reduction."""
    m = [list(r) for r in clear_denominators([[Fraction(x) for x in row] for row in rows])]
    if not m or not m[0]:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank = 0
    prev = 1
    row = 0
    for col in range(ncols):
        piv = None
        for r in range(row, nrows):
            if m[r][col]:
                piv = r
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        for r in range(row + 1, nrows):
            for c in range(col + 1, ncols):
                m[r][c] = (m[row][col] * m[r][c] - m[r][col] * m[row][c]) // prev
            m[r][col] = 0
        prev = m[row][col]
        rank += 1
        row += 1
        if row == nrows:
            break
    return rank


def rank_mod_p(mat: np.ndarray, p: int) -> int:
    """Row echelon rank of an int64 matrix modulo p (p < 2^31)."""
    m = np.array(mat, dtype=np.int64) % p
    nrows, ncols = m.shape
    rank = 0
    row = 0
    for col in range(ncols):
        piv = None
        for r in range(row, nrows):
            if m[r, col]:
                piv = r
                break
        if piv is None:
            continue
        if piv != row:
            m[[row, piv]] = m[[piv, row]]
        inv = pow(int(m[row, col]), p - 2, p)
        m[row] = (m[row] * inv) % p
        block = m[row + 1 :, col]
        nz = np.nonzero(block)[0]
        if nz.size:
            rows_idx = nz + row + 1
            factors = m[rows_idx, col][:, None]
            m[rows_idx] = (m[rows_idx] - factors * m[row][None, :]) % p
        rank += 1
        row += 1
        if row == nrows:
            break
    return rank


def rank_modular(rows, primes=DEFAULT_PRIMES) -> int:
    """Rank via elimination modulo several primes; all must agree."""
    if len(primes) < 3 or len(set(primes)) != len(primes) or min(primes) <= 2**30:
        raise ValueError("need at least 3 distinct primes, each > 2^30")
    cleared = clear_denominators([[Fraction(x) for x in row] for row in rows])
    if not cleared or not cleared[0]:
        return 0
    ranks = []
    for p in primes:
        red = np.array([[x % p for x in row] for row in cleared], dtype=np.int64)
        ranks.append(rank_mod_p(red, p))
    if len(set(ranks)) != 1:
        raise ArithmeticError("modular ranks disagree across primes: %r" % (ranks,))
    return ranks[0]


def rank(rows, primes=DEFAULT_PRIMES) -> int:
    """Exact rank over Q.

    Modular elimination with cross-prime agreement; confirmed by the
    fraction-free path whenever the matrix is small enough for it.
    """
    rows = [list(r) for r in rows]
    if not rows or not rows[0]:
        return 0
    r = rank_modular(rows, primes)
    if len(rows) <= 200 and len(rows[0]) <= 200:
        rb = rank_bareiss(rows)
        if rb != r:
            raise ArithmeticError(
                "modular rank %d disagrees with fraction-free rank %d" % (r, rb)
            )
    return r


def kernel_basis(rows) -> list[list[Fraction]]:
    """Basis of the rational left-null-space-independent kernel (Ax = 0).

    Plain fraction Gauss-Jordan; intended for small matrices (relation
    extraction), not the big rank jobs.
    """
    m = [[Fraction(x) for x in row] for row in rows]
    if not m:
        return []
    nrows, ncols = len(m), len(m[0])
    pivots = []
    row = 0
    for col in range(ncols):
        piv = None
        for r in range(row, nrows):
            if m[r][col]:
                piv = r
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = m[row][col]
        m[row] = [x / inv for x in m[row]]
        for r in range(nrows):
            if r != row and m[r][col]:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[row])]
        pivots.append(col)
        row += 1
        if row == nrows:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][fc]
        basis.append(v)
    return basis


def rank_modular_sparse(rows, primes=DEFAULT_PRIMES) -> int:
    """Rank of a sparse matrix given as dicts {col: Fraction}; elimination
    per prime with agreement, tuned for the near-block-diagonal pairing
    matrices."""
    if len(primes) < 3 or len(set(primes)) != len(primes) or min(primes) <= 2**30:
        raise ValueError("need at least 3 distinct primes, each > 2^30")
    ranks = []
    for p in primes:
        work = []
        for r in rows:
            rr = {}
            for c, v in r.items():
                f = Fraction(v)
                val = f.numerator * pow(f.denominator, p - 2, p) % p
                if val:
                    rr[c] = val
            if rr:
                work.append(rr)
        pivots = {}  # col -> normalized row
        rank = 0
        for rr in work:
            rr = dict(rr)
            while rr:
                c = min(rr)
                if c in pivots:
                    f = rr[c]
                    prow = pivots[c]
                    for cc, vv in prow.items():
                        nv = (rr.get(cc, 0) - f * vv) % p
                        if nv:
                            rr[cc] = nv
                        elif cc in rr:
                            del rr[cc]
                else:
                    inv = pow(rr[c], p - 2, p)
                    pivots[c] = {cc: (vv * inv) % p for cc, vv in rr.items()}
                    rank += 1
                    break
        ranks.append(rank)
    if len(set(ranks)) != 1:
        raise ArithmeticError("modular ranks disagree: %r" % (ranks,))
    return ranks[0]
