r"""Exact symmetric group representation arithmetic.

Partitions label Specht modules; dimensions come from the hook length
formula, induction products from the Littlewood--Richardson rule (with the
Pieri shortcut as a special case of the general rule), restriction from the
branching rule.  A Murnaghan--Nakayama character table doubles as an
independent oracle for small n.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import cache
from math import factorial


Partition = tuple  # weakly decreasing tuple of positive integers


def check_partition(lam) -> Partition:
    lam = tuple(int(x) for x in lam if x)
    if any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)):
        raise ValueError("parts must be weakly decreasing")
    if any(x < 0 for x in lam):
        raise ValueError("parts must be positive")
    return lam


def partitions(n: int):
    """All partitions of n, lexicographically decreasing."""
    if n == 0:
        yield ()
        return

    def rec(left, biggest):
        if left == 0:
            yield ()
            return
        for first in range(min(left, biggest), 0, -1):
            for rest in rec(left - first, first):
                yield (first,) + rest

    yield from rec(n, n)


def conjugate(lam: Partition) -> Partition:
    lam = check_partition(lam)
    if not lam:
        return ()
    return tuple(sum(1 for p in lam if p > i) for i in range(lam[0]))


def hook_lengths(lam: Partition) -> list[list[int]]:
    lam = check_partition(lam)
    conj = conjugate(lam)
    return [
        [lam[i] - j + conj[j] - i - 1 for j in range(lam[i])] for i in range(len(lam))
    ]


def dim_specht(lam) -> int:
    """Hook length formula dimension of the Specht module V_lambda."""
    lam = check_partition(lam)
    n = sum(lam)
    prod = 1
    for row in hook_lengths(lam):
        for h in row:
            prod *= h
    return factorial(n) // prod


def hook(a: int, b: int) -> Partition:
    """The hook shape (a, 1^b)."""
    return check_partition((a,) + (1,) * b)


class SnRepSum:
    """Multiset of partitions of one n with nonnegative multiplicities."""

    __slots__ = ("n", "mult")

    def __init__(self, n: int, mult=None):
        self.n = n
        self.mult: dict[Partition, int] = {}
        for lam, m in (mult or {}).items():
            lam = check_partition(lam)
            if sum(lam) != n:
                raise ValueError("partition of wrong size")
            if m:
                self.mult[lam] = self.mult.get(lam, 0) + m
        self.mult = {k: v for k, v in self.mult.items() if v}

    def __add__(self, other):
        if self.n != other.n:
            raise ValueError("size mismatch")
        out = dict(self.mult)
        for k, v in other.mult.items():
            out[k] = out.get(k, 0) + v
        return SnRepSum(self.n, out)

    def dim(self) -> int:
        return sum(m * dim_specht(lam) for lam, m in self.mult.items())

    def __eq__(self, other):
        return isinstance(other, SnRepSum) and self.n == other.n and self.mult == other.mult

    def __repr__(self):
        inner = " + ".join(
            ("%d*" % m if m != 1 else "") + repr(list(lam))
            for lam, m in sorted(self.mult.items(), reverse=True)
        )
        return "SnRepSum(%s)" % (inner or "0")

    def items(self):
        return sorted(self.mult.items(), reverse=True)


# ----------------------------------------------------------------------
# Littlewood--Richardson rule
# ----------------------------------------------------------------------


def _lr_fillings(lam, mu, nu) -> int:
    """Number of LR skew tableaux of shape lam/mu and content nu."""
    lam, mu, nu = list(lam), list(mu), list(nu)
    rows = len(lam)
    mu = mu + [0] * (rows - len(mu))
    if any(mu[i] > lam[i] for i in range(rows)):
        return 0

    # fill in reverse reading order (right-to-left within each row, top to
    # bottom); entries in 1..len(nu).  In this order the lattice-word
    # condition is a simple running prefix check.
    cells = [(i, j) for i in range(rows) for j in range(lam[i] - 1, mu[i] - 1, -1)]
    count = 0

    def rec(idx, grid, content, word_counts):
        nonlocal count
        if idx == len(cells):
            count += 1
            return
        i, j = cells[idx]
        for v in range(1, len(nu) + 1):
            if content[v - 1] >= nu[v - 1]:
                continue
            # rows weakly increase left to right: compare the right neighbor
            if (i, j + 1) in grid and grid[(i, j + 1)] < v:
                continue
            # columns strictly increase top to bottom
            if (i - 1, j) in grid and grid[(i - 1, j)] >= v:
                continue
            # lattice: after placing, every prefix has #v <= #(v-1)
            if v > 1 and word_counts[v - 1] >= word_counts[v - 2]:
                continue
            grid[(i, j)] = v
            content[v - 1] += 1
            word_counts[v - 1] += 1
            rec(idx + 1, grid, content, word_counts)
            del grid[(i, j)]
            content[v - 1] -= 1
            word_counts[v - 1] -= 1

    rec(0, {}, [0] * len(nu), [0] * len(nu))
    return count


@cache
def lr_coefficient(lam: Partition, mu: Partition, nu: Partition) -> int:
    """c^lam_{mu,nu}: multiplicity of V_lam in the induction of mu x nu."""
    if sum(mu) + sum(nu) != sum(lam):
        return 0
    return _lr_fillings(lam, mu, nu)


def induce(mu, nu) -> SnRepSum:
    """Ind_{S_a x S_b}^{S_{a+b}} (V_mu boxtimes V_nu), expanded by LR."""
    mu, nu = check_partition(mu), check_partition(nu)
    n = sum(mu) + sum(nu)
    out = {}
    for lam in partitions(n):
        c = lr_coefficient(lam, mu, nu)
        if c:
            out[lam] = c
    return SnRepSum(n, out)


def induce_sum(x: SnRepSum, y: SnRepSum) -> SnRepSum:
    out = SnRepSum(x.n + y.n)
    for lam, a in x.mult.items():
        for mu, b in y.mult.items():
            s = induce(lam, mu)
            out = out + SnRepSum(out.n, {k: a * b * v for k, v in s.mult.items()})
    return out


def restrict(lam) -> SnRepSum:
    """Branching rule: remove one box in every admissible way."""
    lam = check_partition(lam)
    n = sum(lam)
    if n == 0:
        raise ValueError("cannot restrict the empty partition")
    out = {}
    for i in range(len(lam)):
        if i == len(lam) - 1 or lam[i] > lam[i + 1]:
            child = lam[:i] + ((lam[i] - 1,) if lam[i] > 1 else ()) + lam[i + 1 :]
            out[child] = out.get(child, 0) + 1
    return SnRepSum(n - 1, out)


def restrict_sum(x: SnRepSum) -> SnRepSum:
    out = SnRepSum(x.n - 1)
    for lam, m in x.mult.items():
        r = restrict(lam)
        out = out + SnRepSum(out.n, {k: m * v for k, v in r.mult.items()})
    return out


# ----------------------------------------------------------------------
# character-table oracle (Murnaghan--Nakayama), for n <= 8
# ----------------------------------------------------------------------


@cache
def mn_character(lam: Partition, rho: Partition) -> int:
    """chi^lambda(rho) by the Murnaghan--Nakayama rule."""
    if not rho:
        return 1
    k = rho[0]
    rest = rho[1:]
    total = 0
    for (new, height) in _border_strips(lam, k):
        total += (-1) ** height * mn_character(new, rest)
    return total


def _border_strips(lam: Partition, k: int):
    """All removals of a k-cell border strip, via beta numbers (abacus moves):
    subtract k from one first-column hook length, provided the result is new
    and nonnegative; the strip height counts the beads jumped over."""
    l = len(lam)
    beta = [lam[i] + (l - 1 - i) for i in range(l)]
    bset = set(beta)
    out = []
    for i, b in enumerate(beta):
        nb = b - k
        if nb < 0 or nb in bset:
            continue
        newbeta = sorted([x for j, x in enumerate(beta) if j != i] + [nb], reverse=True)
        height = sum(1 for x in beta if nb < x < b)
        L = len(newbeta)
        shape = tuple(newbeta[j] - (L - 1 - j) for j in range(L))
        out.append((tuple(x for x in shape if x > 0), height))
    return out


def character_table(n: int):
    """{(lam, rho): chi^lam(rho)} over all partitions; oracle for n <= 8."""
    lams = list(partitions(n))
    return {(lam, rho): mn_character(lam, rho) for lam in lams for rho in lams}


def class_size(rho: Partition) -> int:
    n = sum(rho)
    prod = 1
    counts = {}
    for p in rho:
        prod *= p
        counts[p] = counts.get(p, 0) + 1
    for c in counts.values():
        prod *= factorial(c)
    return factorial(n) // prod


def induce_by_characters(mu: Partition, nu: Partition) -> SnRepSum:
    """Frobenius-formula induction; independent oracle for small n."""
    a, b = sum(mu), sum(nu)
    n = a + b
    out = {}
    for lam in partitions(n):
        total = Fraction(0)
        for ra in partitions(a):
            for rb in partitions(b):
                rho = tuple(sorted(ra + rb, reverse=True))
                total += (
                    Fraction(class_size(ra) * class_size(rb), factorial(a) * factorial(b))
                    * mn_character(mu, ra)
                    * mn_character(nu, rb)
                    * mn_character(lam, rho)
                )
        if total:
            assert total.denominator == 1
            out[lam] = int(total)
    return SnRepSum(n, out)


def sgn_partition(n: int) -> Partition:
    return (1,) * n


def triv_partition(n: int) -> Partition:
    return (n,) if n else ()
