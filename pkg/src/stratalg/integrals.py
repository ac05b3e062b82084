r"""Exact psi and kappa intersection numbers on Mbar_{g,n}.

``psi_integral`` evaluates the Witten correlator

    <tau_{a_1} ... tau_{a_n}>_g = int_{Mbar_{g,n}} psi_1^{a_1} ... psi_n^{a_n}

by the Virasoro (DVV) recursion over exact rationals.  Two independent code
paths are kept side by side: the bare recursion (``_dvv``) and a reduction
that applies the string and dilaton equations first and the genus-0 closed
form whenever possible (``_reduced``).  They are compared in the test suite;
the public function uses the reduced path.

``kappa_psi_integral`` converts kappa classes to psi classes at phantom
markings through the set-partition dictionary for the Arbarello--Cornalba
kappas (kappa_a = pushforward of psi^{a+1}).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import cache
from math import factorial


def double_factorial(k: int) -> int:
    """(2k+1)!! with the convention (-1)!! = 1."""
    out = 1
    for i in range(1, 2 * k + 2, 2):
        out *= i
    return out


def is_stable(g: int, n: int) -> bool:
    return 2 * g - 2 + n > 0


# ----------------------------------------------------------------------
# path 1: bare DVV recursion
# ----------------------------------------------------------------------


@cache
def _dvv(g: int, args: tuple[int, ...]) -> Fraction:
    n = len(args)
    if not is_stable(g, n) or any(a < 0 for a in args):
        return Fraction(0)
    if sum(args) != 3 * g - 3 + n:
        return Fraction(0)
    if g == 0 and n == 3:
        return Fraction(1)
    if g == 1 and n == 1:
        return Fraction(1, 24)
    # recurse on the largest exponent
    k = max(args)
    i0 = args.index(k)
    rest = args[:i0] + args[i0 + 1 :]
    dk = double_factorial(k)
    total = Fraction(0)
    for j, dj in enumerate(rest):
        if k + dj - 1 < 0:
            continue
        new = (k + dj - 1,) + rest[:j] + rest[j + 1 :]
        c = Fraction(double_factorial(k + dj - 1), double_factorial(dj - 1))
        total += c * _dvv(g, tuple(sorted(new, reverse=True)))
    for a in range(0, k - 1):
        b = k - 2 - a
        w = Fraction(double_factorial(a) * double_factorial(b), 2)
        # non-separating
        total += w * _dvv(g - 1, tuple(sorted((a, b) + rest, reverse=True)))
        # separating
        for g1 in range(0, g + 1):
            g2 = g - g1
            for r in range(len(rest) + 1):
                for I in itertools.combinations(range(len(rest)), r):
                    Iset = set(I)
                    pa = (a,) + tuple(rest[t] for t in I)
                    pb = (b,) + tuple(rest[t] for t in range(len(rest)) if t not in Iset)
                    if not is_stable(g1, len(pa)) or not is_stable(g2, len(pb)):
                        continue
                    total += (
                        w
                        * _dvv(g1, tuple(sorted(pa, reverse=True)))
                        * _dvv(g2, tuple(sorted(pb, reverse=True)))
                    )
    return total / dk


# ----------------------------------------------------------------------
# path 2: string/dilaton reduction with genus-0 closed form
# ----------------------------------------------------------------------


def genus0_closed_form(args: tuple[int, ...]) -> Fraction:
    """<tau_{a_1}...tau_{a_n}>_0 = (n-3)! / prod a_i!  (top degree only)."""
    n = len(args)
    if n < 3 or sum(args) != n - 3:
        return Fraction(0)
    denom = 1
    for a in args:
        denom *= factorial(a)
    return Fraction(factorial(n - 3), denom)


@cache
def _reduced(g: int, args: tuple[int, ...]) -> Fraction:
    n = len(args)
    if not is_stable(g, n) or any(a < 0 for a in args):
        return Fraction(0)
    if sum(args) != 3 * g - 3 + n:
        return Fraction(0)
    if g == 0:
        return genus0_closed_form(args)
    if g == 1 and n == 1:
        return Fraction(1, 24)
    if 0 in args and n > 1:
        # string equation
        i0 = args.index(0)
        rest = args[:i0] + args[i0 + 1 :]
        tot = Fraction(0)
        for j, a in enumerate(rest):
            if a >= 1:
                tot += _reduced(g, tuple(sorted(rest[:j] + (a - 1,) + rest[j + 1 :], reverse=True)))
        return tot
    if 1 in args and n > 1:
        # dilaton equation
        i0 = args.index(1)
        rest = args[:i0] + args[i0 + 1 :]
        return (2 * g - 2 + len(rest)) * _reduced(g, tuple(sorted(rest, reverse=True)))
    return _dvv(g, args)


def psi_integral(g: int, exponents, path: str = "reduced") -> Fraction:
    """Exact value of <tau_{a_1}...tau_{a_n}>_g; 0 off the top degree.

    ``path`` selects the evaluation route: "reduced" (string/dilaton fast
    paths plus the genus-0 closed form) or "dvv" (bare recursion).  The two
    agree; keeping both makes the independence verifiable.
    """
    args = tuple(int(a) for a in exponents)
    if not is_stable(g, len(args)):
        raise ValueError("unstable pair (%d, %d)" % (g, len(args)))
    if any(a < 0 for a in args):
        raise ValueError("negative psi exponent")
    key = tuple(sorted(args, reverse=True))
    if path == "reduced":
        return _reduced(g, key)
    if path == "dvv":
        return _dvv(g, key)
    raise ValueError("unknown path %r" % path)


# ----------------------------------------------------------------------
# mixed kappa-psi integrals
# ----------------------------------------------------------------------


def _set_partitions(items: list) -> list[list[list]]:
    if not items:
        return [[]]
    first, rest = items[0], items[1:]
    out = []
    for part in _set_partitions(rest):
        out.append([[first]] + [list(b) for b in part])
        for i in range(len(part)):
            blocks = [list(b) for b in part]
            blocks[i].append(first)
            out.append(blocks)
    return out


def kappa_psi_integral(g: int, n: int, psi, kappa=()) -> Fraction:
    """int_{Mbar_{g,n}} prod psi_i^{a_i} * prod kappa_{b_j}, exactly.

    The kappa monomial is translated to psi classes at phantom markings.
    One application of the projection formula trades the last kappa for a
    psi power while correcting the remaining kappas (pi^* kappa_b =
    kappa_b - psi_new^b); unrolling gives

        <prod tau_{a_i} prod_j kappa_{b_j}> =
            sum over set partitions P of the kappa indices of
            (-1)^{#kappas - #blocks} <prod tau_{a_i} prod_B tau_{1 + sum_B b}>.

    All b_j must be >= 1; kappa_0 is a scalar and is rewritten away upstream.
    Sanity anchors: kappa_1^3 on Mbar_{0,6} integrates to 61 and on Mbar_2
    to 43/2880.
    """
    psi = tuple(int(a) for a in psi)
    if len(psi) != n:
        raise ValueError("need one psi exponent per marking")
    kappa = tuple(int(b) for b in kappa)
    if any(b < 1 for b in kappa):
        raise ValueError("kappa indices must be >= 1 (kappa_0 is a scalar)")
    if not kappa:
        return psi_integral(g, psi)
    m = len(kappa)
    total = Fraction(0)
    for part in _set_partitions(list(range(m))):
        coeff = (-1) ** (m - len(part))
        extra = [1 + sum(kappa[j] for j in block) for block in part]
        total += coeff * psi_integral(g, psi + tuple(extra))
    return total


def kappa_psi_integral_recursive(g: int, n: int, psi, kappa=()) -> Fraction:
    """Single-step projection-formula recursion; oracle for the closed form."""
    psi = tuple(int(a) for a in psi)
    kappa = tuple(int(b) for b in kappa)
    if not kappa:
        return psi_integral(g, psi)
    *rest, b = kappa
    total = Fraction(0)
    for r in range(len(rest) + 1):
        for T in itertools.combinations(range(len(rest)), r):
            Ts = set(T)
            kept = tuple(rest[j] for j in range(len(rest)) if j not in Ts)
            merged = b + sum(rest[j] for j in T) + 1
            total += (-1) ** r * kappa_psi_integral_recursive(
                g, n + 1, psi + (merged,), kept
            )
    return total
