r"""Inductive bookkeeping: filling-criterion condition sets, base-case
regions with named vanishing reasons, Betti vanishing bounds, the
Chow--Kunneth lookup table, cusp form dimensions, genus-1 pure-weight
multiplicities, and formal motive polynomials.

Nothing here computes cohomology; it tracks exactly the combinatorial
conditions the inductive arguments consume.
"""

from __future__ import annotations

import enum
from math import comb


def d_dim(g: int, n: int) -> int:
    """dim Mbar_{g,n} = 3g - 3 + n."""
    return 3 * g - 3 + n


def precedes(gp: int, np_: int, g: int, n: int) -> bool:
    """(g', n') < (g, n): the boundary-stratum partial order."""
    return gp <= g and 2 * gp + np_ <= 2 * g + n and (gp, np_) != (g, n)


def filling_conditions(g: int, n: int, k: int) -> list[tuple[int, int, int]]:
    """All (g', n', k') whose surjectivity feeds the filling criterion for
    H^k(Mbar_{g,n}), the head triple (g, n, k) included.

    Condition set: (g', n') < (g, n), 2 d_{g',n'} - k' <= 2 d_{g,n} - k and
    k' <= k - 2, intersected with stability and k' >= 0.
    """
    if 2 * g - 2 + n <= 0:
        raise ValueError("unstable pair")
    out = [(g, n, k)]
    bound = 2 * d_dim(g, n) - k
    for gp in range(0, g + 1):
        for np_ in range(0, 2 * g + n - 2 * gp + 1):
            if 2 * gp - 2 + np_ <= 0:
                continue
            if not precedes(gp, np_, g, n):
                continue
            for kp in range(0, k - 1):
                if kp <= k - 2 and 2 * d_dim(gp, np_) - kp <= bound:
                    out.append((gp, np_, kp))
    return out


class VanishingReason(enum.Enum):
    """Why a triple outside the base-case region needs no new generators."""

    MANY_MARKINGS = "n' > k': pure weight k' cohomology is pulled back"
    ABOVE_VCD = "k' > 4g'-4+n': above the virtual cohomological dimension"
    STABLE_RANGE = "k' <= (2g'-2)/3: stable range, tautological"


def in_basecase_region(gp: int, np_: int, kp: int, k: int) -> bool:
    return (
        kp <= k
        and 2 * gp < 3 * kp + 2
        and np_ <= kp
        and 4 * gp - 4 + np_ >= kp
    )


def vanishing_reasons(gp: int, np_: int, kp: int) -> list[VanishingReason]:
    """The reasons excluding (g', n', k') from the generating set."""
    out = []
    if np_ > kp:
        out.append(VanishingReason.MANY_MARKINGS)
    if kp > 4 * gp - 4 + np_:
        out.append(VanishingReason.ABOVE_VCD)
    if 3 * kp <= 2 * gp - 2:
        out.append(VanishingReason.STABLE_RANGE)
    return out


def basecase_region(k: int) -> set[tuple[int, int, int]]:
    """The finite generating region for degree-k cohomology:

        k' <= k,  g' < (3/2) k' + 1,  n' <= k',  4g' - 4 + n' >= k'.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = set()
    for kp in range(0, k + 1):
        gmax = (3 * kp + 1) // 2
        for gp in range(0, gmax + 1):
            if not 2 * gp < 3 * kp + 2:
                continue
            for np_ in range(0, kp + 1):
                if 4 * gp - 4 + np_ >= kp:
                    out.add((gp, np_, kp))
    return out


def bfp_vanishing(g: int, n: int, k: int) -> bool:
    """Betti vanishing below the stability threshold:
    H_k(M_{g,n}) = 0 when k < 2g (n <= 1) or k < 2g-2+n (n >= 2)."""
    if g == 0:
        raise ValueError("genus 0 is handled separately: all cohomology tautological")
    if n <= 1:
        return k < 2 * g
    return k < 2 * g - 2 + n


class Known(enum.Enum):
    YES = "yes"
    UNKNOWN = "unknown"


CKGP_TABLE = {0: None, 1: 10, 2: 10, 3: 11, 4: 11, 5: 7, 6: 5, 7: 3}


def ckgp_known(g: int, n: int) -> Known:
    """Does M_{g,n} have the CKgP with tautological Chow ring, per the
    published table?  c(0) is unbounded; beyond the table the answer is
    open, never 'no'."""
    if g > 7:
        return Known.UNKNOWN
    c = CKGP_TABLE[g]
    if c is None or n <= c:
        return Known.YES
    return Known.UNKNOWN


def cuspform_dim(m: int) -> int:
    """dim S_m, cusp forms of weight m for the full modular group.

    Closed form with the m = 2 (mod 12) correction; the test suite checks it
    against counting monomials E4^a E6^b of weight m - 12.
    """
    if m % 2 or m < 0:
        return 0
    if m < 12:
        return 0
    if m % 12 == 2:
        return m // 12 - 1
    return m // 12


def cuspform_dim_oracle(m: int) -> int:
    """dim S_m by brute force: S_m = Delta * M_{m-12} and M_w has a basis of
    monomials E4^a E6^b with 4a + 6b = w."""
    if m % 2 or m < 12:
        return 0
    w = m - 12
    return sum(1 for a in range(w // 4 + 1) for b in range(w // 6 + 1) if 4 * a + 6 * b == w)


def genus1_pure_multiplicity(k: int, n: int) -> int:
    """Number of copies of the weight-k cusp form motive in W_k H^k(M_{1,n}):
    binom(n-1, k-1) when n >= k and S_{k+1} is nonzero, else 0."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < k:
        return 0
    if cuspform_dim(k + 1) == 0:
        return 0
    return comb(n - 1, k - 1)


def genus2_odd_weight_filling_quotient(n: int) -> int:
    """Dimension of the genus-2 filling quotient contribution for odd n.

    The hyperelliptic involution acts on weight-n local systems by (-1)^n,
    so for odd n the quotient W_k H^k(M_{2,n}) / (Phi + Psi) vanishes.  This
    is a dimension claim only; no cohomology is computed.
    """
    if n % 2 == 1:
        return 0
    raise ValueError("only the odd-n vanishing is encoded")


# ----------------------------------------------------------------------
# motive polynomials
# ----------------------------------------------------------------------


UNIT = "1"
S12 = "S12"
S16 = "S16"
_SYMBOLS = (UNIT, S12, S16)


class MotivePoly:
    """Formal nonnegative combination of L^a, L^a S12, L^a S16."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict[tuple[int, str], int] = {}
        for (a, sym), m in (terms or {}).items():
            if sym not in _SYMBOLS:
                raise ValueError("unknown symbol %r" % sym)
            if a < 0 or m < 0:
                raise ValueError("negative twist or multiplicity")
            if m:
                self.terms[(a, sym)] = self.terms.get((a, sym), 0) + m

    @staticmethod
    def lefschetz(a: int = 1, mult: int = 1) -> "MotivePoly":
        return MotivePoly({(a, UNIT): mult})

    @staticmethod
    def cusp(sym: str, twist: int = 0, mult: int = 1) -> "MotivePoly":
        return MotivePoly({(twist, sym): mult})

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return MotivePoly(out)

    def tensor_L(self, e: int) -> "MotivePoly":
        """Tate twist: gluing along e edges multiplies by L^e."""
        return MotivePoly({(a + e, sym): m for (a, sym), m in self.terms.items()})

    def is_multiple_of(self, twist: int, sym: str) -> bool:
        """Does every term equal L^twist * sym?"""
        return all(k == (twist, sym) for k in self.terms)

    def __eq__(self, other):
        return isinstance(other, MotivePoly) and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for (a, sym), m in sorted(self.terms.items()):
            base = ("L^%d" % a if a != 1 else "L") if a else ""
            tail = sym if sym != UNIT else ("1" if not base else "")
            s = "*".join(x for x in (base, tail) if x)
            bits.append(("%d*" % m if m != 1 else "") + (s or "1"))
        return " + ".join(bits)


def motive_shape(g: int, n: int, k: int) -> MotivePoly | None:
    """The semisimplification shape of H^k(Mbar_{g,n}) where the published
    classification pins it down; None when it does not.

    Degrees 13 and 15 (g >= 2) and their Poincare duals, and even k <= 14.
    Multiplicities are not computed (the Getzler--Kapranov counts are inputs,
    not outputs); the returned polynomial is the shape with multiplicity 1.
    """
    d = d_dim(g, n)
    if k % 2 == 0 and k <= 14:
        return MotivePoly.lefschetz(k // 2)
    if k == 13:
        return MotivePoly.cusp(S12, twist=1)
    if k == 15 and g >= 2:
        return MotivePoly.cusp(S12, twist=2)
    if k == 15 and g == 1:
        return MotivePoly.cusp(S12, twist=2) + MotivePoly.cusp(S16, twist=0)
    if k == 2 * d - 13:
        return MotivePoly.cusp(S12, twist=d - 12)
    if k == 2 * d - 15:
        return MotivePoly.cusp(S12, twist=d - 13) + MotivePoly.cusp(S16, twist=d - 15)
    return None
