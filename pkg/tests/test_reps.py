import math
from fractions import Fraction

import pytest

from stratalg.reps import (
    SnRepSum,
    class_size,
    conjugate,
    dim_specht,
    hook,
    induce,
    induce_by_characters,
    mn_character,
    partitions,
    restrict,
    sgn_partition,
    triv_partition,
)


def test_dim_trivial_and_sign():
    for n in range(1, 10):
        assert dim_specht((n,)) == 1
        assert dim_specht((1,) * n) == 1


def test_dim_paper_values():
    assert dim_specht((2,) + (1,) * 10) == 11
    assert dim_specht((3,) + (1,) * 9) == 55


def test_dim_hooks_are_binomials():
    for n in range(2, 14):
        for k in range(1, n + 1):
            assert dim_specht(hook(n - k + 1, k - 1)) == math.comb(n - 1, k - 1)


def test_dim_squares_sum_to_factorial():
    for n in range(1, 8):
        assert sum(dim_specht(lam) ** 2 for lam in partitions(n)) == math.factorial(n)


def test_conjugate():
    assert conjugate((3, 2)) == (2, 2, 1)
    assert conjugate((4,)) == (1, 1, 1, 1)


def test_invalid_partition():
    with pytest.raises(ValueError):
        dim_specht((1, 2))


# ----------------------------------------------------------------------
# induction
# ----------------------------------------------------------------------


def test_resu_identity():
    # Ind_{S_{k-1} x S_{n-k}}^{S_{n-1}} (sgn x 1) = V_{n-k+1,1^{k-2}} + V_{n-k,1^{k-1}}
    for n in range(4, 17):
        for k in range(4, n + 1):
            got = induce(sgn_partition(k - 1), triv_partition(n - k))
            want = SnRepSum(n - 1, {hook(n - k + 1, k - 2): 1, hook(n - k, k - 1): 1})
            assert got == want, (n, k)


def test_mij_action_dimension_66():
    got = induce(triv_partition(2), sgn_partition(10))
    want = SnRepSum(12, {(2,) + (1,) * 10: 1, (3,) + (1,) * 9: 1})
    assert got == want
    assert got.dim() == 66 == math.comb(12, 2)


def test_pieri_two_rows():
    got = induce(triv_partition(3), triv_partition(4))
    assert got == SnRepSum(7, {(7,): 1, (6, 1): 1, (5, 2): 1, (4, 3): 1})
    assert all(m == 1 for m in got.mult.values())


def test_induce_dimension_multiplicativity():
    for mu, nu in [((2, 1), (2, 1)), ((3, 1), (2,)), ((2, 2), (1, 1, 1))]:
        s = induce(mu, nu)
        a, b = sum(mu), sum(nu)
        assert s.dim() == dim_specht(mu) * dim_specht(nu) * math.comb(a + b, a)


# ----------------------------------------------------------------------
# restriction
# ----------------------------------------------------------------------


def test_restrict_trivial():
    assert restrict((6,)) == SnRepSum(5, {(5,): 1})


def test_restrict_hook_identity():
    # V_{n-k+1,1^{k-1}} restricts to the (resu) right-hand side
    for n in range(5, 14):
        for k in range(4, n):
            got = restrict(hook(n - k + 1, k - 1))
            want = SnRepSum(n - 1, {hook(n - k + 1, k - 2): 1, hook(n - k, k - 1): 1})
            assert got == want


def test_restrict_22():
    assert restrict((2, 2)) == SnRepSum(3, {(2, 1): 1})


# ----------------------------------------------------------------------
# character oracle
# ----------------------------------------------------------------------


def test_character_basics():
    # chi^lambda(1^n) = dim
    for n in range(1, 8):
        for lam in partitions(n):
            assert mn_character(lam, (1,) * n) == dim_specht(lam)


def test_character_orthogonality():
    for n in range(2, 7):
        lams = list(partitions(n))
        for a in lams:
            for b in lams:
                s = sum(
                    class_size(rho) * mn_character(a, rho) * mn_character(b, rho)
                    for rho in lams
                )
                assert s == (math.factorial(n) if a == b else 0)


def test_lr_matches_character_induction():
    cases = [
        ((2, 1), (2,)),
        ((1, 1), (2, 1)),
        ((3,), (2, 2)),
        ((2, 1, 1), (1, 1)),
        ((2, 2), (2, 1)),
        ((3, 1), (3, 1)),
    ]
    for mu, nu in cases:
        assert induce(mu, nu) == induce_by_characters(mu, nu)


def test_frobenius_reciprocity_brute_force():
    # multiplicity of target in Ind(lam x nu) equals the character inner
    # product of the restriction with lam x nu, for all n <= 8 splittings
    for n in range(2, 9):
        for a in range(1, n):
            b = n - a
            for lam in partitions(a):
                for nu in partitions(b):
                    ind = induce(lam, nu)
                    for target, mult in ind.mult.items():
                        tot = Fraction(0)
                        for ra in partitions(a):
                            for rb in partitions(b):
                                rho = tuple(sorted(ra + rb, reverse=True))
                                tot += (
                                    Fraction(class_size(ra) * class_size(rb))
                                    * mn_character(lam, ra)
                                    * mn_character(nu, rb)
                                    * mn_character(target, rho)
                                )
                        tot /= math.factorial(a) * math.factorial(b)
                        assert tot == mult
