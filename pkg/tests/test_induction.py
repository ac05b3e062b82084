import pytest

from stratalg.induction import (
    Known,
    MotivePoly,
    S12,
    S16,
    UNIT,
    basecase_region,
    bfp_vanishing,
    ckgp_known,
    cuspform_dim,
    cuspform_dim_oracle,
    filling_conditions,
    genus1_pure_multiplicity,
    genus2_odd_weight_filling_quotient,
    in_basecase_region,
    motive_shape,
    vanishing_reasons,
)


# ----------------------------------------------------------------------
# filling conditions
# ----------------------------------------------------------------------


def test_filling_conditions_head_and_k_bound():
    out = filling_conditions(0, 4, 2)
    assert (0, 4, 2) in out
    assert all(kp == 0 for (gp, np_, kp) in out if (gp, np_, kp) != (0, 4, 2))


def test_filling_conditions_112_contains_030():
    assert (0, 3, 0) in filling_conditions(1, 1, 2)


def test_filling_conditions_excludes_self_in_tail():
    out = filling_conditions(1, 2, 4)
    assert out.count((1, 2, 4)) == 1  # only as the head
    assert all((gp, np_) != (1, 2) for (gp, np_, kp) in out[1:])


def test_filling_conditions_unstable():
    with pytest.raises(ValueError):
        filling_conditions(0, 2, 2)


# ----------------------------------------------------------------------
# base-case region
# ----------------------------------------------------------------------


def test_region_k4_band():
    reg = basecase_region(4)
    gs = {gp for (gp, np_, kp) in reg}
    ns = {np_ for (gp, np_, kp) in reg}
    assert max(gs) < 7 and max(ns) <= 4
    # g' = 7 would need k' >= 4 + ...: check g'=7 is genuinely excluded
    assert not any(gp == 7 for (gp, np_, kp) in reg)


def test_region_k17_contains_purple_dots():
    reg = basecase_region(17)
    assert any((gp, np_) == (1, 17) for (gp, np_, kp) in reg)
    assert any((gp, np_) == (2, 14) for (gp, np_, kp) in reg)


def test_region_k0():
    reg = basecase_region(0)
    assert all(kp == 0 for (_, _, kp) in reg)
    assert all(4 * gp - 4 + np_ >= 0 for (gp, np_, kp) in reg)


def test_region_monotone_in_k():
    for k in range(0, 21):
        assert basecase_region(k) <= basecase_region(k + 1)


def test_every_excluded_triple_has_a_reason():
    # over the finite window required by the properties section
    for gp in range(0, 31):
        for np_ in range(0, 31):
            for kp in range(0, 21):
                if not in_basecase_region(gp, np_, kp, 20):
                    assert vanishing_reasons(gp, np_, kp), (gp, np_, kp)


def test_reasons_are_empty_inside_the_region():
    for (gp, np_, kp) in basecase_region(6):
        assert not vanishing_reasons(gp, np_, kp)


# ----------------------------------------------------------------------
# Betti vanishing
# ----------------------------------------------------------------------


def test_bfp_vanishing_examples():
    assert bfp_vanishing(3, 0, 5) is True
    assert bfp_vanishing(1, 11, 11) is False
    assert bfp_vanishing(2, 5, 6) is True
    assert bfp_vanishing(2, 5, 7) is False


def test_bfp_vanishing_genus0_errors():
    with pytest.raises(ValueError):
        bfp_vanishing(0, 5, 2)


# ----------------------------------------------------------------------
# CKgP lookup
# ----------------------------------------------------------------------


def test_ckgp_table():
    assert ckgp_known(7, 3) is Known.YES
    assert ckgp_known(7, 4) is Known.UNKNOWN
    assert ckgp_known(0, 100) is Known.YES
    assert ckgp_known(5, 8) is Known.UNKNOWN
    assert ckgp_known(9, 0) is Known.UNKNOWN


# ----------------------------------------------------------------------
# cusp forms
# ----------------------------------------------------------------------


def test_cuspform_dims():
    assert cuspform_dim(12) == 1
    assert cuspform_dim(14) == 0
    assert cuspform_dim(16) == 1
    assert cuspform_dim(26) == 1
    assert cuspform_dim(11) == 0
    assert cuspform_dim(0) == 0


def test_cuspform_matches_monomial_oracle():
    for m in range(0, 101, 2):
        assert cuspform_dim(m) == cuspform_dim_oracle(m)


# ----------------------------------------------------------------------
# genus 1 multiplicities
# ----------------------------------------------------------------------


def test_genus1_pure_multiplicity():
    assert genus1_pure_multiplicity(11, 11) == 1
    assert genus1_pure_multiplicity(11, 12) == 11
    assert all(genus1_pure_multiplicity(13, n) == 0 for n in range(1, 30))


def test_genus1_zero_iff():
    from math import comb

    for k in range(1, 16):
        for n in range(1, 21):
            v = genus1_pure_multiplicity(k, n)
            if n < k or cuspform_dim(k + 1) == 0:
                assert v == 0
            else:
                assert v == comb(n - 1, k - 1) > 0


def test_genus2_odd_parity_rule():
    assert genus2_odd_weight_filling_quotient(7) == 0
    with pytest.raises(ValueError):
        genus2_odd_weight_filling_quotient(4)


# ----------------------------------------------------------------------
# motive polynomials
# ----------------------------------------------------------------------


def test_tensor_L():
    m = MotivePoly.cusp(S12)
    assert m.tensor_L(1) == MotivePoly({(1, S12): 1})


def test_motive_shape_h13():
    shape = motive_shape(5, 3, 13)
    assert shape.is_multiple_of(1, S12)


def test_motive_shape_dual_15():
    g, n = 2, 13
    d = 3 * g - 3 + n
    shape = motive_shape(g, n, 2 * d - 15)
    assert shape == MotivePoly({(d - 13, S12): 1, (d - 15, S16): 1})


def test_motive_shape_g2_15_has_no_s16():
    # in genus 2 the degree-15 shape is pure L^2 S12
    assert motive_shape(2, 12, 15).is_multiple_of(2, S12)


def test_motive_shape_even():
    assert motive_shape(4, 0, 14).is_multiple_of(7, UNIT)


def test_motive_addition():
    a = MotivePoly({(1, S12): 2})
    b = MotivePoly({(1, S12): 3, (0, UNIT): 1})
    assert (a + b) == MotivePoly({(1, S12): 5, (0, UNIT): 1})
