"""Membership tests for the approximation cones, their inclusions, and
certificate round trips."""

import math
import random
from fractions import Fraction

import pytest

from copkit.catalog import horn, horn_plus_zero, matrix_m
from copkit.certificates import K1Cert, verify_certificate
from copkit.cones import (
    CapExceeded,
    c_membership,
    k1_membership,
    kr_membership,
    las_simplex_membership,
    qr_membership,
    sos_check,
    spn_membership,
)
from copkit.symmat import SymMat


def rand_sym(rng, n, lo=-4, hi=4):
    rows = [[Fraction(rng.randint(lo, hi), rng.randint(1, 2)) for _ in range(n)] for _ in range(n)]
    return SymMat([[(rows[i][j] + rows[j][i]) / 2 for j in range(n)] for i in range(n)])


def rand_spn(rng, n):
    a = [[Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)]
    p = [[sum(a[k][i] * a[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    nn = [[Fraction(rng.randint(0, 3)) for _ in range(n)] for _ in range(n)]
    return SymMat([[(p[i][j] + (nn[i][j] + nn[j][i]) / 2) for j in range(n)] for i in range(n)])


# -- nonnegative-coefficient cone ------------------------------------------------


def test_c_membership_identity_any_order():
    for r in (0, 1, 3):
        v = c_membership(SymMat.identity(3), r)
        assert v.yes and v.margin == math.inf
        assert verify_certificate(SymMat.identity(3), v.certificate).passed


def test_c_membership_offdiagonal():
    assert c_membership(SymMat([[0, 1], [1, 0]]), 0).yes


def test_c_membership_rejects_horn_naming_the_coefficient():
    v = c_membership(horn(), 0)
    assert v.decision == "NO" and v.margin == -math.inf
    assert v.refutation["exponent"] in {(1, 0, 1, 0, 0), (1, 0, 0, 1, 0), (0, 1, 0, 1, 0),
                                        (0, 1, 0, 0, 1), (0, 0, 1, 0, 1)}
    assert v.refutation["coefficient"] == -2


def test_c_membership_monotone_in_order():
    rng = random.Random(8)
    for _ in range(20):
        m = rand_sym(rng, 3)
        for r in range(3):
            if c_membership(m, r).yes:
                assert c_membership(m, r + 1).yes


# -- SPN / order-0 ------------------------------------------------------------------


def test_spn_accepts_psd_with_zero_nonneg_part():
    m = SymMat([[2, -1], [-1, 2]])
    v = spn_membership(m)
    assert v.yes
    n_part = v.certificate.nonneg_part
    assert all(abs(float(n_part[i, j])) < 1e-5 for i in range(2) for j in range(2))


def test_spn_accepts_entrywise_nonnegative():
    v = spn_membership(SymMat([[0, 2], [2, 1]]))
    assert v.yes


def test_spn_rejects_horn_strictly():
    v = spn_membership(horn())
    assert v.decision == "NO"
    assert v.margin <= -1e-4
    assert v.refutation is not None


# -- order-1 block test ---------------------------------------------------------------


def test_k1_accepts_horn_exactly():
    v = k1_membership(horn())
    assert v.yes
    assert v.solver_margin >= -1e-7
    report = verify_certificate(horn(), v.certificate, mode="exact")
    assert report.passed and report.identity_residual == 0


def test_k1_certificate_for_horn_matches_hand_built_one():
    # the explicit rank-one certificate: blocks v_i v_i^T with the +-1
    # pattern matching the rows of the matrix itself
    signs = [
        [1, 1, -1, -1, 1],
        [1, 1, 1, -1, -1],
        [-1, 1, 1, 1, -1],
        [-1, -1, 1, 1, 1],
        [1, -1, -1, 1, 1],
    ]
    blocks = tuple(
        SymMat([[Fraction(si * sj) for sj in row] for si in row]) for row in signs
    )
    report = verify_certificate(horn(), K1Cert(blocks), mode="exact")
    assert report.passed
    v = k1_membership(horn())
    assert v.certificate == K1Cert(blocks)


def test_spn_yes_implies_k1_via_constant_blocks():
    # fold an order-0 certificate into the order-1 conditions by hand
    rng = random.Random(14)
    hits = 0
    for _ in range(10):
        m = rand_spn(rng, 3)
        v = spn_membership(m)
        if not v.yes or v.solver_margin < 1e-6:
            continue
        hits += 1
        assert k1_membership(m).decision != "NO"
    assert hits >= 5


def test_k1_rejects_padded_horn():
    v = k1_membership(horn_plus_zero())
    assert v.decision == "NO"
    assert v.margin <= -1e-5


# -- quartic SOS hierarchy ---------------------------------------------------------------


def test_kr_order_zero_on_psd():
    v = kr_membership(SymMat([[2, -1], [-1, 2]]), 0)
    assert v.yes


def test_kr_horn_at_orders_zero_and_one():
    assert kr_membership(horn(), 0).decision == "NO"
    v = kr_membership(horn(), 1)
    assert v.yes
    assert verify_certificate(horn(), v.certificate, mode="exact").passed


def test_kr_hierarchy_nesting():
    rng = random.Random(4)
    checked = 0
    for _ in range(8):
        m = rand_spn(rng, 3)
        v0 = kr_membership(m, 0)
        if v0.yes and v0.solver_margin and v0.solver_margin > 1e-6:
            checked += 1
            v1 = kr_membership(m, 1)
            assert v1.decision != "NO" and v1.solver_margin >= -1e-7
    assert checked >= 3


def test_kr_cap():
    with pytest.raises(CapExceeded):
        kr_membership(SymMat.identity(3), 4)


# -- Q-type cones ------------------------------------------------------------------------


def test_qr_contains_c_cone_instances():
    rng = random.Random(6)
    hits = 0
    for _ in range(15):
        m = rand_sym(rng, 3, lo=-1, hi=4)
        for r in (0, 1):
            if c_membership(m, r).yes:
                hits += 1
                v = qr_membership(m, r)
                assert v.decision != "NO" and v.solver_margin >= -1e-7
    assert hits >= 5


def test_qr_horn_orders():
    assert qr_membership(horn(), 0).decision == "NO"
    v = qr_membership(horn(), 1)
    assert v.yes
    assert verify_certificate(horn(), v.certificate, mode="exact").passed


def test_qr_yes_inside_kr():
    rng = random.Random(61)
    hits = 0
    for k in range(6):
        m = rand_spn(rng, 3)
        r = k % 2
        v = qr_membership(m, r)
        if v.yes and v.solver_margin and v.solver_margin > 1e-6:
            hits += 1
            v2 = kr_membership(m, r)
            assert v2.decision != "NO" and v2.solver_margin >= -1e-7
    assert hits >= 2


# -- simplex Lasserre cone ----------------------------------------------------------------


def test_las_two_by_two_boundary():
    # boundary of the 2x2 copositive cone, exactly representable at order 3
    m = SymMat([[1, -1], [-1, 1]])
    v = las_simplex_membership(m, 3)
    assert v.yes
    assert v.solver_margin >= -1e-6
    assert verify_certificate(m, v.certificate, mode="exact").passed


def test_float_input_stays_honest_at_the_boundary():
    # no exact recovery without rational data: the float path reports the
    # near-zero margin as inconclusive
    hf = horn().to_float()
    v = kr_membership(hf, 1)
    assert v.decision == "INCONCLUSIVE"
    assert abs(v.solver_margin) <= 1e-6


def test_las_rejects_the_three_by_three_obstruction():
    v = las_simplex_membership(matrix_m(), 3)
    assert v.decision == "NO"


def test_las_rejects_horn():
    v = las_simplex_membership(horn(), 3)
    assert v.decision == "NO"


def test_las_requires_order_two():
    with pytest.raises(ValueError):
        las_simplex_membership(SymMat.identity(2), 1)


def test_las_inside_kr_shifted_by_two():
    # order-r simplex certificates embed in the order-(r-2) quartic cone
    rng = random.Random(19)
    hits = 0
    for k in range(10):
        m = rand_spn(rng, 4 if k % 2 else 3)
        v = las_simplex_membership(m, 3)
        if v.yes and v.solver_margin and v.solver_margin > 1e-6:
            hits += 1
            v2 = kr_membership(m, 1)
            assert v2.decision != "NO" and v2.solver_margin >= -1e-7
    assert hits >= 3


def test_parity_reduction_matches_full_basis():
    # the target is even in every variable, so restricting the Gram to
    # exponent parity classes must not change the decision margin
    from copkit.cones import _monomials, sos_feasibility
    from copkit.poly import Polynomial, quartic_form

    for rows in ([[2, -1], [-1, 2]], [[1, 1], [1, -1]], [[0, 1], [1, 0]]):
        m = SymMat(rows)
        target = dict((Polynomial.sum_of_squared_variables(2) ** 1 * quartic_form(m)).terms)
        basis = _monomials(2, 3, exact_degree=True)
        with_parity = sos_feasibility(target, 2, basis, use_parity=True)
        without = sos_feasibility(target, 2, basis, use_parity=False)
        assert abs(with_parity.margin - without.margin) < 1e-6


# -- coherence with the exact oracle --------------------------------------------------------


def test_no_cone_test_accepts_a_non_copositive_matrix():
    from copkit.simplexopt import copositivity_class

    rng = random.Random(77)
    for _ in range(20):
        m = rand_sym(rng, rng.randint(2, 4))
        if copositivity_class(m).classification != "not_copositive":
            continue
        assert not c_membership(m, 1).yes
        assert not spn_membership(m).yes
        assert not kr_membership(m, 0).yes


def test_diananda_agreement_small_sample():
    from copkit.simplexopt import copositivity_class

    rng = random.Random(101)
    for _ in range(25):
        m = rand_sym(rng, 4)
        cls = copositivity_class(m).classification
        lam = spn_membership(m).solver_margin
        if abs(lam) <= 1e-7:
            continue
        assert (lam > 0) == (cls == "strictly_copositive")
        assert (lam < 0) == (cls == "not_copositive")


# -- generic SOS check -----------------------------------------------------------------------


def test_sos_check_on_squares():
    from copkit.poly import Polynomial

    p = Polynomial(2, {(2, 0): 1, (1, 1): -2, (0, 2): 1})
    v = sos_check(p)
    assert v.yes


def test_sos_check_rejects_motzkin():
    from copkit.catalog import motzkin_poly

    v = sos_check(motzkin_poly())
    assert v.decision == "NO" and v.margin <= -1e-4


def test_verdict_yes_certificates_verify_in_their_mode():
    rng = random.Random(3)
    for _ in range(6):
        m = rand_spn(rng, 3)
        for verdict in (spn_membership(m), kr_membership(m, 0)):
            if verdict.yes:
                mode = "float" if verdict.margin != math.inf else "exact"
                assert verify_certificate(m, verdict.certificate, mode=mode).passed
