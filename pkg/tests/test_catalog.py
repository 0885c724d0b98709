"""Named matrices, the two explicit certificate identities, and the
Hildebrand cosine family."""

import math
import random
from fractions import Fraction

import pytest

from copkit.catalog import (
    TPsiParams,
    horn,
    horn_identity_sides,
    horn_plus_edge,
    horn_plus_padding,
    horn_plus_zero,
    horn_scaled,
    lookup,
    matrix_m,
    motzkin_certificate_sides,
    motzkin_form,
    motzkin_poly,
    padding_block,
    stubborn_quartic_obstruction,
    t_psi,
    t_psi_zeros,
    verify_horn_identity,
    verify_motzkin_certificate,
)
from copkit.cones import sos_check
from copkit.poly import Polynomial
from copkit.simplexopt import copositivity_class, copositivity_class_float
from copkit.symmat import psd_check_exact


def test_horn_entries():
    h = horn()
    assert all(h[i, i] == 1 for i in range(5))
    assert h[0, 1] == 1 and h[0, 2] == -1


def test_horn_is_the_five_cycle_graph_matrix():
    from copkit.graphs import Graph, graph_matrix

    assert graph_matrix(Graph.cycle(5)) == horn()


def test_horn_scaled_identity_at_one():
    assert horn_scaled(1) == horn()


def test_horn_scaled_inside_interior_outside_spn():
    from copkit.cones import spn_membership

    m = horn_scaled(Fraction(11, 10))
    assert copositivity_class(m).classification == "strictly_copositive"
    v = spn_membership(m)
    assert v.decision == "NO"


def test_matrix_m_entries():
    assert matrix_m().rows() == [[0, 1, 0], [1, 0, 0], [0, 0, 0]]


def test_block_examples_shapes():
    hz = horn_plus_zero()
    assert hz.n == 6
    assert all(hz[i, j] == horn()[i, j] for i in range(5) for j in range(5))
    assert all(hz[5, j] == 0 for j in range(6))
    he = horn_plus_edge()
    assert he.n == 7 and he[5, 6] == -1 and he[5, 5] == 1


def test_padding_block_is_psd_with_zero_row_sums():
    for m in (2, 3, 4):
        p = padding_block(m)
        assert psd_check_exact(p).psd
        assert sum(p[i, j] for i in range(m) for j in range(m)) == 0
        assert all(p[i, i] == 1 for i in range(m))


def test_horn_plus_padding_has_unit_diagonal():
    big = horn_plus_padding(3)
    assert big.n == 8
    assert all(big[i, i] == 1 for i in range(8))


def test_horn_identity_exact():
    assert verify_horn_identity()


def test_horn_identity_negative_controls():
    lhs, rhs = horn_identity_sides()
    # perturb one cubic coefficient 4 -> 5
    tampered = rhs + Polynomial(5, {(2, 2, 0, 0, 2): 1})
    assert lhs != tampered
    # scaled matrix changes the left side
    from copkit.poly import quartic_form

    other = Polynomial.sum_of_squared_variables(5) * quartic_form(horn_scaled(Fraction(11, 10)))
    assert other != rhs


def test_motzkin_certificate_exact():
    assert verify_motzkin_certificate()


def test_motzkin_certificate_negative_control():
    lhs, rhs = motzkin_certificate_sides()
    diff = Polynomial(2, {(2, 0): 1, (0, 2): -1})
    assert lhs != rhs - diff * diff


def test_motzkin_certificate_spot_evaluation():
    lhs, rhs = motzkin_certificate_sides()
    assert lhs.eval((2, 3)) == rhs.eval((2, 3))
    assert lhs.eval((2, 3)) == Fraction(13 * 13) * motzkin_poly().eval((2, 3))


def test_motzkin_values_and_nonnegativity_grid():
    h = motzkin_poly()
    assert h.eval((1, 1)) == 0
    lo, hi, steps = -5.0, 5.0, 201
    for i in range(steps):
        x = lo + (hi - lo) * i / (steps - 1)
        for j in range(steps):
            y = lo + (hi - lo) * j / (steps - 1)
            assert h.eval((x, y)) >= -1e-9


def test_motzkin_not_sos():
    v = sos_check(motzkin_poly())
    assert v.decision == "NO" and v.margin <= -1e-4


def test_motzkin_form_homogeneous():
    m = motzkin_form()
    assert m.is_homogeneous() and m.degree() == 6
    assert m.eval((1, 1, 1)) == 0


def test_quartic_obstruction_resists_multipliers():
    q = stubborn_quartic_obstruction()
    assert sos_check(q).decision == "NO"
    s = Polynomial.sum_of_squared_variables(4)
    assert sos_check(s * q).decision == "NO"


def test_t_psi_diagonal_and_validity():
    params = TPsiParams((math.pi / 10,) * 5)
    t = t_psi(params)
    assert all(t[i, i] == 1.0 for i in range(5))
    with pytest.raises(ValueError):
        t_psi(TPsiParams((1.0, 1.0, 1.0, 1.0, 0.0)))
    with pytest.raises(ValueError):
        t_psi(TPsiParams((1.0,) * 5))  # sum exceeds pi


def test_t_psi_zero_formula_structure():
    params = TPsiParams((0.1, 0.2, 0.3, 0.4, 0.5))
    zeros = t_psi_zeros(params)
    u1 = zeros[0]
    assert u1[3] == 0 and u1[4] == 0
    scale = math.sin(0.5) + math.sin(0.9) + math.sin(0.4)
    assert abs(u1[0] - math.sin(0.5) / scale) < 1e-12
    assert abs(u1[1] - math.sin(0.4 + 0.5) / scale) < 1e-12


def test_t_psi_zeros_vanish_and_matrix_is_boundary():
    rng = random.Random(2026)
    for _ in range(25):
        raw = [rng.uniform(0.05, 1.0) for _ in range(5)]
        scale = rng.uniform(0.3, 0.95) * math.pi / sum(raw)
        params = TPsiParams(tuple(v * scale for v in raw))
        assert params.valid()
        t = t_psi(params)
        for z in t_psi_zeros(params):
            assert abs(t.quad(list(z))) <= 1e-10
        rep = copositivity_class_float(t)
        assert rep.classification == "boundary"


def test_lookup_references():
    assert lookup("horn") == horn()
    assert lookup("horn_scaled:11/10") == horn_scaled(Fraction(11, 10))
    assert lookup("matrix_m") == matrix_m()
    assert lookup("horn_plus_zero") == horn_plus_zero()
    assert isinstance(lookup("motzkin"), Polynomial)
    assert lookup("padding:3").n == 8
    assert lookup("tpsi:0.3,0.3,0.3,0.3,0.3").kind == "float"
    with pytest.raises(KeyError):
        lookup("unknown")
    with pytest.raises(ValueError):
        lookup("horn_scaled")
