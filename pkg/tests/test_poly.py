"""Exact polynomial arithmetic and the expansion engine."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from copkit.poly import Polynomial, polya_expand, quad_form, quartic_form
from copkit.symmat import SymMat


def var(n, i):
    return Polynomial.variable(n, i)


def naive_product(a: dict, b: dict, nvars: int) -> dict:
    """Brute-force convolution oracle, independent of Polynomial.__mul__."""
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, Fraction(0)) + ca * cb
    return {e: c for e, c in out.items() if c != 0}


def test_mul_difference_of_squares():
    x1, x2 = var(2, 0), var(2, 1)
    assert (x1 + x2) * (x1 - x2) == x1 * x1 - x2 * x2


def test_mul_identity_case():
    p = Polynomial(2, {(1, 1): Fraction(3), (2, 0): Fraction(-1, 2)})
    assert p * Polynomial.constant(2, 1) == p


def test_mul_sum_of_cubes():
    # (x+y)(x^2 - xy + y^2) = x^3 + y^3
    x, y = var(2, 0), var(2, 1)
    p = x * x - x * y + y * y
    assert (x + y) * p == Polynomial(2, {(3, 0): 1, (0, 3): 1})


def test_mul_requires_same_variable_count():
    with pytest.raises(ValueError):
        Polynomial.constant(2, 1) * Polynomial.constant(3, 1)


def test_pow_binomial():
    x1, x2 = var(2, 0), var(2, 1)
    assert (x1 + x2) ** 2 == Polynomial(2, {(2, 0): 1, (1, 1): 2, (0, 2): 1})


def test_pow_zero_is_one():
    p = Polynomial(3, {(1, 2, 0): Fraction(5)})
    assert p**0 == Polynomial.constant(3, 1)


def test_pow_trinomial_against_convolution_oracle():
    s = Polynomial.sum_of_variables(3)
    sq = dict((s * s).terms)
    expect = naive_product(dict(s.terms), dict(s.terms), 3)
    assert sq == expect
    for e, c in sq.items():
        assert c == (1 if 2 in e else 2)


def test_quad_form_identity():
    assert quad_form(SymMat.identity(2)) == Polynomial(2, {(2, 0): 1, (0, 2): 1})


def test_quad_form_offdiagonal_doubles():
    m = SymMat([[0, 1], [1, 0]])
    assert quad_form(m) == Polynomial(2, {(1, 1): 2})


def test_quad_form_horn_cross_terms():
    from copkit.catalog import horn

    p = quad_form(horn())
    assert p.coefficient((1, 1, 0, 0, 0)) == 2
    assert p.coefficient((1, 0, 1, 0, 0)) == -2
    assert all(p.coefficient(tuple(2 if j == i else 0 for j in range(5))) == 1 for i in range(5))


def test_quad_form_rejects_floats():
    with pytest.raises(ValueError):
        quad_form(SymMat([[1.0, 0.0], [0.0, 1.0]]))


def test_substitute_squares_examples():
    p = Polynomial(2, {(1, 1): 1})
    assert p.substitute_squares() == Polynomial(2, {(2, 2): 1})
    c = Polynomial.constant(3, Fraction(7, 2))
    assert c.substitute_squares() == c


def test_quartic_form_of_horn_has_degree_four():
    from copkit.catalog import horn

    q = quartic_form(horn())
    assert q.is_homogeneous() and q.degree() == 4
    assert q.is_even_in_every_variable()


def _random_rational_symmat(rng, n):
    rows = [[Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(n)] for _ in range(n)]
    return SymMat([[(rows[i][j] + rows[j][i]) / 2 for j in range(n)] for i in range(n)])


def test_polya_expand_degenerate_one_by_one():
    m = SymMat([[Fraction(7, 3)]])
    assert polya_expand(m, 0) == Polynomial(1, {(2,): Fraction(7, 3)})


def test_polya_expand_offdiag():
    m = SymMat([[0, 1], [1, 0]])
    assert polya_expand(m, 0) == Polynomial(2, {(1, 1): 2})


def test_polya_expand_identity_order_one():
    p = polya_expand(SymMat.identity(2), 1)
    assert p == Polynomial(2, {(3, 0): 1, (2, 1): 1, (1, 2): 1, (0, 3): 1})
    assert p == polya_expand(SymMat.identity(2), 1, mode="convolution")


def test_polya_closed_form_matches_convolution_on_random_instances():
    # required validation of the coefficient formula before trusting it
    rng = random.Random(42)
    for _ in range(40):
        n = rng.randint(1, 4)
        r = rng.randint(0, 5)
        m = _random_rational_symmat(rng, n)
        assert polya_expand(m, r, "closed_form") == polya_expand(m, r, "convolution")


def test_polya_recurrence():
    rng = random.Random(3)
    for _ in range(10):
        n = rng.randint(2, 4)
        r = rng.randint(0, 3)
        m = _random_rational_symmat(rng, n)
        lifted = Polynomial.sum_of_variables(n) * polya_expand(m, r)
        assert polya_expand(m, r + 1) == lifted


small_rationals = st.fractions(
    min_value=-4, max_value=4, max_denominator=6
)


@st.composite
def polynomials(draw, nvars=2, max_terms=5, max_degree=3):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        e = tuple(draw(st.integers(0, max_degree)) for _ in range(nvars))
        terms[e] = draw(small_rationals)
    return Polynomial(nvars, terms)


@settings(max_examples=60, deadline=None)
@given(polynomials(), polynomials(), st.lists(small_rationals, min_size=2, max_size=2))
def test_eval_is_ring_homomorphism(a, b, point):
    assert (a * b).eval(point) == a.eval(point) * b.eval(point)
    assert (a + b).eval(point) == a.eval(point) + b.eval(point)


@settings(max_examples=40, deadline=None)
@given(polynomials(), st.lists(small_rationals, min_size=2, max_size=2))
def test_substitute_squares_eval(p, point):
    squared = [v * v for v in point]
    assert p.substitute_squares().eval(point) == p.eval(squared)


def test_eval_motzkin_at_ones_is_zero():
    from copkit.catalog import motzkin_poly

    assert motzkin_poly().eval((1, 1)) == 0


def test_eval_horn_form_at_zero_pattern():
    from copkit.catalog import horn

    p = quad_form(horn())
    assert p.eval((1, 0, 1, 0, 0)) == 0
    assert p.eval((1, 0, 0, 1, 0)) == 0


def test_eval_at_origin_gives_constant_term():
    p = Polynomial(3, {(0, 0, 0): Fraction(5, 3), (1, 0, 2): 4})
    assert p.eval((0, 0, 0)) == Fraction(5, 3)


def test_eval_length_mismatch():
    with pytest.raises(ValueError):
        Polynomial.constant(2, 1).eval((1,))


def test_homogeneity_predicate():
    assert Polynomial(2, {(2, 0): 1, (1, 1): 3}).is_homogeneous()
    assert not Polynomial(2, {(2, 0): 1, (1, 0): 1}).is_homogeneous()
    assert Polynomial.zero(2).is_homogeneous()


def test_render_canonical_order():
    p = Polynomial(2, {(0, 2): 1, (2, 0): 2, (1, 1): -3})
    assert p.render() == "2 x1^2 + -3 x1 x2 + 1 x2^2"


def test_terms_never_store_zero():
    p = Polynomial(2, {(1, 0): 1}) - Polynomial(2, {(1, 0): 1})
    assert p.is_zero() and len(p) == 0


def test_polya_coefficient_matches_expansion():
    from copkit.poly import polya_coefficient

    m = SymMat([[Fraction(1), Fraction(-2)], [Fraction(-2), Fraction(3)]])
    p = polya_expand(m, 2)
    for e, c in p:
        assert polya_coefficient(m.rows(), 2, e) == c
    assert polya_coefficient(m.rows(), 2, (4, 0)) == p.coefficient((4, 0))
