"""Exact rational linear algebra primitives."""

import random
from fractions import Fraction

from copkit._ratlin import (
    independent_rows,
    project_onto_affine,
    rref,
    solve_affine,
    strictly_positive_point,
)


def test_rref_simple():
    red, pivots = rref([[2, 4], [1, 2]])
    assert pivots == [0]
    assert red[0] == [Fraction(1), Fraction(2)]


def test_solve_affine_unique():
    sol = solve_affine([[1, 1], [1, -1]], [3, 1])
    assert sol is not None
    part, basis = sol
    assert part == [Fraction(2), Fraction(1)] and basis == []


def test_solve_affine_underdetermined():
    sol = solve_affine([[1, 1, 1]], [1])
    assert sol is not None
    part, basis = sol
    assert sum(part) == 1 and len(basis) == 2
    for vec in basis:
        assert sum(vec) == 0


def test_solve_affine_inconsistent():
    assert solve_affine([[1, 1], [2, 2]], [1, 3]) is None


def test_independent_rows_detects_inconsistency():
    keep, ok = independent_rows([[1, 0], [2, 0]], [1, 2])
    assert keep == [0] and ok
    keep, ok = independent_rows([[1, 0], [2, 0]], [1, 3])
    assert not ok


def test_projection_is_idempotent_and_feasible():
    rng = random.Random(5)
    for _ in range(15):
        n = rng.randint(2, 5)
        m = rng.randint(1, n)
        a = [[Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(n)] for _ in range(m)]
        x_true = [Fraction(rng.randint(-2, 2)) for _ in range(n)]
        b = [sum(ai * xi for ai, xi in zip(row, x_true)) for row in a]
        point = [v + Fraction(rng.randint(-1, 1), 3) for v in x_true]
        proj = project_onto_affine(a, b, point)
        assert proj is not None
        for row, bv in zip(a, b):
            assert sum(ai * pi for ai, pi in zip(row, proj)) == bv
        again = project_onto_affine(a, b, proj)
        assert again == proj


def test_projection_moves_minimally_on_a_line():
    # project (0, 0) onto x + y = 2: nearest point is (1, 1)
    proj = project_onto_affine([[1, 1]], [2], [0, 0])
    assert proj == [Fraction(1), Fraction(1)]


def test_strictly_positive_point_on_segment():
    # x = (t, 1 - t): positive for t in (0, 1)
    point = [Fraction(0), Fraction(1)]
    direction = [[Fraction(1), Fraction(-1)]]
    witness = strictly_positive_point(point, direction)
    assert witness is not None and all(v > 0 for v in witness)
    assert sum(witness) == 1


def test_strictly_positive_point_infeasible():
    # x = (t, -t): one coordinate always <= 0
    point = [Fraction(0), Fraction(0)]
    direction = [[Fraction(1), Fraction(-1)]]
    assert strictly_positive_point(point, direction) is None


def test_strictly_positive_point_no_directions():
    assert strictly_positive_point([1, 2], []) == [Fraction(1), Fraction(2)]
    assert strictly_positive_point([1, 0], []) is None


def test_strictly_positive_point_two_parameters():
    # x = (t, s, 1 - t - s): open triangle
    point = [Fraction(0), Fraction(0), Fraction(1)]
    dirs = [[1, 0, -1], [0, 1, -1]]
    witness = strictly_positive_point(point, dirs)
    assert witness is not None and all(v > 0 for v in witness)
    assert sum(witness) == 1
