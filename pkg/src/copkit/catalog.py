"""Named matrices and polynomial identities used throughout the tests.

Everything here is constructed exactly (the Hildebrand cosine family is
the one float-only item), and the two classical certificate identities
are re-expanded from scratch so a transcription error anywhere fails
loudly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .poly import Polynomial
from .symmat import SymMat

# -- matrices -------------------------------------------------------------------


def horn() -> SymMat:
    """The 5x5 +-1 matrix on the boundary story: copositive, outside the
    PSD+nonnegative cone, inside the order-1 SOS cone."""
    return SymMat(
        [
            [1, 1, -1, -1, 1],
            [1, 1, 1, -1, -1],
            [-1, 1, 1, 1, -1],
            [-1, -1, 1, 1, 1],
            [1, -1, -1, 1, 1],
        ]
    )


def horn_scaled(t) -> SymMat:
    """Horn matrix with every +1 entry replaced by t (diagonal included).

    For 1 < t < sqrt(5) - 1 this lies in the interior of the copositive
    cone yet stays outside the PSD+nonnegative cone."""
    t = Fraction(t)
    h = horn()
    return SymMat(
        [[t if h[i, j] == 1 else h[i, j] for j in range(5)] for i in range(5)]
    )


def matrix_m() -> SymMat:
    """The 3x3 nonnegative matrix whose form 2 x1 x2 has no simplex
    Lasserre certificate at any order."""
    return SymMat([[0, 1, 0], [1, 0, 0], [0, 0, 0]])


def horn_plus_zero() -> SymMat:
    """H (+) 0, a 6x6 copositive matrix outside every order of the SOS
    hierarchy."""
    h = horn()
    return SymMat(
        [[h[i, j] if i < 5 and j < 5 else 0 for j in range(6)] for i in range(6)]
    )


def horn_plus_edge() -> SymMat:
    """H (+) [[1,-1],[-1,1]], the 7x7 all-ones-diagonal variant."""
    h = horn()
    tail = [[1, -1], [-1, 1]]
    rows = []
    for i in range(7):
        row = []
        for j in range(7):
            if i < 5 and j < 5:
                row.append(h[i, j])
            elif i >= 5 and j >= 5:
                row.append(Fraction(tail[i - 5][j - 5]))
            else:
                row.append(Fraction(0))
        rows.append(row)
    return SymMat(rows)


def padding_block(m: int) -> SymMat:
    """(1/(m-1)) (m I - J): PSD with e^T M e = 0, the padding block that
    produces all-ones-diagonal counterexamples in sizes n >= 7."""
    if m < 2:
        raise ValueError("padding block needs m >= 2")
    c = Fraction(1, m - 1)
    return SymMat(
        [[c * (m * (1 if i == j else 0) - 1) for j in range(m)] for i in range(m)]
    )


def horn_plus_padding(m: int) -> SymMat:
    h = horn()
    p = padding_block(m)
    n = 5 + m
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i < 5 and j < 5:
                row.append(h[i, j])
            elif i >= 5 and j >= 5:
                row.append(p[i - 5, j - 5])
            else:
                row.append(Fraction(0))
        rows.append(row)
    return SymMat(rows)


# -- Hildebrand family ------------------------------------------------------------


@dataclass(frozen=True)
class TPsiParams:
    angles: tuple[float, float, float, float, float]

    def valid(self) -> bool:
        return all(a > 0 for a in self.angles) and sum(self.angles) < math.pi


def t_psi(params: TPsiParams) -> SymMat:
    """The extreme copositive 5x5 cosine pattern for a valid angle tuple."""
    if not params.valid():
        raise ValueError("angles must be positive with sum below pi")
    p1, p2, p3, p4, p5 = params.angles
    c = math.cos
    rows = [
        [1.0, -c(p4), c(p4 + p5), c(p2 + p3), -c(p3)],
        [-c(p4), 1.0, -c(p5), c(p5 + p1), c(p3 + p4)],
        [c(p4 + p5), -c(p5), 1.0, -c(p1), c(p1 + p2)],
        [c(p2 + p3), c(p5 + p1), -c(p1), 1.0, -c(p2)],
        [-c(p3), c(p3 + p4), c(p1 + p2), -c(p2), 1.0],
    ]
    return SymMat(rows)


def t_psi_zeros(params: TPsiParams) -> list[tuple[float, ...]]:
    """The five simplex zeros of the cosine form, from the sine formulas,
    each normalized to coordinate sum one."""
    if not params.valid():
        raise ValueError("angles must be positive with sum below pi")
    p1, p2, p3, p4, p5 = params.angles
    s = math.sin
    raw = [
        (s(p5), s(p4 + p5), s(p4), 0.0, 0.0),
        (s(p3 + p4), s(p3), 0.0, 0.0, s(p4)),
        (0.0, s(p1), s(p1 + p5), s(p5), 0.0),
        (0.0, 0.0, s(p2), s(p1 + p2), s(p1)),
        (s(p2), 0.0, 0.0, s(p3), s(p2 + p3)),
    ]
    out = []
    for u in raw:
        total = sum(u)
        out.append(tuple(v / total for v in u))
    return out


# -- polynomials --------------------------------------------------------------------


def motzkin_poly() -> Polynomial:
    """x^4 y^2 + x^2 y^4 - 3 x^2 y^2 + 1: nonnegative, not a sum of squares."""
    return Polynomial(
        2,
        {(4, 2): 1, (2, 4): 1, (2, 2): -3, (0, 0): 1},
    )


def motzkin_form() -> Polynomial:
    """The homogenized version in three variables."""
    return Polynomial(
        3,
        {(4, 2, 0): 1, (2, 4, 0): 1, (2, 2, 2): -3, (0, 0, 6): 1},
    )


def stubborn_quartic_obstruction() -> Polynomial:
    """m^2 + w^6 m in four variables: nonnegative, and no power of the
    squared-norm multiplier ever makes it a sum of squares."""
    m = Polynomial(
        4,
        {(4, 2, 0, 0): 1, (2, 4, 0, 0): 1, (2, 2, 2, 0): -3, (0, 0, 6, 0): 1},
    )
    w6 = Polynomial(4, {(0, 0, 0, 6): 1})
    return m * m + w6 * m


# -- exact identity checks -------------------------------------------------------------


def _quartic_square_term(n: int, i: int, signs: list[int]) -> Polynomial:
    """x_i^2 * (sum_j signs[j] x_j^2)^2 as an exact polynomial."""
    lin = Polynomial(n, {tuple(2 if k == j else 0 for k in range(n)): signs[j] for j in range(n) if signs[j]})
    sq = lin * lin
    xi2 = Polynomial(n, {tuple(2 if k == i else 0 for k in range(n)): 1})
    return xi2 * sq


def horn_identity_sides() -> tuple[Polynomial, Polynomial]:
    """Both sides of the explicit degree-6 decomposition that places the
    Horn matrix inside the order-1 SOS cone."""
    from .poly import quartic_form

    n = 5
    h = horn()
    lhs = Polynomial.sum_of_squared_variables(n) * quartic_form(h)
    sign_rows = [
        [1, 1, -1, -1, 1],
        [1, 1, 1, -1, -1],
        [-1, 1, 1, 1, -1],
        [-1, -1, 1, 1, 1],
        [1, -1, -1, 1, 1],
    ]
    rhs = Polynomial.zero(n)
    for i in range(n):
        rhs = rhs + _quartic_square_term(n, i, sign_rows[i])
    for triple in ((0, 1, 4), (0, 1, 2), (1, 2, 3), (2, 3, 4), (3, 4, 0)):
        e = [0] * n
        for v in triple:
            e[v] = 2
        rhs = rhs + Polynomial(n, {tuple(e): 4})
    return lhs, rhs


def verify_horn_identity() -> bool:
    lhs, rhs = horn_identity_sides()
    return lhs == rhs


def motzkin_certificate_sides() -> tuple[Polynomial, Polynomial]:
    """(x^2+y^2)^2 h = x^2 y^2 (x^2+y^2+1)(x^2+y^2-2)^2 + (x^2-y^2)^2."""
    h = motzkin_poly()
    s = Polynomial(2, {(2, 0): 1, (0, 2): 1})
    lhs = s * s * h
    x2y2 = Polynomial(2, {(2, 2): 1})
    splus = Polynomial(2, {(2, 0): 1, (0, 2): 1, (0, 0): 1})
    sminus = Polynomial(2, {(2, 0): 1, (0, 2): 1, (0, 0): -2})
    diff = Polynomial(2, {(2, 0): 1, (0, 2): -1})
    rhs = x2y2 * splus * sminus * sminus + diff * diff
    return lhs, rhs


def verify_motzkin_certificate() -> bool:
    lhs, rhs = motzkin_certificate_sides()
    return lhs == rhs


# -- CLI-addressable registry ----------------------------------------------------------


def lookup(name: str):
    """Resolve a catalog reference like "horn", "horn_scaled:11/10",
    "tpsi:0.31,0.31,0.31,0.31,0.31", "padding:3", "motzkin"."""
    head, _, arg = name.partition(":")
    if head == "horn":
        return horn()
    if head == "horn_scaled":
        if not arg:
            raise ValueError("horn_scaled needs a scale, e.g. horn_scaled:11/10")
        return horn_scaled(Fraction(arg))
    if head == "matrix_m":
        return matrix_m()
    if head == "horn_plus_zero":
        return horn_plus_zero()
    if head == "horn_plus_edge":
        return horn_plus_edge()
    if head == "padding":
        if not arg:
            raise ValueError("padding needs a block size, e.g. padding:3")
        return horn_plus_padding(int(arg))
    if head == "tpsi":
        angles = tuple(float(v) for v in arg.split(",")) if arg else (math.pi / 10,) * 5
        if len(angles) != 5:
            raise ValueError("tpsi needs five comma-separated angles")
        return t_psi(TPsiParams(angles))
    if head == "motzkin":
        return motzkin_poly()
    if head == "motzkin_form":
        return motzkin_form()
    raise KeyError(f"unknown catalog item {name!r}")
