"""Exact linear algebra over the rationals (internal helper).

Everything here works on lists of Fraction and never touches floating
point.  Used by the exact PSD test, the simplex KKT systems, constraint
presolve, and certificate rounding.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

Row = list[Fraction]

_ZERO = Fraction(0)


def _as_fractions(rows: Sequence[Sequence]) -> list[Row]:
    return [[Fraction(v) for v in row] for row in rows]


def rref(rows: Sequence[Sequence]) -> tuple[list[Row], list[int]]:
    """Reduced row echelon form; returns (R, pivot columns)."""
    a = _as_fractions(rows)
    if not a:
        return [], []
    m, n = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][col]
        a[r] = [v / inv for v in a[r]]
        for i in range(m):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    return a, pivots


def solve_affine(a: Sequence[Sequence], b: Sequence) -> tuple[Row, list[Row]] | None:
    """Solve A x = b exactly.

    Returns (particular solution, nullspace basis), or None if the system
    is inconsistent.
    """
    rows = [[*row, Fraction(bv)] for row, bv in zip(_as_fractions(a), b)]
    if not rows:
        return [], []
    n = len(rows[0]) - 1
    red, pivots = rref(rows)
    if n in pivots:
        return None
    part = [_ZERO] * n
    for k, col in enumerate(pivots):
        part[col] = red[k][n]
    basis: list[Row] = []
    for j in range(n):
        if j in pivots:
            continue
        vec = [_ZERO] * n
        vec[j] = Fraction(1)
        for k, col in enumerate(pivots):
            vec[col] = -red[k][j]
        basis.append(vec)
    return part, basis


def independent_rows(rows: Sequence[Sequence], rhs: Sequence) -> tuple[list[int], bool]:
    """Indices of a maximal independent subset of the rows of A.

    Second value is False when some dependent row contradicts the rows it
    depends on, i.e. A x = b is inconsistent.
    """
    a = _as_fractions(rows)
    if not a:
        return [], True
    n = len(a[0])
    kept: list[Row] = []
    kept_rhs: list[Fraction] = []
    kept_idx: list[int] = []
    consistent = True
    for idx, row in enumerate(a):
        work = list(row)
        wr = Fraction(rhs[idx])
        for krow, kr in zip(kept, kept_rhs):
            lead = next(j for j in range(n) if krow[j] != 0)
            if work[lead] != 0:
                f = work[lead] / krow[lead]
                work = [wv - f * kv for wv, kv in zip(work, krow)]
                wr -= f * kr
        if any(v != 0 for v in work):
            kept.append(work)
            kept_rhs.append(wr)
            kept_idx.append(idx)
        elif wr != 0:
            consistent = False
    return kept_idx, consistent


def _integerize(row: Row) -> tuple[list[int], int]:
    """Scale a rational row to integers; returns (vector, denominator)."""
    denom = 1
    for v in row:
        d = v.denominator
        denom = denom // math.gcd(denom, d) * d
    return [int(v * denom) for v in row], denom


def project_onto_affine(rows: Sequence[Sequence], rhs: Sequence, point: Sequence) -> Row | None:
    """Orthogonally project `point` onto {x : A x = b}, exactly.

    Returns None when the constraints are inconsistent.  Dot products run
    over scaled integer rows; plain int arithmetic is far cheaper than
    Fraction arithmetic at these sizes.
    """
    keep, ok = independent_rows(rows, rhs)
    if not ok:
        return None
    x0 = [Fraction(v) for v in point]
    if not keep:
        return x0
    a = _as_fractions([rows[i] for i in keep])
    b = [Fraction(rhs[i]) for i in keep]
    resid = [sum((av * xv for av, xv in zip(row, x0)), _ZERO) - bv for row, bv in zip(a, b)]
    m = len(a)
    ints = [_integerize(row) for row in a]
    gram = [[_ZERO] * m for _ in range(m)]
    for i in range(m):
        vi, di = ints[i]
        for j in range(i, m):
            vj, dj = ints[j]
            dot = sum(p * q for p, q in zip(vi, vj))
            gram[i][j] = gram[j][i] = Fraction(dot, di * dj)
    sol = solve_affine(gram, resid)
    assert sol is not None  # gram is PD for independent rows
    u = sol[0]
    return [xv - sum((a[i][j] * u[i] for i in range(m)), _ZERO) for j, xv in enumerate(x0)]


def _eliminate(system: list[tuple[Row, Fraction]], var: int):
    """Split strict inequalities by the sign of t_var and eliminate it.

    A constraint (c, d) means  sum_k c[k] t_k + d > 0  over t_0..t_var.
    """
    lower: list[tuple[Row, Fraction]] = []  # t_var > bound(t_<var)
    upper: list[tuple[Row, Fraction]] = []  # t_var < bound(t_<var)
    rest: list[tuple[Row, Fraction]] = []
    for coeffs, const in system:
        c = coeffs[var]
        red = coeffs[:var]
        if c == 0:
            rest.append((red, const))
        elif c > 0:
            lower.append(([-v / c for v in red], -const / c))
        else:
            upper.append(([-v / c for v in red], -const / c))
    for lc, lconst in lower:
        for uc, uconst in upper:
            rest.append(([u - l for l, u in zip(lc, uc)], uconst - lconst))
    return lower, upper, rest


def strictly_positive_point(point: Sequence, directions: Sequence[Sequence]) -> Row | None:
    """Find x = point + sum_k t_k d_k with every coordinate > 0, exactly.

    Fourier-Motzkin elimination over the t variables; returns a witness x
    or None when the affine set misses the open positive orthant.
    """
    x0 = [Fraction(v) for v in point]
    dirs = _as_fractions(directions)
    if not dirs:
        return x0 if all(v > 0 for v in x0) else None
    d = len(dirs)
    tvals: list[Fraction] = [_ZERO] * d

    def pick(var: int, system: list[tuple[Row, Fraction]]) -> bool:
        if var < 0:
            return all(const > 0 for coeffs, const in system)
        lower, upper, rest = _eliminate(system, var)
        if len(rest) > 20000:
            raise RuntimeError("face too degenerate for Fourier-Motzkin elimination")
        if not pick(var - 1, rest):
            return False
        lo = None
        for lc, lconst in lower:
            v = lconst + sum(c * tvals[k] for k, c in enumerate(lc))
            lo = v if lo is None or v > lo else lo
        hi = None
        for uc, uconst in upper:
            v = uconst + sum(c * tvals[k] for k, c in enumerate(uc))
            hi = v if hi is None or v < hi else hi
        if lo is None and hi is None:
            tvals[var] = _ZERO
        elif lo is None:
            tvals[var] = hi - 1
        elif hi is None:
            tvals[var] = lo + 1
        elif lo < hi:
            tvals[var] = (lo + hi) / 2
        else:
            return False
        return True

    system = [([dirs[k][j] for k in range(d)], x0[j]) for j in range(len(x0))]
    if not pick(d - 1, system):
        return None
    out = [x0[j] + sum(dirs[k][j] * tvals[k] for k in range(d)) for j in range(len(x0))]
    assert all(v > 0 for v in out)
    return out
