"""Dense symmetric matrices with exact-rational or float entries.

Only the lower triangle is stored, so symmetry holds by construction.
The exact PSD test is an LDL^T factorization with greedy diagonal
pivoting; it either produces a factorization witness or an exact vector
v with v^T M v < 0.  The float path offers a cyclic-Jacobi smallest
eigenvalue estimate so the package needs no eigensolver dependency at
decision points.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np


def _parse_scalar(tok: str) -> Fraction | float:
    if "/" in tok:
        num, den = tok.split("/")
        return Fraction(int(num), int(den))
    try:
        return Fraction(int(tok))
    except ValueError:
        return float(tok)


class SymMat:
    """n x n symmetric matrix; scalar kind is "exact" or "float" uniformly."""

    __slots__ = ("n", "kind", "_tri")

    def __init__(self, rows: Sequence[Sequence]):
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        kinds = {isinstance(v, float) for r in rows for v in r}
        if kinds == {True, False}:
            raise ValueError("mixed exact and float entries")
        kind = "float" if kinds == {True} else "exact"
        tri: list = []
        for i in range(n):
            for j in range(i + 1):
                a, b = rows[i][j], rows[j][i]
                if a != b:
                    raise ValueError(f"matrix not symmetric at ({i},{j})")
                tri.append(float(a) if kind == "float" else Fraction(a))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "_tri", tuple(tri))

    def __setattr__(self, name, value):
        raise AttributeError("SymMat is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def identity(n: int) -> "SymMat":
        return SymMat([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])

    @staticmethod
    def zeros(n: int) -> "SymMat":
        return SymMat([[Fraction(0)] * n for _ in range(n)])

    @staticmethod
    def ones(n: int) -> "SymMat":
        return SymMat([[Fraction(1)] * n for _ in range(n)])

    @staticmethod
    def diag(values: Sequence) -> "SymMat":
        n = len(values)
        return SymMat([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def from_numpy(arr: np.ndarray) -> "SymMat":
        arr = np.asarray(arr, dtype=float)
        sym = 0.5 * (arr + arr.T)
        return SymMat([[float(v) for v in row] for row in sym])

    # -- access ------------------------------------------------------------

    def _idx(self, i: int, j: int) -> int:
        if i < j:
            i, j = j, i
        return i * (i + 1) // 2 + j

    def __getitem__(self, ij: tuple[int, int]):
        i, j = ij
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexError(f"index {ij} out of range for n={self.n}")
        return self._tri[self._idx(i, j)]

    def rows(self) -> list[list]:
        return [[self[i, j] for j in range(self.n)] for i in range(self.n)]

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(self[i, j]) for j in range(self.n)] for i in range(self.n)])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SymMat)
            and self.n == other.n
            and self.kind == other.kind
            and self._tri == other._tri
        )

    def __hash__(self) -> int:
        return hash((self.n, self.kind, self._tri))

    def __repr__(self) -> str:
        return f"SymMat({self.rows()!r})"

    # -- arithmetic ----------------------------------------------------------

    def add(self, other: "SymMat") -> "SymMat":
        if self.n != other.n:
            raise ValueError("size mismatch")
        return SymMat([[self[i, j] + other[i, j] for j in range(self.n)] for i in range(self.n)])

    def sub(self, other: "SymMat") -> "SymMat":
        if self.n != other.n:
            raise ValueError("size mismatch")
        return SymMat([[self[i, j] - other[i, j] for j in range(self.n)] for i in range(self.n)])

    def scale(self, c) -> "SymMat":
        return SymMat([[c * self[i, j] for j in range(self.n)] for i in range(self.n)])

    def matvec(self, x: Sequence) -> list:
        return [sum(self[i, j] * x[j] for j in range(self.n)) for i in range(self.n)]

    def quad(self, x: Sequence):
        mv = self.matvec(x)
        return sum(v * xv for v, xv in zip(mv, x))

    def to_float(self) -> "SymMat":
        return SymMat.from_numpy(self.to_numpy())

    # -- text format ----------------------------------------------------------

    def to_text(self) -> str:
        lines = [str(self.n)]
        for i in range(self.n):
            lines.append(" ".join(_format_scalar(self[i, j]) for j in range(self.n)))
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text: str) -> "SymMat":
        toks = text.split()
        if not toks:
            raise ValueError("empty matrix text")
        n = int(toks[0])
        need = n * n
        vals = toks[1:]
        if len(vals) != need:
            raise ValueError(f"expected {need} entries for n={n}, found {len(vals)}")
        entries = [_parse_scalar(t) for t in vals]
        if any(isinstance(v, float) for v in entries):
            entries = [float(v) for v in entries]
        rows = [entries[i * n : (i + 1) * n] for i in range(n)]
        return SymMat(rows)

    def sha256(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()


def _format_scalar(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(float(v))


# -- predicates and submatrices ------------------------------------------


def principal_submatrix(mat: SymMat, indices: Sequence[int]) -> SymMat:
    """Rows/columns of `indices` in increasing order."""
    idx = sorted(set(indices))
    if not idx:
        raise ValueError("index set must be nonempty")
    if idx[0] < 0 or idx[-1] >= mat.n:
        raise IndexError(f"index set {idx} out of range for n={mat.n}")
    return SymMat([[mat[i, j] for j in idx] for i in idx])


def entrywise_nonneg(mat: SymMat, tol=0) -> bool:
    """True iff every entry is >= -tol (tol 0 on the exact path)."""
    return all(mat[i, j] >= -tol for i in range(mat.n) for j in range(i + 1))


def entrywise_min(mat: SymMat):
    return min(mat[i, j] for i in range(mat.n) for j in range(i + 1))


# -- exact PSD test ---------------------------------------------------------


@dataclass(frozen=True)
class PsdResult:
    psd: bool
    # for PSD matrices: permutation, unit lower factor, pivot list (LDL^T)
    perm: tuple[int, ...] | None = None
    lower: tuple[tuple[Fraction, ...], ...] | None = None
    pivots: tuple[Fraction, ...] | None = None
    # for non-PSD matrices: exact vector with v^T M v < 0
    witness: tuple[Fraction, ...] | None = None


def psd_check_exact(mat: SymMat) -> PsdResult:
    """Exact PSD decision via LDL^T with greedy diagonal pivoting.

    A zero diagonal with a nonzero off-diagonal entry in the active
    submatrix yields an indefinite 2x2 block, hence a witness; this is
    what makes singular PSD matrices (boundary certificates) decidable.
    """
    if mat.kind != "exact":
        raise ValueError("psd_check_exact requires exact rational entries")
    n = mat.n
    a = [[Fraction(mat[i, j]) for j in range(n)] for i in range(n)]
    perm = list(range(n))
    lower = [[Fraction(0)] * n for _ in range(n)]
    pivots: list[Fraction] = []
    for k in range(n):
        # greedy pivot: largest remaining diagonal entry
        p = max(range(k, n), key=lambda i: a[i][i])
        if p != k:
            _swap_sym(a, k, p)
            perm[k], perm[p] = perm[p], perm[k]
            for col in range(k):
                lower[k][col], lower[p][col] = lower[p][col], lower[k][col]
        d = a[k][k]
        if d < 0:
            return PsdResult(False, witness=_pullback(lower, perm, n, {k: Fraction(1)}))
        if d == 0:
            off = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
            if off is None:
                # remaining diagonal is <= 0 here only if exactly 0 row
                lower[k][k] = Fraction(1)
                pivots.append(Fraction(0))
                continue
            b = a[off][off]
            # y = t e_k + e_off with 2 t a_koff + b = -1
            t = -(b + 1) / (2 * a[k][off])
            return PsdResult(
                False, witness=_pullback(lower, perm, n, {k: t, off: Fraction(1)})
            )
        lower[k][k] = Fraction(1)
        pivots.append(d)
        for i in range(k + 1, n):
            lower[i][k] = a[i][k] / d
        for i in range(k + 1, n):
            li = lower[i][k]
            if li == 0:
                continue
            for j in range(k + 1, i + 1):
                a[i][j] -= li * d * lower[j][k]
                a[j][i] = a[i][j]
    return PsdResult(
        True,
        perm=tuple(perm),
        lower=tuple(tuple(row) for row in lower),
        pivots=tuple(pivots),
    )


def _swap_sym(a: list[list[Fraction]], i: int, j: int) -> None:
    a[i], a[j] = a[j], a[i]
    for row in a:
        row[i], row[j] = row[j], row[i]


def _pullback(lower, perm, n, reduced: dict[int, Fraction]) -> tuple[Fraction, ...]:
    """Map a vector on the reduced (eliminated) coordinates back to x.

    Solves L^T z = y for the filled-in columns so that z^T (P M P^T) z
    equals y^T A_reduced y, then undoes the permutation.
    """
    z = [Fraction(0)] * n
    kmax = max(reduced)
    for i in range(kmax, -1, -1):
        s = reduced.get(i, Fraction(0))
        s -= sum(lower[j][i] * z[j] for j in range(i + 1, kmax + 1))
        z[i] = s
    out = [Fraction(0)] * n
    for pos, orig in enumerate(perm):
        out[orig] = z[pos]
    return tuple(out)


# -- float smallest eigenvalue (cyclic Jacobi) -------------------------------


def min_eig_estimate(mat: SymMat, tol: float = 1e-10, max_sweeps: int = 60) -> float:
    """Smallest eigenvalue via cyclic Jacobi rotations.

    Stops when the off-diagonal Frobenius norm drops below tol; raises
    RuntimeError if the sweep cap is hit first.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = mat.to_numpy()
    n = a.shape[0]
    if n == 1:
        return float(a[0, 0])
    mask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = float(np.sqrt(np.sum(a[mask] ** 2)))
        if off <= tol:
            return float(np.min(np.diag(a)))
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= tol / (n * n):
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
    raise RuntimeError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
