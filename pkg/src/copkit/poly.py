"""Exact sparse multivariate polynomials over the rationals.

A polynomial stores a map from exponent tuples to nonzero Fraction
coefficients, kept in graded lexicographic order so that equal
polynomials compare equal structurally.  All arithmetic is exact; no
floating point ever enters on this path.

The module also houses the expansion engine for products of the form
(x_1 + ... + x_n)^r * x^T M x, which drive the nonnegative-coefficient
cone tests and the zeta bounds.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

Exponent = tuple[int, ...]


def _grlex_key(e: Exponent) -> tuple:
    return (sum(e), tuple(-v for v in e))


def _canonical(nvars: int, terms: Mapping[Exponent, Fraction]) -> dict[Exponent, Fraction]:
    clean = {}
    for e, c in terms.items():
        if c == 0:
            continue
        if len(e) != nvars or any(v < 0 for v in e):
            raise ValueError(f"bad exponent {e} for {nvars} variables")
        clean[e] = c
    return {e: clean[e] for e in sorted(clean, key=_grlex_key)}


class Polynomial:
    """Immutable sparse polynomial in a fixed number of variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exponent, Fraction | int]):
        object.__setattr__(self, "nvars", nvars)
        frac_terms = {tuple(e): Fraction(c) for e, c in terms.items()}
        object.__setattr__(self, "terms", _canonical(nvars, frac_terms))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero(nvars: int) -> "Polynomial":
        return Polynomial(nvars, {})

    @staticmethod
    def constant(nvars: int, c) -> "Polynomial":
        return Polynomial(nvars, {(0,) * nvars: Fraction(c)})

    @staticmethod
    def variable(nvars: int, i: int) -> "Polynomial":
        if not 0 <= i < nvars:
            raise ValueError(f"variable index {i} out of range for {nvars} variables")
        e = [0] * nvars
        e[i] = 1
        return Polynomial(nvars, {tuple(e): Fraction(1)})

    @staticmethod
    def sum_of_variables(nvars: int) -> "Polynomial":
        return Polynomial(
            nvars,
            {tuple(1 if j == i else 0 for j in range(nvars)): Fraction(1) for i in range(nvars)},
        )

    @staticmethod
    def sum_of_squared_variables(nvars: int) -> "Polynomial":
        return Polynomial(
            nvars,
            {tuple(2 if j == i else 0 for j in range(nvars)): Fraction(1) for i in range(nvars)},
        )

    @staticmethod
    def from_terms(nvars: int, items: Iterable[tuple[Exponent, Fraction | int]]) -> "Polynomial":
        acc: dict[Exponent, Fraction] = {}
        for e, c in items:
            e = tuple(e)
            acc[e] = acc.get(e, Fraction(0)) + Fraction(c)
        return Polynomial(nvars, acc)

    # -- queries ---------------------------------------------------------

    def coefficient(self, e: Exponent) -> Fraction:
        return self.terms.get(tuple(e), Fraction(0))

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1 by convention."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def is_even_in_every_variable(self) -> bool:
        return all(v % 2 == 0 for e in self.terms for v in e)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.nvars, tuple(self.terms.items())))

    def __iter__(self) -> Iterator[tuple[Exponent, Fraction]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    # -- arithmetic -------------------------------------------------------

    def _check_compatible(self, other: "Polynomial") -> None:
        if self.nvars != other.nvars:
            raise ValueError(
                f"variable-count mismatch: {self.nvars} vs {other.nvars}"
            )

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check_compatible(other)
        acc = dict(self.terms)
        for e, c in other.terms.items():
            acc[e] = acc.get(e, Fraction(0)) + c
        return Polynomial(self.nvars, acc)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        self._check_compatible(other)
        acc = dict(self.terms)
        for e, c in other.terms.items():
            acc[e] = acc.get(e, Fraction(0)) - c
        return Polynomial(self.nvars, acc)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def scale(self, c) -> "Polynomial":
        c = Fraction(c)
        return Polynomial(self.nvars, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check_compatible(other)
        acc: dict[Exponent, Fraction] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(a + b for a, b in zip(ea, eb))
                acc[e] = acc.get(e, Fraction(0)) + ca * cb
        return Polynomial(self.nvars, acc)

    def __pow__(self, r: int) -> "Polynomial":
        if r < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while r:
            if r & 1:
                result = result * base
            base = base * base if r > 1 else base
            r >>= 1
        return result

    def substitute_squares(self) -> "Polynomial":
        """Replace every variable x_i by x_i^2 (exponents doubled)."""
        return Polynomial(
            self.nvars, {tuple(2 * v for v in e): c for e, c in self.terms.items()}
        )

    def eval(self, point: Sequence) -> Fraction | float:
        """Evaluate at a point; exact for Fraction/int coordinates."""
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        exact = all(isinstance(v, (int, Fraction)) for v in point)
        total = Fraction(0) if exact else 0.0
        for e, c in self.terms.items():
            term = c if exact else float(c)
            for v, k in zip(point, e):
                if k:
                    term *= v**k
            total += term
        return total

    # -- rendering --------------------------------------------------------

    def render(self) -> str:
        """Text form "c x1^a1 x2^a2 ..." with one term per summand."""
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms.items():
            factors = [str(c)]
            for i, k in enumerate(e):
                if k == 1:
                    factors.append(f"x{i + 1}")
                elif k > 1:
                    factors.append(f"x{i + 1}^{k}")
            parts.append(" ".join(factors))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({self.nvars}, {self.render()!r})"


# -- forms attached to a symmetric matrix ---------------------------------


def quad_form(mat) -> Polynomial:
    """x^T M x as an exact polynomial: M_ii on x_i^2 and 2 M_ij on x_i x_j."""
    if mat.kind != "exact":
        raise ValueError("quad_form requires exact rational entries")
    n = mat.n
    terms: dict[Exponent, Fraction] = {}
    for i in range(n):
        for j in range(i, n):
            e = [0] * n
            e[i] += 1
            e[j] += 1
            c = mat[i, j] if i == j else 2 * mat[i, j]
            if c != 0:
                terms[tuple(e)] = Fraction(c)
    return Polynomial(n, terms)


def quartic_form(mat) -> Polynomial:
    """(x o x)^T M (x o x), the even quartic attached to M."""
    return quad_form(mat).substitute_squares()


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of `parts` naturals summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for rest in _compositions(total - head, parts - 1):
            yield (head, *rest)


def polya_coefficient(rows: Sequence[Sequence[Fraction]], r: int, beta: Exponent) -> Fraction:
    """Coefficient of x^beta (|beta| = r+2) in (sum_i x_i)^r x^T M x.

    Closed form: r! (beta^T M beta - sum_i M_ii beta_i) / prod_i beta_i!.
    """
    core = _polya_core(rows, beta)
    denom = 1
    for b in beta:
        denom *= math.factorial(b)
    return Fraction(math.factorial(r), denom) * core


def _polya_core(rows: Sequence[Sequence], beta: Exponent):
    support = [i for i, b in enumerate(beta) if b]
    quad = 0
    diag = 0
    for i in support:
        row = rows[i]
        bi = beta[i]
        s = 0
        for j in support:
            s += row[j] * beta[j]
        quad += bi * s
        diag += row[i] * bi
    return quad - diag


def polya_expand(mat, r: int, mode: str = "closed_form") -> Polynomial:
    """(x_1 + ... + x_n)^r * x^T M x, exactly.

    mode "closed_form" computes each coefficient directly; "convolution"
    multiplies out via repeated polynomial products.  The two must agree
    term by term (validated in the test suite).
    """
    if r < 0:
        raise ValueError("r must be a natural number")
    if mode == "convolution":
        return Polynomial.sum_of_variables(mat.n) ** r * quad_form(mat)
    if mode != "closed_form":
        raise ValueError(f"unknown mode {mode!r}")
    n = mat.n
    rows = mat.rows()
    rfact = math.factorial(r)
    terms: dict[Exponent, Fraction] = {}
    for beta in _compositions(r + 2, n):
        core = _polya_core(rows, beta)
        if core == 0:
            continue
        denom = 1
        for b in beta:
            if b > 1:
                denom *= math.factorial(b)
        terms[beta] = Fraction(rfact, denom) * core
    return Polynomial(n, terms)
