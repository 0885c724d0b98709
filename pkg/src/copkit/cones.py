"""Membership tests for the inner approximations of the copositive cone.

Every SDP-backed test is posed as a margin maximization: the PSD blocks
of the feasibility system are shifted by -lambda*I and lambda is
maximized, so the optimum's sign decides membership.  Boundary matrices
land in an INCONCLUSIVE band around zero; for rational inputs the tests
then try to recover an exact YES by rounding the float certificate to
rationals and re-verifying exactly.

The nonnegative-coefficient test is fully exact and never inconclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np

from .certificates import (
    Certificate,
    K1Cert,
    LasserreCert,
    PolyaCert,
    QrCert,
    SosCert,
    SpnCert,
    round_certificate,
    verify_certificate,
)
from .poly import Exponent, Polynomial, polya_expand, quad_form, quartic_form, _compositions
from .sdp import LinFunc, SdpConfig, SdpProblem, margin_maximize
from .symmat import SymMat

DECISION_TOL = 1e-7


class CapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class Verdict:
    decision: str  # YES | NO | INCONCLUSIVE
    margin: float  # +/- inf for exact decisions, else the SDP margin
    certificate: Certificate | None = None
    refutation: dict | None = None
    solver_margin: float | None = None
    notes: tuple[str, ...] = ()

    @property
    def yes(self) -> bool:
        return self.decision == "YES"


@dataclass
class ConeConfig:
    decision_tol: float = DECISION_TOL
    sdp: SdpConfig = field(default_factory=SdpConfig)
    try_exact_upgrade: bool = True
    denominator_bound: int = 10**6


def _float_mat(arr: np.ndarray) -> SymMat:
    return SymMat.from_numpy(arr)


def _decide(
    mat: SymMat,
    lam: float,
    sol,
    make_cert,
    cfg: ConeConfig,
    kernel="auto",
) -> Verdict:
    notes: list[str] = list(sol.notes)
    worst = max(sol.primal_residual, sol.dual_residual, sol.gap)
    if sol.status != "optimal" and worst > 1e-6:
        notes.append(f"solver status {sol.status} (worst residual {worst:.2e})")
        return Verdict("INCONCLUSIVE", lam, solver_margin=lam, notes=tuple(notes))
    # widen the decision band by the solver's own sloppiness; the gap is
    # relative, so rescale it to the margin objective
    band = cfg.decision_tol
    if sol.status != "optimal":
        notes.append(f"loose solve ({sol.status}); decision band widened")
        band = max(band, 100.0 * sol.gap * (1.0 + 2.0 * abs(lam)))
    if lam < -band:
        return Verdict(
            "NO",
            lam,
            refutation={"dual_y": [float(v) for v in sol.y]},
            solver_margin=lam,
            notes=tuple(notes),
        )
    cert = make_cert(sol)
    if lam > band:
        report = verify_certificate(mat, cert, mode="float", tol=1e-6)
        if report.passed:
            return Verdict("YES", lam, certificate=cert, solver_margin=lam, notes=tuple(notes))
        # sloppy but strictly interior: prefer an exact certificate over a
        # float one that only meets a relaxed tolerance
        if cfg.try_exact_upgrade and mat.kind == "exact":
            exact = round_certificate(mat, cert, cfg.denominator_bound, kernel=kernel)
            if exact is not None:
                notes.append("exact certificate recovered by rounding")
                return Verdict("YES", lam, certificate=exact, solver_margin=lam, notes=tuple(notes))
        relaxed = max(1e-5, 1e-3 * lam)
        report = verify_certificate(mat, cert, mode="float", tol=relaxed)
        if report.passed:
            notes.append(
                f"certificate verified at relaxed tolerance {relaxed:.0e} "
                f"(residual {report.identity_residual:.2e})"
            )
            return Verdict("YES", lam, certificate=cert, solver_margin=lam, notes=tuple(notes))
        notes.append(f"float certificate failed re-verification ({report.identity_residual:.2e})")
        return Verdict("INCONCLUSIVE", lam, solver_margin=lam, notes=tuple(notes))
    # |lam| within the band: honest float answer is inconclusive; try the
    # exact recovery path for rational inputs
    if cfg.try_exact_upgrade and mat.kind == "exact":
        exact = round_certificate(mat, cert, cfg.denominator_bound, kernel=kernel)
        if exact is not None:
            notes.append("exact certificate recovered by rounding")
            return Verdict(
                "YES", math.inf, certificate=exact, solver_margin=lam, notes=tuple(notes)
            )
        notes.append("rounding failed; verdict stays inconclusive")
    return Verdict("INCONCLUSIVE", lam, solver_margin=lam, notes=tuple(notes))


# -- exact nonnegative-coefficient test ---------------------------------------


def c_membership(mat: SymMat, r: int, cfg: ConeConfig | None = None) -> Verdict:
    """Does (sum x_i)^r x^T M x have only nonnegative coefficients?  Exact."""
    if mat.kind != "exact":
        raise ValueError("the coefficient test runs on rational matrices only")
    expansion = polya_expand(mat, r)
    worst: tuple[Exponent, Fraction] | None = None
    for e, c in expansion:
        if c < 0 and (worst is None or c < worst[1]):
            worst = (e, c)
    if worst is None:
        return Verdict("YES", math.inf, certificate=PolyaCert(r, dict(expansion.terms)))
    return Verdict(
        "NO",
        -math.inf,
        refutation={"exponent": worst[0], "coefficient": worst[1]},
    )


# -- SPN / K0 ------------------------------------------------------------------


def _entry_value(mat: SymMat, i: int, j: int):
    return mat[i, j]


def spn_membership(mat: SymMat, cfg: ConeConfig | None = None) -> Verdict:
    """M = P + N with P PSD and N entrywise nonnegative (Parrilo order 0)."""
    cfg = cfg or ConeConfig()
    n = mat.n
    prob = SdpProblem(block_sizes=[n], nonneg_count=n * (n + 1) // 2)
    k = 0
    for i in range(n):
        for j in range(i, n):
            f = LinFunc()
            f.set_block(0, i, j, 1)
            f.set_nonneg(k, 1)
            prob.constraints.append((f, _entry_value(mat, i, j)))
            k += 1
    lam, sol = margin_maximize(prob, "all", cfg.sdp)

    def make_cert(s) -> SpnCert:
        p = _float_mat(s.blocks[0])
        return SpnCert(p, mat.to_float().sub(p))

    return _decide(mat, lam, sol, make_cert, cfg)


k0_membership = spn_membership


def k1_membership(mat: SymMat, cfg: ConeConfig | None = None) -> Verdict:
    """Block characterization of Parrilo's order-1 cone: PSD blocks P(i)
    with the four linear condition families tying them to M."""
    cfg = cfg or ConeConfig()
    n = mat.n
    prob = SdpProblem(block_sizes=[n] * n)
    slack = 0
    triples = [t for t in combinations_with_replacement(range(n), 3) if len(set(t)) == 3]
    prob.nonneg_count = len(triples)
    for i in range(n):
        f = LinFunc()
        f.set_block(i, i, i, 1)
        prob.constraints.append((f, mat[i, i]))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            f = LinFunc()
            f.set_block(i, i, j, 2)
            f.set_block(j, i, i, 1)
            prob.constraints.append((f, 2 * mat[i, j] + mat[i, i]))
    for (i, j, k) in triples:
        f = LinFunc()
        f.set_block(i, j, k, 1)
        f.set_block(j, i, k, 1)
        f.set_block(k, i, j, 1)
        f.set_nonneg(slack, 1)
        prob.constraints.append((f, mat[i, j] + mat[i, k] + mat[j, k]))
        slack += 1
    lam, sol = margin_maximize(prob, "all", cfg.sdp)

    def make_cert(s) -> K1Cert:
        return K1Cert(tuple(_float_mat(b) for b in s.blocks))

    return _decide(mat, lam, sol, make_cert, cfg)


# -- quartic SOS test (Parrilo order r) ----------------------------------------


def _parity_classes(basis: list[Exponent]) -> list[list[Exponent]]:
    groups: dict[tuple[int, ...], list[Exponent]] = {}
    for e in basis:
        groups.setdefault(tuple(v % 2 for v in e), []).append(e)
    return [groups[k] for k in sorted(groups)]


def _monomials(nvars: int, degree: int, exact_degree: bool) -> list[Exponent]:
    if exact_degree:
        return list(_compositions(degree, nvars))
    out: list[Exponent] = []
    for d in range(degree + 1):
        out.extend(_compositions(d, nvars))
    return out


@dataclass(frozen=True)
class SosOutcome:
    margin: float
    classes: tuple[tuple[tuple[Exponent, ...], SymMat], ...]
    status: str
    notes: tuple[str, ...]
    primal_residual: float
    dual_residual: float
    gap: float


def sos_feasibility(
    target: dict[Exponent, object],
    nvars: int,
    basis: list[Exponent],
    use_parity: bool,
    cfg: SdpConfig | None = None,
) -> SosOutcome:
    """Margin of the Gram feasibility system target = z^T G z over `basis`.

    With `use_parity` the Gram matrix is block-diagonalized over the
    exponent parity classes mod 2 (valid when the target is even in
    every variable: averaging any Gram certificate over the sign-flip
    group zeroes the cross-class entries and preserves PSD).
    """
    classes = _parity_classes(basis) if use_parity else [sorted(basis)]
    prob = SdpProblem(block_sizes=[len(cl) for cl in classes])
    rows: dict[Exponent, LinFunc] = {}
    for ci, cl in enumerate(classes):
        for a in range(len(cl)):
            for b in range(a, len(cl)):
                gamma = tuple(x + y for x, y in zip(cl[a], cl[b]))
                f = rows.setdefault(gamma, LinFunc())
                f.set_block(ci, a, b, 1 if a == b else 2)
    for gamma, f in sorted(rows.items()):
        prob.constraints.append((f, target.get(gamma, 0)))
    for gamma in target:
        if gamma not in rows and target[gamma] != 0:
            # target monomial unreachable from the basis: infeasible outright
            return SosOutcome(-math.inf, (), "unreachable_monomial", (), 0.0, 0.0, 0.0)
    lam, sol = margin_maximize(prob, "all", cfg)
    certs = tuple((tuple(cl), _float_mat(sol.blocks[ci])) for ci, cl in enumerate(classes))
    return SosOutcome(
        lam, certs, sol.status, sol.notes, sol.primal_residual, sol.dual_residual, sol.gap
    )


KR_MAX_ORDER = 3
KR_MAX_MATCHED = 4000


def kr_membership(mat: SymMat, r: int, cfg: ConeConfig | None = None) -> Verdict:
    """Is (sum x_i^2)^r (x o x)^T M (x o x) a sum of squares?"""
    cfg = cfg or ConeConfig()
    n = mat.n
    if r < 0:
        raise ValueError("order must be a natural number")
    if r > KR_MAX_ORDER:
        raise CapExceeded(f"quartic SOS test capped at order r <= {KR_MAX_ORDER}")
    matched = math.comb(n + r + 1, r + 2)
    if matched > KR_MAX_MATCHED:
        raise CapExceeded(
            f"basis would match {matched} monomials; cap is {KR_MAX_MATCHED}"
        )
    if mat.kind == "exact":
        target = Polynomial.sum_of_squared_variables(n) ** r * quartic_form(mat)
        tdict: dict[Exponent, object] = dict(target.terms)
    else:
        mult = Polynomial.sum_of_squared_variables(n) ** r
        tdict = {}
        for e, c in mult:
            for i in range(n):
                for j in range(n):
                    mij = float(mat[i, j])
                    if mij == 0.0:
                        continue
                    e2 = list(e)
                    e2[i] += 2
                    e2[j] += 2
                    key = tuple(e2)
                    tdict[key] = tdict.get(key, 0.0) + float(c) * mij
    basis = _monomials(n, r + 2, exact_degree=True)
    out = sos_feasibility(tdict, n, basis, use_parity=True, cfg=cfg.sdp)
    if out.status == "unreachable_monomial":
        return Verdict("NO", -math.inf, notes=("target has an unreachable monomial",))
    sol_like = _SosSolShim(out)

    def make_cert(s) -> SosCert:
        return SosCert(r, out.classes)

    return _decide(mat, out.margin, sol_like, make_cert, cfg)


class _SosSolShim:
    """Adapter so _decide can read solver health off an SosOutcome."""

    def __init__(self, out: SosOutcome):
        self.status = out.status
        self.notes = out.notes
        self.primal_residual = out.primal_residual
        self.dual_residual = out.dual_residual
        self.gap = out.gap
        self.y = []


def sos_check(p: Polynomial, cfg: ConeConfig | None = None) -> Verdict:
    """Is the polynomial a sum of squares?  Full monomial basis up to half
    degree (homogeneous basis for forms), parity blocks when p is even in
    every variable.  Near-zero margins trigger an exact Gram rounding
    attempt, so boundary cases like perfect squares still answer YES."""
    cfg = cfg or ConeConfig()
    deg = p.degree()
    if deg < 0:
        return Verdict("YES", math.inf, notes=("zero polynomial",))
    if deg % 2:
        return Verdict("NO", -math.inf, notes=("odd degree",))
    basis = _monomials(p.nvars, deg // 2, exact_degree=p.is_homogeneous())
    out = sos_feasibility(
        dict(p.terms), p.nvars, basis, use_parity=p.is_even_in_every_variable(), cfg=cfg.sdp
    )
    lam = out.margin
    clean = out.status == "optimal" or max(out.primal_residual, out.dual_residual, out.gap) <= 1e-6
    band = cfg.decision_tol if out.status == "optimal" else max(
        cfg.decision_tol, 100.0 * out.gap * (1.0 + 2.0 * abs(lam))
    )
    if clean and lam < -band:
        return Verdict("NO", lam, solver_margin=lam, notes=out.notes)
    if clean and lam > band:
        return Verdict("YES", lam, solver_margin=lam, notes=out.notes)
    if cfg.try_exact_upgrade and lam > -1e-5:
        exact = _exact_gram_rounding(p, out.classes, cfg.denominator_bound)
        if exact is not None:
            return Verdict(
                "YES",
                math.inf,
                solver_margin=lam,
                notes=(*out.notes, "exact rational Gram decomposition found"),
            )
    return Verdict("INCONCLUSIVE", lam, solver_margin=lam, notes=out.notes)


def _exact_gram_rounding(p: Polynomial, classes, denominator_bound: int):
    """Round Gram blocks to rationals and repair the identity exactly.

    The coefficient-matching rows touch disjoint Gram positions per
    monomial, so each row is restored independently by orthogonal
    correction; exact PSD of every block then settles YES."""
    from .symmat import psd_check_exact

    for bound in (1, 16, 256, 10**4, denominator_bound):
        blocks = []
        for cl_basis, gram in classes:
            k = len(cl_basis)
            entries = [
                [Fraction(float(gram[i, j])).limit_denominator(bound) for j in range(k)]
                for i in range(k)
            ]
            blocks.append((cl_basis, entries))
        positions: dict[Exponent, list[tuple[int, int, int, int]]] = {}
        for ci, (cl_basis, entries) in enumerate(blocks):
            for a in range(len(cl_basis)):
                for b in range(a, len(cl_basis)):
                    gamma = tuple(x + y for x, y in zip(cl_basis[a], cl_basis[b]))
                    positions.setdefault(gamma, []).append((ci, a, b, 1 if a == b else 2))
        ok = True
        for gamma, pos in positions.items():
            tgt = p.coefficient(gamma)
            cur = sum(Fraction(m) * blocks[ci][1][a][b] for ci, a, b, m in pos)
            delta = tgt - cur
            if delta == 0:
                continue
            denom = sum(m * m for _, _, _, m in pos)
            for ci, a, b, m in pos:
                blocks[ci][1][a][b] += Fraction(m, denom) * delta
                if a != b:
                    blocks[ci][1][b][a] = blocks[ci][1][a][b]
        for gamma, c in p.terms.items():
            if gamma not in positions and c != 0:
                ok = False
        if not ok:
            return None
        mats = [SymMat(entries) for _, entries in blocks]
        if all(psd_check_exact(m).psd for m in mats):
            return [(cl, m) for (cl, _), m in zip(blocks, mats)]
    return None


# -- Q-type cones ---------------------------------------------------------------


QR_MAX_ORDER = 3
QR_MAX_BLOCKS = 128


def qr_membership(mat: SymMat, r: int, cfg: ConeConfig | None = None) -> Verdict:
    """(sum x_i)^r x^T M x = sum_{|beta|=r} x^beta sigma_beta + cubic-free
    remainder with nonnegative coefficients; sigma_beta quadratic SOS."""
    cfg = cfg or ConeConfig()
    if mat.kind != "exact":
        raise ValueError("the Q-type test runs on rational matrices only")
    n = mat.n
    if r < 0:
        raise ValueError("order must be a natural number")
    if r > QR_MAX_ORDER:
        raise CapExceeded(f"Q-type test capped at order r <= {QR_MAX_ORDER}")
    betas = list(_compositions(r, n))
    if len(betas) > QR_MAX_BLOCKS:
        raise CapExceeded(f"{len(betas)} multiplier blocks exceed cap {QR_MAX_BLOCKS}")
    gammas = list(_compositions(r + 2, n))
    target = polya_expand(mat, r)
    prob = SdpProblem(block_sizes=[n] * len(betas), nonneg_count=len(gammas))
    gamma_pos = {g: k for k, g in enumerate(gammas)}
    rows: dict[Exponent, LinFunc] = {}
    for bi, beta in enumerate(betas):
        for i in range(n):
            for j in range(i, n):
                e = list(beta)
                e[i] += 1
                e[j] += 1
                gamma = tuple(e)
                f = rows.setdefault(gamma, LinFunc())
                f.set_block(bi, i, j, 1 if i == j else 2)
    for gamma in gammas:
        f = rows.setdefault(gamma, LinFunc())
        f.set_nonneg(gamma_pos[gamma], 1)
    for gamma, f in sorted(rows.items()):
        prob.constraints.append((f, target.coefficient(gamma)))
    lam, sol = margin_maximize(prob, "all", cfg.sdp)

    def make_cert(s) -> QrCert:
        blocks = tuple((beta, _float_mat(s.blocks[bi])) for bi, beta in enumerate(betas))
        scalars = {g: float(s.nonneg[gamma_pos[g]]) for g in gammas}
        return QrCert(r, blocks, scalars)

    return _decide(mat, lam, sol, make_cert, cfg)


# -- simplex Lasserre cones -------------------------------------------------------


LAS_MAX_ORDER = 5


def las_simplex_membership(mat: SymMat, r: int, cfg: ConeConfig | None = None) -> Verdict:
    """x^T M x = sigma_0 + sum_i x_i sigma_i + q (sum_i x_i - 1) with
    sigma_0 in Sigma_r, sigma_i in Sigma_(r-1), deg q <= r-1, matched on
    all monomials of degree <= r."""
    cfg = cfg or ConeConfig()
    if mat.kind != "exact":
        raise ValueError("the simplex Lasserre test runs on rational matrices only")
    if r < 2:
        raise ValueError("the simplex Lasserre test needs order r >= 2")
    if r > LAS_MAX_ORDER:
        raise CapExceeded(f"simplex Lasserre test capped at order r <= {LAS_MAX_ORDER}")
    n = mat.n
    target = quad_form(mat)
    basis0 = _monomials(n, r // 2, exact_degree=False)
    basis_i = _monomials(n, (r - 1) // 2, exact_degree=False)
    q_monos = _monomials(n, r - 1, exact_degree=False)
    prob = SdpProblem(
        block_sizes=[len(basis0)] + [len(basis_i)] * n,
        free_count=len(q_monos),
    )
    rows: dict[Exponent, LinFunc] = {}

    def row(gamma: Exponent) -> LinFunc:
        return rows.setdefault(gamma, LinFunc())

    for a in range(len(basis0)):
        for b in range(a, len(basis0)):
            gamma = tuple(x + y for x, y in zip(basis0[a], basis0[b]))
            row(gamma).set_block(0, a, b, 1 if a == b else 2)
    for i in range(n):
        for a in range(len(basis_i)):
            for b in range(a, len(basis_i)):
                e = [x + y for x, y in zip(basis_i[a], basis_i[b])]
                e[i] += 1
                row(tuple(e)).set_block(1 + i, a, b, 1 if a == b else 2)
    for k, e in enumerate(q_monos):
        row(tuple(e)).set_free(k, -1)
        for l in range(n):
            e2 = list(e)
            e2[l] += 1
            row(tuple(e2)).set_free(k, 1)
    for gamma, f in sorted(rows.items()):
        prob.constraints.append((f, target.coefficient(gamma)))
    lam, sol = margin_maximize(prob, "all", cfg.sdp)

    def make_cert(s) -> LasserreCert:
        sigma0 = (tuple(basis0), _float_mat(s.blocks[0]))
        sigmas = tuple((tuple(basis_i), _float_mat(s.blocks[1 + i])) for i in range(n))
        q = {tuple(e): float(s.free[k]) for k, e in enumerate(q_monos)}
        return LasserreCert(r, sigma0, sigmas, q)

    return _decide(mat, lam, sol, make_cert, cfg)
