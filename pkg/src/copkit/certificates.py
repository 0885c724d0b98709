"""Certificate types, re-verification, rational rounding, JSON schema.

A certificate is re-verifiable data for a YES answer: Polya coefficient
lists, an SPN pair, the K1 block family, Gram blocks for the quartic SOS
test, Q-type blocks with cubic scalars, or simplex-Lasserre data.
Verification reconstructs the defining identity from scratch and reports
the worst identity residual and PSD margin; nothing is trusted from the
solver that produced the certificate.

Rounding maps a float certificate to rationals (continued fractions,
denominators below a bound), restores the identity constraints exactly
by orthogonal projection, and accepts only if exact verification
passes.  For boundary matrices the projection is sharpened with exact
kernel constraints derived from the zeros of x^T M x in the simplex:
any PSD part of a valid certificate must annihilate those zeros.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Sequence

import numpy as np

from . import _ratlin
from .poly import Exponent, Polynomial, polya_expand, quad_form, quartic_form
from .simplexopt import ZeroSet, simplex_minimize
from .symmat import SymMat, entrywise_min, min_eig_estimate, psd_check_exact

SCHEMA = "copkit/1"


@dataclass(frozen=True)
class PolyaCert:
    order: int
    coefficients: dict  # Exponent -> Fraction, full expansion


@dataclass(frozen=True)
class SpnCert:
    psd_part: SymMat
    nonneg_part: SymMat


@dataclass(frozen=True)
class K1Cert:
    blocks: tuple[SymMat, ...]  # one n x n block per index


@dataclass(frozen=True)
class SosCert:
    order: int
    classes: tuple[tuple[tuple[Exponent, ...], SymMat], ...]  # (basis, gram) per parity class


@dataclass(frozen=True)
class QrCert:
    order: int
    blocks: tuple[tuple[Exponent, SymMat], ...]  # (beta, n x n gram) per |beta| = r
    scalars: dict  # gamma (|gamma| = r+2) -> value


@dataclass(frozen=True)
class LasserreCert:
    order: int
    sigma0: tuple[tuple[Exponent, ...], SymMat]
    sigmas: tuple[tuple[tuple[Exponent, ...], SymMat], ...]  # one per variable
    q: dict  # exponent -> value, deg <= order - 1


Certificate = PolyaCert | SpnCert | K1Cert | SosCert | QrCert | LasserreCert

CONE_NAMES = {
    PolyaCert: "polya",
    SpnCert: "spn",
    K1Cert: "k1",
    SosCert: "sos",
    QrCert: "qr",
    LasserreCert: "lasserre",
}


def certificate_is_rational(cert: Certificate) -> bool:
    return all(m.kind == "exact" for m in _matrices(cert)) and all(
        isinstance(v, (int, Fraction)) for v in _scalars(cert)
    )


def _matrices(cert: Certificate) -> list[SymMat]:
    if isinstance(cert, PolyaCert):
        return []
    if isinstance(cert, SpnCert):
        return [cert.psd_part, cert.nonneg_part]
    if isinstance(cert, K1Cert):
        return list(cert.blocks)
    if isinstance(cert, SosCert):
        return [g for _, g in cert.classes]
    if isinstance(cert, QrCert):
        return [g for _, g in cert.blocks]
    if isinstance(cert, LasserreCert):
        return [cert.sigma0[1]] + [g for _, g in cert.sigmas]
    raise TypeError(f"not a certificate: {cert!r}")


def _scalars(cert: Certificate) -> list:
    if isinstance(cert, PolyaCert):
        return list(cert.coefficients.values())
    if isinstance(cert, QrCert):
        return list(cert.scalars.values())
    if isinstance(cert, LasserreCert):
        return list(cert.q.values())
    return []


# -- verification -------------------------------------------------------------


@dataclass(frozen=True)
class VerifyReport:
    passed: bool
    identity_residual: float
    psd_margin: float
    mode: str
    details: str = ""


def _gram_polynomial(nvars: int, basis: Sequence[Exponent], gram: SymMat, exact: bool):
    acc: dict[Exponent, object] = {}
    for a in range(len(basis)):
        for b in range(a, len(basis)):
            coeff = gram[a, b] if a == b else 2 * gram[a, b]
            if coeff == 0:
                continue
            e = tuple(x + y for x, y in zip(basis[a], basis[b]))
            acc[e] = acc.get(e, Fraction(0) if exact else 0.0) + coeff
    return acc


def _residual_from(identity: dict, target: dict) -> float:
    keys = set(identity) | set(target)
    z = 0
    worst = 0.0
    for k in keys:
        diff = identity.get(k, z) - target.get(k, z)
        worst = max(worst, abs(float(diff)))
    return worst


def _psd_margin(mats: Sequence[SymMat], exact: bool) -> float:
    worst = math.inf
    for m in mats:
        if exact:
            res = psd_check_exact(m)
            if not res.psd:
                q = m.quad(res.witness)
                nrm = sum(v * v for v in res.witness)
                worst = min(worst, float(q / nrm))
            else:
                worst = min(worst, 0.0 if 0 in res.pivots or len(res.pivots) < m.n else float(min(res.pivots)))
        else:
            worst = min(worst, min_eig_estimate(m, tol=1e-11))
    return worst if mats else math.inf


def verify_certificate(
    mat: SymMat, cert: Certificate, mode: str = "exact", tol: float = 1e-6
) -> VerifyReport:
    """Reconstruct the certificate's defining identity against `mat`.

    Exact mode demands rational data, a zero residual, exact PSD blocks
    and exact scalar sign conditions.  Float mode compares within `tol`.
    """
    if mode not in ("exact", "float"):
        raise ValueError(f"bad mode {mode!r}")
    exact = mode == "exact"
    if exact and not (certificate_is_rational(cert) and mat.kind == "exact"):
        raise ValueError("exact verification requires rational certificate and matrix")
    n = mat.n

    if isinstance(cert, PolyaCert):
        expansion = polya_expand(mat, cert.order)
        stored = {tuple(e): Fraction(c) for e, c in cert.coefficients.items()}
        resid = _residual_from(stored, dict(expansion.terms))
        neg = min((c for c in stored.values()), default=Fraction(0))
        ok = resid == 0 and neg >= 0 if exact else resid <= tol and float(neg) >= -tol
        return VerifyReport(ok, float(resid), float(neg), mode)

    if isinstance(cert, SpnCert):
        resid = max(
            abs(float(mat[i, j] - cert.psd_part[i, j] - cert.nonneg_part[i, j]))
            for i in range(n)
            for j in range(i + 1)
        )
        margin = _psd_margin([cert.psd_part], exact)
        nmin = float(entrywise_min(cert.nonneg_part))
        if exact:
            ok = resid == 0 and margin >= 0 and nmin >= 0
        else:
            ok = resid <= tol and margin >= -tol and nmin >= -tol
        return VerifyReport(ok, resid, min(margin, nmin), mode)

    if isinstance(cert, K1Cert):
        if len(cert.blocks) != n:
            raise ValueError("K1 certificate needs one block per index")
        resid = 0.0
        for i in range(n):
            resid = max(resid, abs(float(cert.blocks[i][i, i] - mat[i, i])))
            for j in range(n):
                if j == i:
                    continue
                lhs = 2 * cert.blocks[i][i, j] + cert.blocks[j][i, i]
                rhs = 2 * mat[i, j] + mat[i, i]
                resid = max(resid, abs(float(lhs - rhs)))
        slack_min = math.inf
        for i, j, k in combinations_with_replacement(range(n), 3):
            if len({i, j, k}) < 3:
                continue
            lhs = cert.blocks[i][j, k] + cert.blocks[j][i, k] + cert.blocks[k][i, j]
            rhs = mat[i, j] + mat[i, k] + mat[j, k]
            slack_min = min(slack_min, float(rhs - lhs))
        margin = _psd_margin(list(cert.blocks), exact)
        if exact:
            ok = resid == 0 and margin >= 0 and slack_min >= 0
        else:
            ok = resid <= tol and margin >= -tol and slack_min >= -tol
        return VerifyReport(ok, resid, min(margin, slack_min), mode)

    if isinstance(cert, SosCert):
        exact_data = certificate_is_rational(cert) and mat.kind == "exact"
        if exact_data:
            target = Polynomial.sum_of_squared_variables(n) ** cert.order * quartic_form(mat)
            tdict: dict = dict(target.terms)
        else:
            tgt = Polynomial.sum_of_squared_variables(n) ** cert.order
            tdict = {}
            for e, c in tgt:
                for i in range(n):
                    for j in range(n):
                        mij = float(mat[i, j])
                        if mij == 0:
                            continue
                        e2 = list(e)
                        e2[i] += 2
                        e2[j] += 2
                        key = tuple(e2)
                        tdict[key] = tdict.get(key, 0.0) + float(c) * mij
        acc: dict = {}
        for basis, gram in cert.classes:
            part = _gram_polynomial(n, basis, gram, exact)
            for e, c in part.items():
                acc[e] = acc.get(e, Fraction(0) if exact else 0.0) + c
        resid = _residual_from(acc, tdict)
        margin = _psd_margin([g for _, g in cert.classes], exact)
        ok = (resid == 0 and margin >= 0) if exact else (resid <= tol and margin >= -tol)
        return VerifyReport(ok, resid, margin, mode)

    if isinstance(cert, QrCert):
        target = dict(polya_expand(mat, cert.order).terms) if mat.kind == "exact" else None
        if target is None:
            raise ValueError("Q-type verification needs a rational matrix")
        acc: dict = {}
        for beta, gram in cert.blocks:
            for i in range(n):
                for j in range(i, n):
                    coeff = gram[i, j] if i == j else 2 * gram[i, j]
                    if coeff == 0:
                        continue
                    e = list(beta)
                    e[i] += 1
                    e[j] += 1
                    key = tuple(e)
                    acc[key] = acc.get(key, Fraction(0) if exact else 0.0) + coeff
        for gamma, c in cert.scalars.items():
            key = tuple(gamma)
            acc[key] = acc.get(key, Fraction(0) if exact else 0.0) + c
        resid = _residual_from(acc, target)
        margin = _psd_margin([g for _, g in cert.blocks], exact)
        smin = min((float(v) for v in cert.scalars.values()), default=math.inf)
        if exact:
            ok = resid == 0 and margin >= 0 and smin >= 0
        else:
            ok = resid <= tol and margin >= -tol and smin >= -tol
        return VerifyReport(ok, resid, min(margin, smin), mode)

    if isinstance(cert, LasserreCert):
        if mat.kind != "exact":
            raise ValueError("Lasserre verification needs a rational matrix")
        target = dict(quad_form(mat).terms)
        acc: dict = {}
        zero = Fraction(0) if exact else 0.0

        def add(e: Exponent, c) -> None:
            acc[e] = acc.get(e, zero) + c

        for e, c in _gram_polynomial(n, cert.sigma0[0], cert.sigma0[1], exact).items():
            add(e, c)
        for i, (basis, gram) in enumerate(cert.sigmas):
            for e, c in _gram_polynomial(n, basis, gram, exact).items():
                e2 = list(e)
                e2[i] += 1
                add(tuple(e2), c)
        for e, c in cert.q.items():
            e = tuple(e)
            add(e, -c)
            for l in range(n):
                e2 = list(e)
                e2[l] += 1
                add(tuple(e2), c)
        resid = _residual_from(acc, target)
        margin = _psd_margin([cert.sigma0[1]] + [g for _, g in cert.sigmas], exact)
        ok = (resid == 0 and margin >= 0) if exact else (resid <= tol and margin >= -tol)
        return VerifyReport(ok, resid, margin, mode)

    raise TypeError(f"not a certificate: {cert!r}")


# -- rounding -----------------------------------------------------------------


def _limit(value, bound: int) -> Fraction:
    return Fraction(value).limit_denominator(bound)


def _squarefree_class(q: Fraction) -> tuple[int, Fraction] | None:
    """Write sqrt(q) = root * sqrt(core) with core squarefree.

    Returns (core, root) or None when factoring stalls.
    """
    if q == 0:
        return 1, Fraction(0)
    n = q.numerator * q.denominator
    core = 1
    root = Fraction(1, q.denominator)
    d = 2
    while d * d <= n:
        if n % d == 0:
            k = 0
            while n % d == 0:
                n //= d
                k += 1
            if k % 2:
                core *= d
            root *= d ** (k // 2)
        d += 1
        if d > 10**6:
            return None
    if n > 1:
        core *= n
    return core, root


def _sqrt_kernel_vectors(
    basis: Sequence[Exponent], zero: Sequence[Fraction]
) -> list[list[Fraction]] | None:
    """Vectors w with G w = 0 for any Gram certificate of a form vanishing
    at the square root of `zero`.

    The moment vector z_g = prod_i sqrt(u_i)^g_i splits over the square
    classes of u^g; each class yields one rational vector.  Returns None
    when a square class cannot be factored.
    """
    classes: dict[int, list[tuple[int, Fraction]]] = {}
    for pos, g in enumerate(basis):
        val = Fraction(1)
        ok = True
        for ui, gi in zip(zero, g):
            if gi == 0:
                continue
            if ui == 0:
                ok = False
                break
            val *= Fraction(ui) ** gi
        if not ok:
            continue
        sq = _squarefree_class(val)
        if sq is None:
            return None
        core, root = sq
        classes.setdefault(core, []).append((pos, root))
    out = []
    for members in classes.values():
        vec = [Fraction(0)] * len(basis)
        for pos, root in members:
            vec[pos] = root
        out.append(vec)
    return out


def _moment_vector(basis: Sequence[Exponent], point: Sequence[Fraction]) -> list[Fraction]:
    out = []
    for g in basis:
        val = Fraction(1)
        for ui, gi in zip(point, g):
            if gi:
                val *= Fraction(ui) ** gi
        out.append(val)
    return out


def _zero_samples(zs: ZeroSet, max_per_family: int = 4) -> list[tuple[Fraction, ...]]:
    samples = [tuple(z) for z in zs.finite_zeros]
    for fam in zs.infinite_families:
        samples.append(tuple(fam.point))
        count = 0
        for d in fam.directions:
            if count >= max_per_family:
                break
            step = None
            for pv, dv in zip(fam.point, d):
                if dv < 0:
                    cand = -Fraction(pv) / Fraction(dv) / 2
                    step = cand if step is None or cand < step else step
            if step is None or step == 0:
                step = Fraction(1, 2)
            samples.append(tuple(Fraction(p) + step * Fraction(v) for p, v in zip(fam.point, d)))
            count += 1
    return samples


@dataclass
class _RepairSpec:
    """One Gram-plus-scalars repair problem in entry coordinates.

    blocks: per block the float Gram values; rows: affine identity
    constraints over entry keys ("B", bi, i, j) with i <= j and scalar
    keys ("s", key); kernels: per block, exact vectors every valid
    certificate must annihilate; zero_scalars: scalar keys forced to 0.
    """

    blocks: list  # list of (size, float 2d values)
    scalars: dict  # key -> float value
    rows: list  # list of (dict var_key -> Fraction, Fraction rhs)
    kernels: dict  # block index -> list of exact vectors
    zero_scalars: set


REPAIR_VARIABLE_CAP = 4000
REPAIR_LSQ_CAP = 1200


def _repair(spec: _RepairSpec, bound: int):
    """Round, then restore the affine rows exactly.

    Blocks with kernel vectors are reparametrized over a rational basis
    of the kernel's orthogonal complement; a valid boundary certificate
    is strictly interior in those coordinates, which is what lets plain
    rounding survive the PSD requirement.  Returns (block matrices,
    scalar values) or None.
    """
    nblocks = len(spec.blocks)
    bases: list[list[list[Fraction]] | None] = []
    for bi, (size, values) in enumerate(spec.blocks):
        kern = spec.kernels.get(bi)
        if not kern:
            bases.append(None)
            continue
        sol = _ratlin.solve_affine(kern, [0] * len(kern))
        if sol is None:
            return None
        basis = sol[1]
        if not basis:
            # kernel is everything: block forced to zero
            basis = []
        bases.append(basis)

    # variable layout
    index: dict = {}
    values: list[Fraction] = []

    def add_var(key, val: Fraction) -> int:
        index[key] = len(values)
        values.append(val)
        return index[key]

    for bi, (size, gvals) in enumerate(spec.blocks):
        basis = bases[bi]
        if basis is None:
            for i in range(size):
                for j in range(i, size):
                    add_var(("B", bi, i, j), _limit(gvals[i][j], bound))
        else:
            d = len(basis)
            # float reduced coordinates via least squares on U ghat U^T = G
            if d:
                u = np.array([[float(v) for v in vec] for vec in basis]).T  # size x d
                g = np.array([[float(gvals[i][j]) for j in range(size)] for i in range(size)])
                pinv = np.linalg.pinv(u)
                ghat = pinv @ g @ pinv.T
                for p in range(d):
                    for q in range(p, d):
                        add_var(("H", bi, p, q), _limit(0.5 * (ghat[p, q] + ghat[q, p]), bound))
    for key, val in spec.scalars.items():
        if key in spec.zero_scalars:
            continue
        add_var(("s", key), _limit(val, bound))
    if len(values) > REPAIR_VARIABLE_CAP:
        return None

    # rewrite affine rows over the reduced variables
    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    for coeffs, r in spec.rows:
        row: dict[int, Fraction] = {}
        for key, c in coeffs.items():
            if key[0] == "s":
                if key[1] in spec.zero_scalars:
                    continue
                pos = index.get(("s", key[1]))
                if pos is None:
                    return None
                row[pos] = row.get(pos, Fraction(0)) + c
                continue
            _, bi, i, j = key
            basis = bases[bi]
            if basis is None:
                pos = index[("B", bi, i, j)]
                row[pos] = row.get(pos, Fraction(0)) + c
            else:
                d = len(basis)
                for p in range(d):
                    for q in range(p, d):
                        w = basis[p][i] * basis[q][j] + (
                            basis[q][i] * basis[p][j] if p != q else Fraction(0)
                        )
                        if w:
                            pos = index[("H", bi, p, q)]
                            row[pos] = row.get(pos, Fraction(0)) + c * w
        rows.append(row)
        rhs.append(Fraction(r))

    fixed = _restore_rows(values, rows, rhs)
    if fixed is None:
        return None

    # reconstruct entry-coordinate blocks
    out_blocks = []
    for bi, (size, _) in enumerate(spec.blocks):
        basis = bases[bi]
        if basis is None:
            rowsb = [
                [fixed[index[("B", bi, min(i, j), max(i, j))]] for j in range(size)]
                for i in range(size)
            ]
        else:
            d = len(basis)
            rowsb = [[Fraction(0)] * size for _ in range(size)]
            for p in range(d):
                for q in range(d):
                    pp, qq = min(p, q), max(p, q)
                    h = fixed[index[("H", bi, pp, qq)]] if d else Fraction(0)
                    if h == 0:
                        continue
                    for i in range(size):
                        bpi = basis[p][i]
                        if bpi == 0:
                            continue
                        for j in range(size):
                            rowsb[i][j] += h * bpi * basis[q][j]
        out_blocks.append(SymMat(rowsb))
    out_scalars = {}
    for key in spec.scalars:
        if key in spec.zero_scalars:
            out_scalars[key] = Fraction(0)
        else:
            out_scalars[key] = fixed[index[("s", key)]]
    return out_blocks, out_scalars


def _restore_rows(values: list[Fraction], rows: list[dict[int, Fraction]], rhs: list[Fraction]):
    """Minimal-change exact solve of the affine rows.

    Rows touching disjoint variable sets are restored independently by
    orthogonal correction; otherwise one exact least-squares projection
    runs over the coupled subsystem.
    """
    touched: dict[int, list[int]] = {}
    for ridx, row in enumerate(rows):
        for pos in row:
            touched.setdefault(pos, []).append(ridx)
    coupled = set()
    for ridx, row in enumerate(rows):
        if any(len(touched[pos]) > 1 for pos in row):
            coupled.add(ridx)
    out = list(values)
    for ridx, row in enumerate(rows):
        if ridx in coupled or not row:
            continue
        resid = sum(c * out[pos] for pos, c in row.items()) - rhs[ridx]
        if resid == 0:
            continue
        denom = sum(c * c for c in row.values())
        for pos, c in row.items():
            out[pos] -= resid * c / denom
    if coupled:
        seen = set()
        sub_rows = []
        sub_rhs = []
        for r in sorted(coupled):
            sig = (tuple(sorted(rows[r].items())), rhs[r])
            if sig in seen:
                continue
            seen.add(sig)
            sub_rows.append(rows[r])
            sub_rhs.append(rhs[r])
        vars_involved = sorted({pos for row in sub_rows for pos in row})
        if len(vars_involved) > REPAIR_LSQ_CAP:
            return None
        remap = {pos: k for k, pos in enumerate(vars_involved)}
        dense = []
        for row in sub_rows:
            vec = [Fraction(0)] * len(vars_involved)
            for pos, c in row.items():
                vec[remap[pos]] = c
            dense.append(vec)
        point = [out[pos] for pos in vars_involved]
        proj = _ratlin.project_onto_affine(dense, sub_rhs, point)
        if proj is None:
            return None
        for pos, k in remap.items():
            out[pos] = proj[k]
    # empty rows with nonzero rhs mean the system cannot be met
    for row, r in zip(rows, rhs):
        if not row:
            resid_ok = r == 0
            if not resid_ok:
                return None
    return out


def _kernel_zeroset(mat: SymMat, kernel) -> ZeroSet | None:
    if kernel is None:
        return None
    if isinstance(kernel, ZeroSet):
        return kernel
    if kernel == "auto":
        if mat.kind != "exact" or mat.n > 12:
            return None
        minimum, zs = simplex_minimize(mat)
        return zs if minimum == 0 else None
    raise ValueError(f"bad kernel spec {kernel!r}")


def _entry_rows_k1(mat: SymMat):
    n = mat.n
    rows = []
    for i in range(n):
        rows.append(({("B", i, i, i): Fraction(1)}, mat[i, i]))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            coeffs = {("B", i, min(i, j), max(i, j)): Fraction(2)}
            key = ("B", j, i, i)
            coeffs[key] = coeffs.get(key, Fraction(0)) + 1
            rows.append((coeffs, 2 * mat[i, j] + mat[i, i]))
    return rows


def _spec_for(mat: SymMat, cert: Certificate, zs: ZeroSet | None) -> _RepairSpec | None:
    n = mat.n
    samples = _zero_samples(zs) if zs is not None else []

    if isinstance(cert, SpnCert):
        blocks = [(n, cert.psd_part.rows())]
        rows = []
        kernels: dict[int, list] = {}
        zero_scalars: set = set()
        for u in samples:
            kernels.setdefault(0, []).append([Fraction(v) for v in u])
            support = [i for i, v in enumerate(u) if v != 0]
            for i in support:
                for j in support:
                    if i <= j:
                        rows.append(({("B", 0, i, j): Fraction(1)}, mat[i, j]))
        return _RepairSpec(blocks, {}, rows, kernels, zero_scalars)

    if isinstance(cert, K1Cert):
        blocks = [(n, b.rows()) for b in cert.blocks]
        rows = _entry_rows_k1(mat)
        kernels = {}
        for u in samples:
            support = [i for i, v in enumerate(u) if v != 0]
            for l in support:
                kernels.setdefault(l, []).append([Fraction(v) for v in u])
            for i, j, k in combinations_with_replacement(support, 3):
                if len({i, j, k}) < 3:
                    continue
                coeffs: dict = {}
                for (l, a, b) in ((i, j, k), (j, i, k), (k, i, j)):
                    key = ("B", l, min(a, b), max(a, b))
                    coeffs[key] = coeffs.get(key, Fraction(0)) + 1
                rows.append((coeffs, mat[i, j] + mat[i, k] + mat[j, k]))
        return _RepairSpec(blocks, {}, rows, kernels, set())

    if isinstance(cert, SosCert):
        target = Polynomial.sum_of_squared_variables(n) ** cert.order * quartic_form(mat)
        blocks = []
        rows_by_gamma: dict[Exponent, dict] = {}
        kernels = {}
        for ci, (basis, gram) in enumerate(cert.classes):
            blocks.append((len(basis), gram.rows()))
            for a in range(len(basis)):
                for b in range(a, len(basis)):
                    gamma = tuple(x + y for x, y in zip(basis[a], basis[b]))
                    row = rows_by_gamma.setdefault(gamma, {})
                    key = ("B", ci, a, b)
                    row[key] = row.get(key, Fraction(0)) + (1 if a == b else 2)
            for u in samples:
                vecs = _sqrt_kernel_vectors(basis, u)
                if vecs is None:
                    continue
                for vec in vecs:
                    if any(v != 0 for v in vec):
                        kernels.setdefault(ci, []).append(vec)
        rows = [(row, target.coefficient(g)) for g, row in sorted(rows_by_gamma.items())]
        return _RepairSpec(blocks, {}, rows, kernels, set())

    if isinstance(cert, QrCert):
        target = polya_expand(mat, cert.order)
        blocks = []
        rows_by_gamma = {}
        kernels = {}
        scalars = {tuple(g): float(v) for g, v in cert.scalars.items()}
        zero_scalars = set()
        for bi, (beta, gram) in enumerate(cert.blocks):
            blocks.append((n, gram.rows()))
            for i in range(n):
                for j in range(i, n):
                    e = list(beta)
                    e[i] += 1
                    e[j] += 1
                    gamma = tuple(e)
                    row = rows_by_gamma.setdefault(gamma, {})
                    key = ("B", bi, i, j)
                    row[key] = row.get(key, Fraction(0)) + (1 if i == j else 2)
        for gamma in scalars:
            row = rows_by_gamma.setdefault(gamma, {})
            key = ("s", gamma)
            row[key] = row.get(key, Fraction(0)) + 1
        for u in samples:
            support = {i for i, v in enumerate(u) if v != 0}
            for bi, (beta, _) in enumerate(cert.blocks):
                if {i for i, b in enumerate(beta) if b} <= support:
                    kernels.setdefault(bi, []).append([Fraction(v) for v in u])
            for gamma in scalars:
                if {i for i, g in enumerate(gamma) if g} <= support:
                    zero_scalars.add(gamma)
        rows = [(row, target.coefficient(g)) for g, row in sorted(rows_by_gamma.items())]
        return _RepairSpec(blocks, scalars, rows, kernels, zero_scalars)

    if isinstance(cert, LasserreCert):
        target = quad_form(mat)
        basis_list = [cert.sigma0[0]] + [basis for basis, _ in cert.sigmas]
        gram_list = [cert.sigma0[1]] + [g for _, g in cert.sigmas]
        blocks = [(len(b), g.rows()) for b, g in zip(basis_list, gram_list)]
        scalars = {tuple(e): float(v) for e, v in cert.q.items()}
        rows_by_gamma = {}

        def bump(gamma, key, c):
            row = rows_by_gamma.setdefault(gamma, {})
            row[key] = row.get(key, Fraction(0)) + c

        for a in range(len(basis_list[0])):
            for b in range(a, len(basis_list[0])):
                gamma = tuple(x + y for x, y in zip(basis_list[0][a], basis_list[0][b]))
                bump(gamma, ("B", 0, a, b), Fraction(1 if a == b else 2))
        for i in range(n):
            basis = basis_list[1 + i]
            for a in range(len(basis)):
                for b in range(a, len(basis)):
                    e = [x + y for x, y in zip(basis[a], basis[b])]
                    e[i] += 1
                    bump(tuple(e), ("B", 1 + i, a, b), Fraction(1 if a == b else 2))
        for e in scalars:
            bump(tuple(e), ("s", tuple(e)), Fraction(-1))
            for l in range(n):
                e2 = list(e)
                e2[l] += 1
                bump(tuple(e2), ("s", tuple(e)), Fraction(1))
        kernels = {}
        for u in samples:
            point = [Fraction(v) for v in u]
            kernels.setdefault(0, []).append(_moment_vector(basis_list[0], point))
            for i in range(n):
                if point[i] != 0:
                    kernels.setdefault(1 + i, []).append(_moment_vector(basis_list[1 + i], point))
        rows = [(row, target.coefficient(g)) for g, row in sorted(rows_by_gamma.items())]
        return _RepairSpec(blocks, scalars, rows, kernels, set())

    return None


def _rebuild(cert: Certificate, blocks: list[SymMat], scalars: dict) -> Certificate:
    if isinstance(cert, SpnCert):
        raise AssertionError("SpnCert is rebuilt by the caller")
    if isinstance(cert, K1Cert):
        return K1Cert(tuple(blocks))
    if isinstance(cert, SosCert):
        return SosCert(cert.order, tuple((basis, b) for (basis, _), b in zip(cert.classes, blocks)))
    if isinstance(cert, QrCert):
        return QrCert(
            cert.order,
            tuple((beta, b) for (beta, _), b in zip(cert.blocks, blocks)),
            {g: scalars[tuple(g)] for g in scalars},
        )
    if isinstance(cert, LasserreCert):
        sigma0 = (cert.sigma0[0], blocks[0])
        sigmas = tuple((basis, blocks[1 + i]) for i, (basis, _) in enumerate(cert.sigmas))
        return LasserreCert(cert.order, sigma0, sigmas, dict(scalars))
    raise TypeError(f"cannot rebuild {type(cert).__name__}")


def round_certificate(
    mat: SymMat,
    cert: Certificate,
    denominator_bound: int = 10**6,
    kernel="auto",
) -> Certificate | None:
    """Round a float certificate to an exactly-verifying rational one.

    Escalates through denominator bounds; each stage restores the
    identity constraints exactly and (for boundary matrices) works in
    the coordinates orthogonal to the forced Gram kernel.  Returns None
    when no stage survives exact verification.
    """
    if mat.kind != "exact":
        raise ValueError("rounding needs a rational target matrix")
    if isinstance(cert, PolyaCert):
        return cert if certificate_is_rational(cert) else None
    zs = _kernel_zeroset(mat, kernel)
    bounds = [b for b in (1, 16, 256, 10**4, 10**6, 10**9) if b <= denominator_bound]
    if not bounds or bounds[-1] != denominator_bound:
        bounds.append(denominator_bound)
    # first pass without kernel machinery (cheap; wins on interior and
    # integer-certificate cases), then the kernel-aware pass
    for use_kernel in (False, True):
        if use_kernel and zs is None:
            break
        spec = _spec_for(mat, cert, zs if use_kernel else None)
        if spec is None:
            return None
        for bound in bounds:
            repaired = _repair(spec, bound)
            if repaired is None:
                continue
            blocks, scalars = repaired
            if isinstance(cert, SpnCert):
                candidate: Certificate = SpnCert(blocks[0], mat.sub(blocks[0]))
            else:
                candidate = _rebuild(cert, blocks, scalars)
            if verify_certificate(mat, candidate, mode="exact").passed:
                return candidate
    return None


# -- JSON serialization -------------------------------------------------------


def _scalar_to_json(v):
    if isinstance(v, (int, Fraction)):
        f = Fraction(v)
        return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
    return float(v)


def _scalar_from_json(v):
    if isinstance(v, str):
        if "/" in v:
            a, b = v.split("/")
            return Fraction(int(a), int(b))
        return Fraction(int(v))
    return float(v)


def _mat_to_json(m: SymMat):
    return [[_scalar_to_json(m[i, j]) for j in range(m.n)] for i in range(m.n)]


def _mat_from_json(rows) -> SymMat:
    return SymMat([[_scalar_from_json(v) for v in row] for row in rows])


def certificate_to_json(cert: Certificate, mat: SymMat) -> dict:
    kind = CONE_NAMES[type(cert)]
    scalars = "rational" if certificate_is_rational(cert) else "float"
    data: dict
    if isinstance(cert, PolyaCert):
        data = {
            "coefficients": [[list(e), _scalar_to_json(c)] for e, c in cert.coefficients.items()]
        }
        order = cert.order
    elif isinstance(cert, SpnCert):
        data = {"psd_part": _mat_to_json(cert.psd_part), "nonneg_part": _mat_to_json(cert.nonneg_part)}
        order = 0
    elif isinstance(cert, K1Cert):
        data = {"blocks": [_mat_to_json(b) for b in cert.blocks]}
        order = 1
    elif isinstance(cert, SosCert):
        data = {
            "classes": [
                {"basis": [list(e) for e in basis], "gram": _mat_to_json(g)}
                for basis, g in cert.classes
            ]
        }
        order = cert.order
    elif isinstance(cert, QrCert):
        data = {
            "blocks": [{"beta": list(b), "gram": _mat_to_json(g)} for b, g in cert.blocks],
            "scalars": [[list(g), _scalar_to_json(c)] for g, c in cert.scalars.items()],
        }
        order = cert.order
    elif isinstance(cert, LasserreCert):
        data = {
            "sigma0": {"basis": [list(e) for e in cert.sigma0[0]], "gram": _mat_to_json(cert.sigma0[1])},
            "sigmas": [
                {"basis": [list(e) for e in basis], "gram": _mat_to_json(g)}
                for basis, g in cert.sigmas
            ],
            "q": [[list(e), _scalar_to_json(c)] for e, c in cert.q.items()],
        }
        order = cert.order
    else:
        raise TypeError(f"not a certificate: {cert!r}")
    return {
        "schema": SCHEMA,
        "cone": kind,
        "order": order,
        "matrix_sha": mat.sha256(),
        "scalars": scalars,
        "data": data,
    }


class SchemaError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


def certificate_from_json(obj: dict) -> tuple[Certificate, str]:
    """Parse and schema-check a certificate object.

    Returns (certificate, declared scalar mode); raises SchemaError with
    one message per offending field.
    """
    problems = []
    if not isinstance(obj, dict):
        raise SchemaError(["top level: expected a JSON object"])
    if obj.get("schema") != SCHEMA:
        problems.append(f"schema: expected {SCHEMA!r}")
    cone = obj.get("cone")
    if cone not in CONE_NAMES.values():
        problems.append(f"cone: unknown value {cone!r}")
    if not isinstance(obj.get("order"), int):
        problems.append("order: expected an integer")
    if not isinstance(obj.get("matrix_sha"), str):
        problems.append("matrix_sha: expected a string")
    if obj.get("scalars") not in ("rational", "float"):
        problems.append("scalars: expected 'rational' or 'float'")
    data = obj.get("data")
    if not isinstance(data, dict):
        problems.append("data: expected an object")
    if problems:
        raise SchemaError(problems)
    mode = "exact" if obj["scalars"] == "rational" else "float"
    try:
        if cone == "polya":
            coeffs = {tuple(e): _scalar_from_json(c) for e, c in data["coefficients"]}
            return PolyaCert(obj["order"], coeffs), mode
        if cone == "spn":
            return SpnCert(_mat_from_json(data["psd_part"]), _mat_from_json(data["nonneg_part"])), mode
        if cone == "k1":
            return K1Cert(tuple(_mat_from_json(b) for b in data["blocks"])), mode
        if cone == "sos":
            classes = tuple(
                (tuple(tuple(e) for e in cl["basis"]), _mat_from_json(cl["gram"]))
                for cl in data["classes"]
            )
            return SosCert(obj["order"], classes), mode
        if cone == "qr":
            blocks = tuple(
                (tuple(bl["beta"]), _mat_from_json(bl["gram"])) for bl in data["blocks"]
            )
            scalars = {tuple(g): _scalar_from_json(c) for g, c in data["scalars"]}
            return QrCert(obj["order"], blocks, scalars), mode
        if cone == "lasserre":
            sigma0 = (
                tuple(tuple(e) for e in data["sigma0"]["basis"]),
                _mat_from_json(data["sigma0"]["gram"]),
            )
            sigmas = tuple(
                (tuple(tuple(e) for e in s["basis"]), _mat_from_json(s["gram"]))
                for s in data["sigmas"]
            )
            q = {tuple(e): _scalar_from_json(c) for e, c in data["q"]}
            return LasserreCert(obj["order"], sigma0, sigmas, q), mode
    except (KeyError, TypeError, IndexError) as exc:
        raise SchemaError([f"data: malformed for cone {cone!r} ({exc})"]) from exc
    raise SchemaError([f"cone: unknown value {cone!r}"])


def save_certificate(path: str, cert: Certificate, mat: SymMat) -> None:
    with open(path, "w") as fh:
        json.dump(certificate_to_json(cert, mat), fh, indent=1)
        fh.write("\n")


def load_certificate(path: str) -> tuple[Certificate, str]:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError([f"json: {exc}"]) from exc
    return certificate_from_json(obj)
