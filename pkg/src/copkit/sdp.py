"""Self-contained dense multi-block semidefinite programming.

Problems are stated over three variable groups: PSD matrix blocks,
nonnegative scalars, and free scalars, tied together by equality
constraints.  The solver is a primal-dual path-following method with
Nesterov-Todd scaling and a Mehrotra predictor-corrector step; the
Schur complement is formed densely and factored by Cholesky.  Free
scalars never enter the cone; they are carried through the reduced KKT
system as a small saddle block.

Every membership question in the cones module is posed through
`margin_maximize`: the designated PSD blocks X are replaced by X' with
X' - lambda*I >= 0 and lambda is maximized, so the sign of the optimum
decides feasibility without any infeasibility-ray machinery.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _ratlin

Entry = tuple[int, int]


@dataclass
class LinFunc:
    """Linear functional over all declared variables.

    Block coefficients read entries of the symmetric matrix variable:
    a coefficient c on (i, j) with i <= j contributes c * X_ij once
    (off-diagonal pairs are not double counted).
    """

    blocks: dict[int, dict[Entry, object]] = field(default_factory=dict)
    nonneg: dict[int, object] = field(default_factory=dict)
    free: dict[int, object] = field(default_factory=dict)

    def set_block(self, b: int, i: int, j: int, coeff) -> "LinFunc":
        key = (j, i) if i > j else (i, j)
        self.blocks.setdefault(b, {})[key] = self.blocks.get(b, {}).get(key, 0) + coeff
        return self

    def set_nonneg(self, k: int, coeff) -> "LinFunc":
        self.nonneg[k] = self.nonneg.get(k, 0) + coeff
        return self

    def set_free(self, k: int, coeff) -> "LinFunc":
        self.free[k] = self.free.get(k, 0) + coeff
        return self

    def is_rational(self) -> bool:
        vals = (
            list(self.nonneg.values())
            + list(self.free.values())
            + [v for blk in self.blocks.values() for v in blk.values()]
        )
        return all(isinstance(v, (int, Fraction)) for v in vals)


@dataclass
class SdpProblem:
    block_sizes: list[int]
    nonneg_count: int = 0
    free_count: int = 0
    constraints: list[tuple[LinFunc, object]] = field(default_factory=list)
    objective: LinFunc | None = None
    sense: str = "minimize"

    def validate(self) -> None:
        if any(s < 1 for s in self.block_sizes):
            raise ValueError("block sizes must be >= 1")
        if self.sense not in ("minimize", "maximize"):
            raise ValueError(f"bad sense {self.sense!r}")
        nvar = len(self.block_sizes) + self.nonneg_count + self.free_count
        if nvar == 0:
            raise ValueError("problem has no variables")
        funcs = [f for f, _ in self.constraints]
        if self.objective is not None:
            funcs.append(self.objective)
        for f in funcs:
            for b, entries in f.blocks.items():
                if not 0 <= b < len(self.block_sizes):
                    raise ValueError(f"undeclared block {b}")
                nb = self.block_sizes[b]
                for (i, j) in entries:
                    if not (0 <= i <= j < nb):
                        raise ValueError(f"bad entry ({i},{j}) for block of size {nb}")
            for k in f.nonneg:
                if not 0 <= k < self.nonneg_count:
                    raise ValueError(f"undeclared nonneg scalar {k}")
            for k in f.free:
                if not 0 <= k < self.free_count:
                    raise ValueError(f"undeclared free scalar {k}")

    def is_rational(self) -> bool:
        ok = all(f.is_rational() and isinstance(r, (int, Fraction)) for f, r in self.constraints)
        if self.objective is not None:
            ok = ok and self.objective.is_rational()
        return ok


@dataclass
class SdpConfig:
    tol_gap: float = 1e-8
    tol_feas: float = 1e-8
    max_iters: int = 120
    seed: int = 0


@dataclass
class SdpSolution:
    status: str  # optimal | max_iterations | numerical_failure
    blocks: list[np.ndarray]
    nonneg: np.ndarray
    free: np.ndarray
    y: np.ndarray
    dual_blocks: list[np.ndarray]
    dual_nonneg: np.ndarray
    objective: float
    iterations: int
    primal_residual: float = 0.0
    dual_residual: float = 0.0
    gap: float = 0.0
    notes: tuple[str, ...] = ()


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


class _Data:
    """Dense numeric form of an SdpProblem (internal)."""

    def __init__(self, p: SdpProblem, drop: list[int]):
        keep = [i for i in range(len(p.constraints)) if i not in drop]
        self.keep = keep
        m = len(keep)
        self.m = m
        self.sizes = list(p.block_sizes)
        self.p_nn = p.nonneg_count
        self.p_fr = p.free_count
        self.A_blocks = [np.zeros((m, nb, nb)) for nb in self.sizes]
        self.A_nn = np.zeros((m, self.p_nn))
        self.A_fr = np.zeros((m, self.p_fr))
        self.b = np.zeros(m)
        for row, ci in enumerate(keep):
            f, rhs = p.constraints[ci]
            self._fill(row, f)
            self.b[row] = float(rhs)
        self.c_blocks = [np.zeros((nb, nb)) for nb in self.sizes]
        self.c_nn = np.zeros(self.p_nn)
        self.c_fr = np.zeros(self.p_fr)
        sign = -1.0 if p.sense == "maximize" else 1.0
        self.obj_sign = sign
        if p.objective is not None:
            for bidx, entries in p.objective.blocks.items():
                for (i, j), v in entries.items():
                    v = sign * float(v)
                    if i == j:
                        self.c_blocks[bidx][i, i] += v
                    else:
                        self.c_blocks[bidx][i, j] += 0.5 * v
                        self.c_blocks[bidx][j, i] += 0.5 * v
            for k, v in p.objective.nonneg.items():
                self.c_nn[k] += sign * float(v)
            for k, v in p.objective.free.items():
                self.c_fr[k] += sign * float(v)
        self.scale = max(
            [1.0, float(np.max(np.abs(self.b)) if m else 0.0)]
            + [float(np.max(np.abs(Ab))) if Ab.size else 0.0 for Ab in self.A_blocks]
            + [float(np.max(np.abs(self.A_nn))) if self.A_nn.size else 0.0]
            + [float(np.max(np.abs(self.A_fr))) if self.A_fr.size else 0.0]
            + [float(np.max(np.abs(cb))) if cb.size else 0.0 for cb in self.c_blocks]
            + [float(np.max(np.abs(self.c_nn))) if self.c_nn.size else 0.0]
            + [float(np.max(np.abs(self.c_fr))) if self.c_fr.size else 0.0]
        )

    def _fill(self, row: int, f: LinFunc) -> None:
        for bidx, entries in f.blocks.items():
            for (i, j), v in entries.items():
                v = float(v)
                if i == j:
                    self.A_blocks[bidx][row, i, i] += v
                else:
                    self.A_blocks[bidx][row, i, j] += 0.5 * v
                    self.A_blocks[bidx][row, j, i] += 0.5 * v
        for k, v in f.nonneg.items():
            self.A_nn[row, k] += float(v)
        for k, v in f.free.items():
            self.A_fr[row, k] += float(v)

    # constraint operator and adjoint
    def apply(self, blocks, x_nn, x_fr) -> np.ndarray:
        out = np.zeros(self.m)
        for Ab, Xb in zip(self.A_blocks, blocks):
            out += np.tensordot(Ab.reshape(self.m, -1), Xb.reshape(-1), axes=(1, 0))
        if self.p_nn:
            out += self.A_nn @ x_nn
        if self.p_fr:
            out += self.A_fr @ x_fr
        return out

    def adjoint_blocks(self, y: np.ndarray) -> list[np.ndarray]:
        return [np.tensordot(y, Ab, axes=(0, 0)) for Ab in self.A_blocks]


def _presolve(p: SdpProblem) -> list[int]:
    """Indices of equality rows to drop (exact dependents).

    Rational data goes through exact elimination; float data through an
    incremental orthogonalization filter with threshold 1e-10.
    """
    m = len(p.constraints)
    if m <= 1:
        return []
    ncols = sum(nb * (nb + 1) // 2 for nb in p.block_sizes) + p.nonneg_count + p.free_count
    offs_block: list[int] = []
    off = 0
    for nb in p.block_sizes:
        offs_block.append(off)
        off += nb * (nb + 1) // 2

    def row_vector(f: LinFunc, conv):
        vec = [conv(0)] * ncols
        for bidx, entries in f.blocks.items():
            nb = p.block_sizes[bidx]
            for (i, j), v in entries.items():
                pos = offs_block[bidx] + i * nb - i * (i - 1) // 2 + (j - i)
                vec[pos] = conv(v)
        base = offs_block[-1] + p.block_sizes[-1] * (p.block_sizes[-1] + 1) // 2 if p.block_sizes else 0
        for k, v in f.nonneg.items():
            vec[base + k] = conv(v)
        for k, v in f.free.items():
            vec[base + p.nonneg_count + k] = conv(v)
        return vec

    if p.is_rational():
        rows = [row_vector(f, Fraction) for f, _ in p.constraints]
        rhs = [Fraction(r) for _, r in p.constraints]
        keep, consistent = _ratlin.independent_rows(rows, rhs)
        if not consistent:
            raise ValueError("equality constraints are inconsistent")
        drop = [i for i in range(m) if i not in set(keep)]
    else:
        arr = np.array([row_vector(f, float) for f, _ in p.constraints])
        drop = []
        basis: list[np.ndarray] = []
        for i in range(m):
            v = arr[i].copy()
            for u in basis:
                v -= (u @ v) * u
            nrm = float(np.linalg.norm(v))
            if nrm <= 1e-10 * max(1.0, float(np.linalg.norm(arr[i]))):
                drop.append(i)
            else:
                basis.append(v / nrm)
    if drop:
        warnings.warn(f"dropping {len(drop)} dependent equality row(s)", stacklevel=3)
    return drop


def _floor_eigs(lam: np.ndarray, what: str) -> np.ndarray:
    """Clamp roundoff-negative eigenvalues; genuine indefiniteness raises."""
    top = float(np.max(np.abs(lam))) if lam.size else 1.0
    if lam[0] <= -1e-8 * max(top, 1.0):
        raise FloatingPointError(f"{what} lost positive definiteness")
    return np.maximum(lam, 1e-15 * max(top, 1.0))


def _nt_scaling(X: np.ndarray, S: np.ndarray):
    """NT scaling point W with W S W = X, plus R = W^(1/2) and V = R S R."""
    lx, Qx = np.linalg.eigh(X)
    lx = _floor_eigs(lx, "primal block")
    X12 = (Qx * np.sqrt(lx)) @ Qx.T
    B = _sym(X12 @ S @ X12)
    lb, Qb = np.linalg.eigh(B)
    lb = _floor_eigs(lb, "dual block")
    Bm12 = (Qb * (lb**-0.5)) @ Qb.T
    W = _sym(X12 @ Bm12 @ X12)
    lw, Qw = np.linalg.eigh(W)
    lw = _floor_eigs(lw, "scaling matrix")
    R = (Qw * np.sqrt(lw)) @ Qw.T
    Rinv = (Qw * (lw**-0.5)) @ Qw.T
    V = _sym(R @ S @ R)
    return W, R, Rinv, V


def _lyap(V: np.ndarray, F: np.ndarray) -> np.ndarray:
    """Solve sym(T V) = F for symmetric T (V symmetric PD, F symmetric)."""
    lam, Q = np.linalg.eigh(V)
    Fh = Q.T @ F @ Q
    Th = 2.0 * Fh / (lam[:, None] + lam[None, :])
    return _sym(Q @ Th @ Q.T)


def _max_step_block(X: np.ndarray, dX: np.ndarray) -> float:
    """Largest t with X + t dX >= 0 (inf if unbounded)."""
    lam, Q = np.linalg.eigh(X)
    top = float(np.max(np.abs(lam))) if lam.size else 1.0
    lam = np.maximum(lam, 1e-15 * max(top, 1.0))
    scale = 1.0 / np.sqrt(lam)
    Y = (Q * scale).T @ dX @ (Q * scale)
    lam_min = float(np.linalg.eigvalsh(_sym(Y))[0])
    if lam_min >= -1e-14:
        return np.inf
    return -1.0 / lam_min


def _max_step_vec(x: np.ndarray, dx: np.ndarray) -> float:
    mask = dx < 0
    if not np.any(mask):
        return np.inf
    return float(np.min(-x[mask] / dx[mask]))


def solve(problem: SdpProblem, cfg: SdpConfig | None = None) -> SdpSolution:
    """Run the interior-point method; status "optimal" guarantees the
    recomputed residuals meet cfg tolerances."""
    cfg = cfg or SdpConfig()
    problem.validate()
    if not problem.constraints:
        raise ValueError("problem needs at least one equality constraint")
    drop = _presolve(problem)
    data = _Data(problem, drop)
    m = data.m
    nu = sum(data.sizes) + data.p_nn
    tau = 1.0 + data.scale

    X = [tau * np.eye(nb) for nb in data.sizes]
    S = [tau * np.eye(nb) for nb in data.sizes]
    x_nn = tau * np.ones(data.p_nn)
    s_nn = tau * np.ones(data.p_nn)
    x_fr = np.zeros(data.p_fr)
    y = np.zeros(m)
    if cfg.seed:
        rng = np.random.default_rng(cfg.seed)
        for b, nb in enumerate(data.sizes):
            X[b] += np.diag(1e-3 * tau * rng.uniform(0.5, 1.0, nb))
            S[b] += np.diag(1e-3 * tau * rng.uniform(0.5, 1.0, nb))
        if data.p_nn:
            x_nn += 1e-3 * tau * rng.uniform(0.5, 1.0, data.p_nn)
            s_nn += 1e-3 * tau * rng.uniform(0.5, 1.0, data.p_nn)

    status = "max_iterations"
    iters = 0
    notes: list[str] = []
    eta = 0.98
    best_merit = np.inf
    best_state = None

    for it in range(1, cfg.max_iters + 1):
        iters = it
        rp = data.b - data.apply(X, x_nn, x_fr)
        Aty = data.adjoint_blocks(y)
        Rd = [data.c_blocks[b] - Aty[b] - S[b] for b in range(len(data.sizes))]
        rd_nn = data.c_nn - (data.A_nn.T @ y) - s_nn if data.p_nn else np.zeros(0)
        rd_fr = data.c_fr - (data.A_fr.T @ y) if data.p_fr else np.zeros(0)

        compl = sum(float(np.sum(Xb * Sb)) for Xb, Sb in zip(X, S)) + float(x_nn @ s_nn)
        mu = compl / max(nu, 1)
        pobj = sum(float(np.sum(cb * Xb)) for cb, Xb in zip(data.c_blocks, X))
        pobj += float(data.c_nn @ x_nn) + float(data.c_fr @ x_fr)
        dobj = float(data.b @ y)

        pinf = float(np.max(np.abs(rp))) / (1.0 + float(np.max(np.abs(data.b))))
        dnorm = max([float(np.max(np.abs(R))) for R in Rd] + [0.0]) if Rd else 0.0
        if data.p_nn:
            dnorm = max(dnorm, float(np.max(np.abs(rd_nn))))
        if data.p_fr:
            dnorm = max(dnorm, float(np.max(np.abs(rd_fr))))
        dinf = dnorm / (1.0 + data.scale)
        gap = max(abs(pobj - dobj), compl) / (1.0 + abs(pobj) + abs(dobj))
        merit = max(pinf, dinf, gap)
        if merit < best_merit:
            best_merit = merit
            best_state = (
                [Xb.copy() for Xb in X],
                [Sb.copy() for Sb in S],
                x_nn.copy(),
                s_nn.copy(),
                x_fr.copy(),
                y.copy(),
            )
        elif merit > 100.0 * best_merit:
            # numerical breakdown past the achievable floor: keep the best
            status = "max_iterations"
            notes.append("stopped on divergence; best iterate returned")
            break
        if pinf <= cfg.tol_feas and dinf <= cfg.tol_feas and gap <= cfg.tol_gap:
            status = "optimal"
            break

        try:
            scalings = [_nt_scaling(X[b], S[b]) for b in range(len(data.sizes))]
        except FloatingPointError as exc:
            status = "numerical_failure"
            notes.append(str(exc))
            break
        wsq_nn = x_nn / s_nn if data.p_nn else np.zeros(0)
        v_nn = np.sqrt(x_nn * s_nn) if data.p_nn else np.zeros(0)

        # Schur complement over cone variables
        Smat = np.zeros((m, m))
        WAW = []
        for b, Ab in enumerate(data.A_blocks):
            W = scalings[b][0]
            T = np.einsum("ij,mjk,kl->mil", W, Ab, W, optimize=True)
            WAW.append(T)
            Smat += np.tensordot(
                Ab.reshape(m, -1), T.reshape(m, -1), axes=(1, 1)
            )
        if data.p_nn:
            Smat += (data.A_nn * wsq_nn) @ data.A_nn.T

        chol = None
        reg = 0.0
        base = float(np.trace(Smat)) / max(m, 1)
        for attempt in range(4):
            try:
                chol = np.linalg.cholesky(Smat + reg * np.eye(m))
                break
            except np.linalg.LinAlgError:
                reg = max(reg * 100.0, 1e-13 * max(base, 1.0))
        if chol is None:
            status = "numerical_failure"
            notes.append("Schur complement not positive definite")
            break

        def chol_solve(r: np.ndarray) -> np.ndarray:
            return np.linalg.solve(chol.T, np.linalg.solve(chol, r))

        def kkt_solve(r1: np.ndarray, r2: np.ndarray):
            # saddle system [S A_fr; A_fr^T 0]; solve by elimination and
            # polish with iterative refinement against the true blocks
            def once(q1, q2):
                w1 = chol_solve(q1)
                if data.p_fr == 0:
                    return w1, np.zeros(0)
                Z = chol_solve(data.A_fr)
                G = data.A_fr.T @ Z
                try:
                    dx_fr = np.linalg.solve(G, data.A_fr.T @ w1 - q2)
                except np.linalg.LinAlgError:
                    dx_fr = np.linalg.lstsq(G, data.A_fr.T @ w1 - q2, rcond=None)[0]
                return w1 - Z @ dx_fr, dx_fr

            dy, dx_fr = once(r1, r2)
            for _ in range(2):
                res1 = r1 - Smat @ dy
                if data.p_fr:
                    res1 -= data.A_fr @ dx_fr
                    res2 = r2 - data.A_fr.T @ dy
                else:
                    res2 = np.zeros(0)
                if max(
                    float(np.max(np.abs(res1))) if res1.size else 0.0,
                    float(np.max(np.abs(res2))) if res2.size else 0.0,
                ) <= 1e-11 * (1.0 + float(np.max(np.abs(r1)))):
                    break
                cy, cx = once(res1, res2)
                dy = dy + cy
                if data.p_fr:
                    dx_fr = dx_fr + cx
            return dy, dx_fr

        def newton(Rc_blocks, rc_nn):
            r1 = rp.copy()
            for b, Ab in enumerate(data.A_blocks):
                W = scalings[b][0]
                contrib = Rc_blocks[b] - W @ Rd[b] @ W
                r1 -= np.tensordot(Ab.reshape(m, -1), contrib.reshape(-1), axes=(1, 0))
            if data.p_nn:
                r1 -= data.A_nn @ (rc_nn - wsq_nn * rd_nn)
            dy, dx_fr = kkt_solve(r1, rd_fr)
            dAty = data.adjoint_blocks(dy)
            dS = [Rd[b] - dAty[b] for b in range(len(data.sizes))]
            dX = []
            for b in range(len(data.sizes)):
                W = scalings[b][0]
                dX.append(_sym(Rc_blocks[b] - W @ dS[b] @ W))
            ds_nn = rd_nn - (data.A_nn.T @ dy) if data.p_nn else np.zeros(0)
            dx_nn = rc_nn - wsq_nn * ds_nn if data.p_nn else np.zeros(0)
            return dX, dx_nn, dx_fr, dy, dS, ds_nn

        # predictor (affine direction)
        Rc_aff = []
        for b in range(len(data.sizes)):
            _, R, Rinv, V = scalings[b]
            T = _lyap(V, -(V @ V))
            Rc_aff.append(_sym(R @ T @ R))
        rc_aff = -x_nn if data.p_nn else np.zeros(0)
        aff = newton(Rc_aff, rc_aff)
        dXa, dxa_nn, dxa_fr, dya, dSa, dsa_nn = aff

        ap = min([1.0] + [_max_step_block(X[b], dXa[b]) for b in range(len(data.sizes))] + ([_max_step_vec(x_nn, dxa_nn)] if data.p_nn else []))
        ad = min([1.0] + [_max_step_block(S[b], dSa[b]) for b in range(len(data.sizes))] + ([_max_step_vec(s_nn, dsa_nn)] if data.p_nn else []))
        compl_aff = sum(
            float(np.sum((X[b] + ap * dXa[b]) * (S[b] + ad * dSa[b])))
            for b in range(len(data.sizes))
        )
        if data.p_nn:
            compl_aff += float((x_nn + ap * dxa_nn) @ (s_nn + ad * dsa_nn))
        mu_aff = max(compl_aff, 0.0) / max(nu, 1)
        sigma = min(max((mu_aff / mu) ** 3, 1e-10), 1.0 - 1e-10) if mu > 0 else 0.1

        # corrector
        Rc = []
        for b in range(len(data.sizes)):
            _, R, Rinv, V = scalings[b]
            dXt = Rinv @ dXa[b] @ Rinv
            dSt = R @ dSa[b] @ R
            E = _sym(dXt @ dSt)
            F = sigma * mu * np.eye(V.shape[0]) - V @ V - E
            T = _lyap(V, _sym(F))
            Rc.append(_sym(R @ T @ R))
        rc_nn = (
            (sigma * mu - x_nn * s_nn - dxa_nn * dsa_nn) / s_nn if data.p_nn else np.zeros(0)
        )
        dX, dx_nn, dx_fr, dy, dS, ds_nn = newton(Rc, rc_nn)

        ap = min([1.0] + [eta * _max_step_block(X[b], dX[b]) for b in range(len(data.sizes))] + ([eta * _max_step_vec(x_nn, dx_nn)] if data.p_nn else []))
        ad = min([1.0] + [eta * _max_step_block(S[b], dS[b]) for b in range(len(data.sizes))] + ([eta * _max_step_vec(s_nn, ds_nn)] if data.p_nn else []))
        if ap < 1e-10 and ad < 1e-10:
            status = "numerical_failure"
            notes.append("step lengths collapsed")
            break
        for b in range(len(data.sizes)):
            X[b] = _sym(X[b] + ap * dX[b])
            S[b] = _sym(S[b] + ad * dS[b])
        if data.p_nn:
            x_nn = x_nn + ap * dx_nn
            s_nn = s_nn + ad * ds_nn
        if data.p_fr:
            x_fr = x_fr + ap * dx_fr
        y = y + ad * dy

    if status != "optimal" and best_state is not None:
        X, S, x_nn, s_nn, x_fr, y = best_state
    pobj = sum(float(np.sum(cb * Xb)) for cb, Xb in zip(data.c_blocks, X))
    pobj += float(data.c_nn @ x_nn) + float(data.c_fr @ x_fr)
    user_obj = data.obj_sign * pobj
    sol = SdpSolution(
        status=status,
        blocks=[Xb.copy() for Xb in X],
        nonneg=x_nn.copy(),
        free=x_fr.copy(),
        y=y.copy(),
        dual_blocks=[Sb.copy() for Sb in S],
        dual_nonneg=s_nn.copy(),
        objective=user_obj,
        iterations=iters,
        notes=tuple(notes),
    )
    pr, dr, gp = residuals(problem, sol, drop=drop)
    sol.primal_residual, sol.dual_residual, sol.gap = pr, dr, gp
    if status != "optimal":
        compl = sum(float(np.sum(Xb * Sb)) for Xb, Sb in zip(X, S)) + float(x_nn @ s_nn)
        dobj = float(data.b @ y)
        cgap = compl / (1.0 + abs(pobj) + abs(dobj))
        if pr <= cfg.tol_feas and dr <= cfg.tol_feas and max(gp, cgap) <= cfg.tol_gap:
            sol.status = "optimal"
    return sol


def residuals(problem: SdpProblem, sol: SdpSolution, drop: Sequence[int] | None = None) -> tuple[float, float, float]:
    """Recompute (primal, dual, gap) residuals from the returned variables."""
    if drop is None:
        drop = []
    data = _Data(problem, list(drop))
    if len(sol.y) != data.m:
        raise ValueError("solution shape does not match problem after presolve")
    for Xb, nb in zip(sol.blocks, data.sizes):
        if Xb.shape != (nb, nb):
            raise ValueError("block shape mismatch")
    rp = data.b - data.apply(sol.blocks, sol.nonneg, sol.free)
    pinf = float(np.max(np.abs(rp))) / (1.0 + float(np.max(np.abs(data.b)))) if data.m else 0.0
    Aty = data.adjoint_blocks(sol.y)
    dnorm = 0.0
    for b in range(len(data.sizes)):
        dnorm = max(dnorm, float(np.max(np.abs(data.c_blocks[b] - Aty[b] - sol.dual_blocks[b]))))
    if data.p_nn:
        dnorm = max(dnorm, float(np.max(np.abs(data.c_nn - data.A_nn.T @ sol.y - sol.dual_nonneg))))
    if data.p_fr:
        dnorm = max(dnorm, float(np.max(np.abs(data.c_fr - data.A_fr.T @ sol.y))))
    dinf = dnorm / (1.0 + data.scale)
    pobj = sum(float(np.sum(cb * Xb)) for cb, Xb in zip(data.c_blocks, sol.blocks))
    pobj += float(data.c_nn @ sol.nonneg) + float(data.c_fr @ sol.free)
    dobj = float(data.b @ sol.y)
    gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
    return pinf, dinf, gap


def margin_maximize(
    problem: SdpProblem,
    which_blocks: Sequence[int] | str = "all",
    cfg: SdpConfig | None = None,
) -> tuple[float, SdpSolution]:
    """Maximize lambda with the designated PSD blocks shifted by -lambda*I.

    The returned solution has the shift undone, so its blocks are the
    original matrix variables (PSD up to lambda*).  The sign of lambda*
    decides strict feasibility / infeasibility of the original system.
    """
    if problem.objective is not None:
        raise ValueError("margin_maximize expects a problem without objective")
    if which_blocks == "all":
        targets = list(range(len(problem.block_sizes)))
    elif isinstance(which_blocks, int):
        targets = [which_blocks]
    else:
        targets = list(which_blocks)
    if not targets:
        raise ValueError("no blocks designated")
    touched = {b for f, _ in problem.constraints for b in f.blocks}
    if not touched.intersection(targets):
        raise ValueError("designated blocks never appear in the constraints")
    lam_idx = problem.free_count
    shifted = SdpProblem(
        block_sizes=list(problem.block_sizes),
        nonneg_count=problem.nonneg_count,
        free_count=problem.free_count + 1,
        sense="maximize",
    )
    for f, rhs in problem.constraints:
        nf = LinFunc(
            blocks={b: dict(e) for b, e in f.blocks.items()},
            nonneg=dict(f.nonneg),
            free=dict(f.free),
        )
        tr_coeff = 0
        for b in targets:
            entries = f.blocks.get(b)
            if entries:
                nb = problem.block_sizes[b]
                tr_coeff += sum(entries.get((i, i), 0) for i in range(nb))
        if tr_coeff != 0:
            nf.set_free(lam_idx, tr_coeff)
        shifted.constraints.append((nf, rhs))
    shifted.objective = LinFunc(free={lam_idx: 1})
    sol = solve(shifted, cfg)
    lam = float(sol.free[lam_idx])
    restored = [
        sol.blocks[b] + lam * np.eye(problem.block_sizes[b]) if b in targets else sol.blocks[b]
        for b in range(len(problem.block_sizes))
    ]
    out = replace(sol, blocks=restored, free=sol.free[:lam_idx].copy(), objective=lam)
    return lam, out


def dump_problem(problem: SdpProblem) -> str:
    """Plain-text sparse triplet dump (one constraint per line) for
    external cross-checking."""
    lines = [
        f"blocks {' '.join(map(str, problem.block_sizes))}",
        f"nonneg {problem.nonneg_count}",
        f"free {problem.free_count}",
        f"sense {problem.sense}",
    ]

    def fmt(f: LinFunc) -> str:
        parts = []
        for b in sorted(f.blocks):
            for (i, j), v in sorted(f.blocks[b].items()):
                parts.append(f"B{b}[{i},{j}]={v}")
        for k in sorted(f.nonneg):
            parts.append(f"N[{k}]={f.nonneg[k]}")
        for k in sorted(f.free):
            parts.append(f"F[{k}]={f.free[k]}")
        return " ".join(parts)

    if problem.objective is not None:
        lines.append("objective " + fmt(problem.objective))
    for f, rhs in problem.constraints:
        lines.append(f"{fmt(f)} == {rhs}")
    return "\n".join(lines) + "\n"
