"""Stable-set bound hierarchies over the approximation cones.

zeta: the nonnegative-coefficient relaxation, exact rational values via
coefficient ratios (no LP needed: the minimal t is the largest ratio of
all-ones-matrix coefficients to (A+I) coefficients, which is where the
closed form is independently cross-checked).

theta: the SOS relaxations.  Orders 0 and 1 are single SDPs with the
bound t as a free scalar; higher orders bisect the membership test.
The plain Lovasz theta SDP serves as an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .cones import ConeConfig, Verdict, kr_membership
from .graphs import Graph, graph_matrix, stability_number
from .poly import _compositions, _polya_core
from .sdp import LinFunc, SdpProblem, solve
from .symmat import SymMat


@dataclass(frozen=True)
class BoundReport:
    graph_id: str
    hierarchy: str  # zeta | theta | lovasz
    order: int
    value: object  # Fraction or math.inf for zeta; float for SDP bounds
    floor: object  # int or math.inf
    alpha: int
    notes: tuple[str, ...] = ()


def _floor(value) -> object:
    if value == math.inf:
        return math.inf
    return math.floor(value)


def zeta_closed_form(g: Graph, r: int) -> Fraction | float:
    """Closed form in terms of alpha: write r+2 = u*alpha + v with
    0 <= v < alpha; the bound is C(r+2,2) / (C(u,2)*alpha + u*v),
    infinite for r <= alpha-2."""
    alpha, _ = stability_number(g)
    if r <= alpha - 2:
        return math.inf
    u, v = divmod(r + 2, alpha)
    denom = math.comb(u, 2) * alpha + u * v
    if denom == 0:
        return math.inf
    return Fraction(math.comb(r + 2, 2), denom)


def zeta_direct(g: Graph, r: int) -> Fraction | float:
    """Smallest t with all coefficients of (sum x)^r x^T (t(A+I) - J) x
    nonnegative: the largest ratio of the J-coefficient to the
    (A+I)-coefficient over all exponents of weight r+2."""
    n = g.n
    ai_rows = [[0] * n for _ in range(n)]
    j_rows = [[1] * n for _ in range(n)]
    for i in range(n):
        ai_rows[i][i] = 1
    for (i, j) in g.edge_list():
        ai_rows[i][j] = 1
        ai_rows[j][i] = 1
    best: Fraction | None = None
    for beta in _compositions(r + 2, n):
        den = _polya_core(ai_rows, beta)
        num = _polya_core(j_rows, beta)
        if den == 0:
            return math.inf
        ratio = Fraction(num, den)
        if best is None or ratio > best:
            best = ratio
    assert best is not None
    return best


def zeta_report(g: Graph, r: int, graph_id: str = "") -> BoundReport:
    alpha, _ = stability_number(g)
    value = zeta_direct(g, r)
    return BoundReport(graph_id, "zeta", r, value, _floor(value), alpha)


def floor_convergence_check(g: Graph, r_max: int) -> tuple[list[tuple[int, object]], bool]:
    """Table of (r, floor of zeta) for r <= r_max, plus the verdict of the
    threshold law: the floor equals alpha exactly from r = alpha^2 - 1 on."""
    alpha, _ = stability_number(g)
    table = []
    ok = True
    for r in range(r_max + 1):
        f = _floor(zeta_closed_form(g, r))
        table.append((r, f))
        expected_hit = r >= alpha * alpha - 1
        if (f == alpha) != expected_hit:
            ok = False
    return table, ok


# -- SDP hierarchies ------------------------------------------------------------


def lovasz_theta(g: Graph, cfg: ConeConfig | None = None) -> float:
    """The standard theta SDP: maximize <J,X> with tr X = 1, X zero on
    edges, X PSD."""
    cfg = cfg or ConeConfig()
    n = g.n
    if n > 40:
        raise ValueError("theta oracle capped at n <= 40")
    prob = SdpProblem(block_sizes=[n], sense="maximize")
    f = LinFunc()
    for i in range(n):
        f.set_block(0, i, i, 1)
    prob.constraints.append((f, 1))
    for (i, j) in g.edge_list():
        f = LinFunc()
        f.set_block(0, i, j, 1)
        prob.constraints.append((f, 0))
    obj = LinFunc()
    for i in range(n):
        for j in range(i, n):
            obj.set_block(0, i, j, 1 if i == j else 2)
    prob.objective = obj
    sol = solve(prob, cfg.sdp)
    if sol.status != "optimal" and max(sol.primal_residual, sol.dual_residual, sol.gap) > 1e-6:
        raise RuntimeError(f"theta SDP did not converge ({sol.status})")
    return float(sol.objective)


def _theta0_problem(g: Graph) -> SdpProblem:
    n = g.n
    a = g.adjacency()
    prob = SdpProblem(block_sizes=[n], nonneg_count=n * (n + 1) // 2, free_count=1)
    k = 0
    for i in range(n):
        for j in range(i, n):
            f = LinFunc()
            f.set_block(0, i, j, 1)
            f.set_nonneg(k, 1)
            f.set_free(0, -(a[i, j] + (1 if i == j else 0)))
            prob.constraints.append((f, -1))
            k += 1
    prob.objective = LinFunc(free={0: 1})
    prob.sense = "minimize"
    return prob


def _theta1_problem(g: Graph) -> SdpProblem:
    n = g.n
    a = g.adjacency()

    def ai(i: int, j: int):
        return a[i, j] + (1 if i == j else 0)

    prob = SdpProblem(block_sizes=[n] * n, free_count=1)
    for i in range(n):
        f = LinFunc()
        f.set_block(i, i, i, 1)
        f.set_free(0, -ai(i, i))
        prob.constraints.append((f, -1))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            f = LinFunc()
            f.set_block(i, i, j, 2)
            f.set_block(j, i, i, 1)
            f.set_free(0, -(2 * ai(i, j) + ai(i, i)))
            prob.constraints.append((f, -3))
    slack = 0
    triples = [
        (i, j, k)
        for i in range(n)
        for j in range(i + 1, n)
        for k in range(j + 1, n)
    ]
    prob.nonneg_count = len(triples)
    for (i, j, k) in triples:
        f = LinFunc()
        f.set_block(i, j, k, 1)
        f.set_block(j, i, k, 1)
        f.set_block(k, i, j, 1)
        f.set_nonneg(slack, 1)
        f.set_free(0, -(ai(i, j) + ai(i, k) + ai(j, k)))
        prob.constraints.append((f, -3))
        slack += 1
    prob.objective = LinFunc(free={0: 1})
    prob.sense = "minimize"
    return prob


THETA_BISECTION_WIDTH = 1e-5


def theta_r(g: Graph, r: int, cfg: ConeConfig | None = None, graph_id: str = "") -> BoundReport:
    """min t with t(A+I) - J in the order-r SOS cone.

    Orders 0 and 1 are solved as one SDP with t free; order >= 2 bisects
    the membership margin (the feasible t-set is upward closed)."""
    cfg = cfg or ConeConfig()
    alpha, _ = stability_number(g)
    notes: list[str] = []
    if r < 0:
        raise ValueError("order must be a natural number")
    if r <= 1:
        prob = _theta0_problem(g) if r == 0 else _theta1_problem(g)
        sol = solve(prob, cfg.sdp)
        if sol.status != "optimal" and max(sol.primal_residual, sol.dual_residual, sol.gap) > 1e-6:
            raise RuntimeError(f"theta^({r}) SDP did not converge ({sol.status})")
        value = float(sol.objective)
        notes.append(f"single SDP, {sol.iterations} iterations")
    else:
        a = g.adjacency()
        lo = float(alpha)
        zeta = zeta_closed_form(g, r)
        hi = float(g.n) if zeta == math.inf else max(float(g.n), float(zeta))
        notes.append(f"bisection on [{lo}, {hi}]")

        def feasible(t: float) -> bool:
            rows = [
                [
                    t * (float(a[i, j]) + (1.0 if i == j else 0.0)) - 1.0
                    for j in range(g.n)
                ]
                for i in range(g.n)
            ]
            mt = SymMat(rows)
            verdict = kr_membership(mt, r, cfg)
            return verdict.decision != "NO"

        if not feasible(hi):
            raise RuntimeError("bisection bracket failure: upper end infeasible")
        while hi - lo > THETA_BISECTION_WIDTH:
            mid = 0.5 * (lo + hi)
            if feasible(mid):
                hi = mid
            else:
                lo = mid
        value = hi
    return BoundReport(graph_id, "theta", r, value, _floor(value + 1e-9), alpha, tuple(notes))


def lovasz_report(g: Graph, graph_id: str = "") -> BoundReport:
    alpha, _ = stability_number(g)
    value = lovasz_theta(g)
    return BoundReport(graph_id, "lovasz", 0, value, _floor(value + 1e-9), alpha)


def conjecture_probe(g: Graph, cfg: ConeConfig | None = None) -> Verdict:
    """Membership of the graph matrix in the order alpha(G)-1 SOS cone.

    The matrix sits on the cone boundary whenever the bound is exact, so
    the float margin lands in the inconclusive band and the test leans on
    the exact rounding path for a definitive YES."""
    cfg = cfg or ConeConfig()
    alpha, _ = stability_number(g)
    return kr_membership(graph_matrix(g), alpha - 1, cfg)
