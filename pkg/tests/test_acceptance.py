"""Acceptance suite: one test per criterion, one pass/fail line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines as the
criteria complete.  Every tolerance is pinned here, not configured.
"""

import json
import math
import random
import time
from fractions import Fraction

from copkit.bounds import (
    floor_convergence_check,
    lovasz_theta,
    theta_r,
    zeta_closed_form,
    zeta_direct,
)
from copkit.catalog import TPsiParams, horn, horn_plus_zero, matrix_m, t_psi, t_psi_zeros
from copkit.certificates import save_certificate, verify_certificate
from copkit.cli import main as cli_main
from copkit.cones import (
    c_membership,
    k1_membership,
    las_simplex_membership,
    sos_check,
    spn_membership,
)
from copkit.graphs import Graph, critical_edges, graph_matrix, graph_matrix_zeros
from copkit.sdp import solve
from copkit.simplexopt import check_scc, copositivity_class, copositivity_class_float, zeros_in_simplex
from copkit.symmat import SymMat

from test_sdp import constructed_instance


def report(num: int, label: str, ok: bool, detail: str = "") -> None:
    state = "PASS" if ok else "FAIL"
    suffix = f"  ({detail})" if detail else ""
    print(f"ACCEPTANCE {num:2d} [{label}]: {state}{suffix}")
    assert ok, f"criterion {num} failed: {label} {detail}"


ZETA_FIXTURES = (
    [Graph.cycle(k) for k in range(3, 8)]
    + [Graph.path(k) for k in range(2, 6)]
    + [Graph.complete(k) for k in range(2, 6)]
    + [Graph.petersen()]
)


def test_criterion_1_zeta_equivalence():
    t0 = time.time()
    for g in ZETA_FIXTURES:
        for r in range(7):
            assert zeta_direct(g, r) == zeta_closed_form(g, r)
    elapsed = time.time() - t0
    report(1, "zeta direct = closed form", elapsed < 30, f"{elapsed:.1f}s")


def test_criterion_2_floor_law():
    c5 = Graph.cycle(5)
    ok = all(math.floor(zeta_closed_form(c5, r)) == 2 for r in range(3, 13))
    ok = ok and all(
        zeta_closed_form(c5, r) == math.inf or math.floor(zeta_closed_form(c5, r)) > 2
        for r in range(0, 3)
    )
    table7, ok7 = floor_convergence_check(Graph.cycle(7), 12)
    floors7 = dict(table7)
    ok = ok and ok7 and floors7[7] > 3 and floors7[8] == 3
    report(2, "floor law thresholds (C5: r=3, C7: r=8)", ok)


def test_criterion_3_horn_inside_order_one():
    from copkit.catalog import verify_horn_identity

    t0 = time.time()
    ok = verify_horn_identity()
    v = k1_membership(horn())
    ok = ok and v.solver_margin >= -1e-7
    ok = ok and v.yes and v.certificate is not None
    rep = verify_certificate(horn(), v.certificate, mode="exact")
    ok = ok and rep.passed and rep.identity_residual == 0
    elapsed = time.time() - t0
    report(3, "Horn in K^(1) with exact certificate", ok and elapsed < 10, f"{elapsed:.1f}s")


def test_criterion_4_horn_outside_order_zero():
    v = spn_membership(horn())
    report(4, "Horn outside SPN", v.decision == "NO" and v.margin <= -1e-4,
           f"margin {v.margin:.4f}")


def test_criterion_5_theta_values_for_five_cycle():
    c5 = Graph.cycle(5)
    t0 = theta_r(c5, 0).value
    t1 = theta_r(c5, 1).value
    closed = 5 * math.cos(math.pi / 5) / (1 + math.cos(math.pi / 5))
    oracle = lovasz_theta(c5)
    ok = abs(t0 - math.sqrt(5)) <= 1e-4
    ok = ok and abs(t0 - closed) <= 1e-4 and abs(t0 - oracle) <= 1e-4
    ok = ok and abs(t1 - 2.0) <= 1e-4
    report(5, "theta^(0)(C5)=sqrt5, theta^(1)(C5)=2", ok, f"{t0:.6f}, {t1:.6f}")


def test_criterion_6_diananda_agreement():
    rng = random.Random(20260809)
    band_hits = 0
    agree = True
    for _ in range(100):
        rows = [
            [Fraction(rng.randint(-8, 8), rng.randint(1, 4)) for _ in range(4)]
            for _ in range(4)
        ]
        m = SymMat([[(rows[i][j] + rows[j][i]) / 2 for j in range(4)] for i in range(4)])
        cls = copositivity_class(m).classification
        lam = spn_membership(m).solver_margin
        if abs(lam) <= 1e-7:
            band_hits += 1
            continue
        if lam > 1e-7:
            agree = agree and cls == "strictly_copositive"
        else:
            agree = agree and cls == "not_copositive"
    report(6, "Diananda agreement on 100 random 4x4", agree and band_hits < 5,
           f"band hits {band_hits}")


def test_criterion_7_motzkin():
    from copkit.catalog import motzkin_poly, verify_motzkin_certificate

    v = sos_check(motzkin_poly())
    ok = v.decision == "NO" and v.margin <= -1e-4
    ok = ok and verify_motzkin_certificate()
    report(7, "Motzkin: not SOS, certificate identity exact", ok, f"margin {v.margin:.5f}")


def test_criterion_8_zero_structure():
    c4 = Graph.cycle(4)
    zs = graph_matrix_zeros(c4)
    half = Fraction(1, 2)
    ok = zs.is_finite and zs.finite_zeros == [
        (0, half, 0, half),
        (half, 0, half, 0),
    ]
    ok = ok and not graph_matrix_zeros(Graph.cycle(5)).is_finite
    fixtures = (
        [Graph.cycle(k) for k in range(3, 8)]
        + [Graph.path(k) for k in range(2, 6)]
        + [Graph.complete(k) for k in range(2, 5)]
        + [Graph.petersen()]
    )
    for g in fixtures:
        combinatorial = graph_matrix_zeros(g)
        oracle = zeros_in_simplex(graph_matrix(g))
        ok = ok and combinatorial.finite_zeros == oracle.finite_zeros
        ok = ok and [(f.support, f.dimension) for f in combinatorial.infinite_families] == [
            (f.support, f.dimension) for f in oracle.infinite_families
        ]
    report(8, "zero structure: C4 exact, C5 infinite, oracle agreement", ok)


def test_criterion_9_critical_edges():
    counts = (
        len(critical_edges(Graph.cycle(5))),
        len(critical_edges(Graph.cycle(6))),
        len(critical_edges(Graph.petersen())),
    )
    report(9, "critical edges C5/C6/Petersen", counts == (5, 0, 0), str(counts))


def test_criterion_10_acritical_scc():
    ok = True
    for g in (Graph.cycle(6), Graph.petersen()):
        entries = check_scc(graph_matrix(g))
        ok = ok and len(entries) > 0 and all(e.holds for e in entries)
    report(10, "SCC at every zero of C6 and Petersen", ok)


def test_criterion_11_counterexample_instances():
    hz = horn_plus_zero()
    v_spn = spn_membership(hz)
    v_k1 = k1_membership(hz)
    ok = v_spn.decision == "NO" and v_spn.margin <= -1e-5
    ok = ok and v_k1.decision == "NO" and v_k1.margin <= -1e-5
    v_las = las_simplex_membership(matrix_m(), 3)
    v_c = c_membership(matrix_m(), 0)
    ok = ok and v_las.decision == "NO" and v_c.yes
    report(
        11,
        "H+0 rejected at orders 0 and 1; 3x3 obstruction las NO / coeff YES",
        ok,
        f"spn {v_spn.margin:.4f}, k1 {v_k1.margin:.4f}",
    )


def sample_2x2_copositive(rng: random.Random, boundary: bool) -> SymMat:
    if boundary:
        t = Fraction(rng.randint(1, 9), rng.randint(1, 3))
        return SymMat([[t, -t], [-t, t]])
    v1, v2 = rng.randint(-3, 3), rng.randint(-3, 3)
    a = Fraction(rng.randint(0, 5), rng.randint(1, 3))
    b = Fraction(rng.randint(0, 5), rng.randint(1, 3))
    off = Fraction(rng.randint(0, 4))
    p = [[v1 * v1 + a, Fraction(v1 * v2)], [Fraction(v1 * v2), v2 * v2 + b]]
    return SymMat([[p[0][0], p[0][1] + off], [p[1][0] + off, p[1][1]]])


def test_criterion_12_las_exactness_for_two_by_two():
    rng = random.Random(7)
    worst = 0.0
    verdicts = []
    for k in range(50):
        m = sample_2x2_copositive(rng, boundary=k >= 30)
        v = las_simplex_membership(m, 3)
        verdicts.append((m, v))
        worst = min(worst, v.solver_margin)
    ok = worst >= -1e-6
    report(12, "50 copositive 2x2 pass las order 3", ok, f"worst margin {worst:.2e}")
    test_criterion_12_las_exactness_for_two_by_two.verdicts = verdicts


def test_criterion_13_hildebrand_zeros():
    rng = random.Random(2026)
    ok = True
    worst = 0.0
    for _ in range(25):
        raw = [rng.uniform(0.05, 1.0) for _ in range(5)]
        scale = rng.uniform(0.3, 0.95) * math.pi / sum(raw)
        params = TPsiParams(tuple(v * scale for v in raw))
        t = t_psi(params)
        for z in t_psi_zeros(params):
            worst = max(worst, abs(float(t.quad(list(z)))))
        ok = ok and worst <= 1e-10
        ok = ok and copositivity_class_float(t).classification == "boundary"
    report(13, "Hildebrand zeros vanish; matrices on the boundary", ok,
           f"worst residual {worst:.1e}")


def test_criterion_14_solver_health():
    ok = True
    for seed in range(50):
        prob, target = constructed_instance(seed)
        sol = solve(prob)
        ok = ok and sol.status == "optimal"
        ok = ok and abs(sol.objective - target) / (1 + abs(target)) <= 1e-6
        ok = ok and max(sol.primal_residual, sol.dual_residual) <= 1e-7
    proba, _ = constructed_instance(17)
    a = solve(proba)
    b = solve(proba)
    ok = ok and a.objective == b.objective and a.iterations == b.iterations
    report(14, "50 constructed SDPs solved; byte-identical reruns", ok)


def test_criterion_15_certificate_round_trips(tmp_path):
    failures = []

    def round_trip(tag, mat, cert, source):
        path = tmp_path / f"{tag}.cert.json"
        save_certificate(str(path), cert, mat)
        if isinstance(source, str):
            code = cli_main(["verify", str(path), source])
        else:
            mpath = tmp_path / f"{tag}.matrix.txt"
            mpath.write_text(mat.to_text())
            code = cli_main(["verify", str(path), str(mpath)])
        if code != 0:
            failures.append(tag)

    # criterion 3: the exact Horn order-1 certificate
    v = k1_membership(horn())
    round_trip("horn_k1", horn(), v.certificate, "catalog:horn")

    # criterion 5: membership certificates slightly above the theta values
    c5 = Graph.cycle(5)
    for r in (0, 1):
        t = theta_r(c5, r).value + 1e-3
        a = c5.adjacency()
        m = SymMat(
            [
                [Fraction(t).limit_denominator(10**6) * (a[i, j] + (1 if i == j else 0)) - 1 for j in range(5)]
                for i in range(5)
            ]
        )
        vv = spn_membership(m) if r == 0 else k1_membership(m)
        if not vv.yes:
            failures.append(f"theta{r}_membership")
        else:
            round_trip(f"theta{r}", m, vv.certificate, None)

    # criterion 11: the coefficient certificate for the 3x3 obstruction
    vc = c_membership(matrix_m(), 0)
    round_trip("matrix_m_c0", matrix_m(), vc.certificate, "catalog:matrix_m")

    # criterion 12: every YES from the two-by-two suite
    rng = random.Random(7)
    yes_count = 0
    for k in range(50):
        m = sample_2x2_copositive(rng, boundary=k >= 30)
        v = las_simplex_membership(m, 3)
        if v.yes and v.certificate is not None:
            yes_count += 1
            if yes_count <= 10:
                round_trip(f"las2x2_{k}", m, v.certificate, None)
    report(15, "YES certificates re-verify through the CLI", not failures,
           f"failed: {failures}" if failures else f"{yes_count} las YES instances")
