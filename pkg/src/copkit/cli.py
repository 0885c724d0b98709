"""Command-line front end.

    copkit check  MATRIX --cone spn            membership + certificate
    copkit bound  GRAPH --hierarchy zeta --r 0..5
    copkit graph  GRAPH                        alpha / critical edges / zeros
    copkit verify CERT.json MATRIX             re-verify a certificate file

Matrix sources are file paths (text format: first line n, then n rows)
or catalog references like catalog:horn, catalog:horn_scaled:11/10.
Graph sources are file paths (edge-list format) or generators cycle:N,
path:N, complete:N, empty:N, petersen.

Exit codes: 0 YES / verified, 1 NO, 2 INCONCLUSIVE, 3 input or schema
error, 4 cap exceeded, 5 internal failure.  Machine consumers should
rely on exit codes and --json output only.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import bounds as bounds_mod
from . import catalog, cones
from .certificates import (
    SchemaError,
    load_certificate,
    save_certificate,
    verify_certificate,
)
from .graphs import CapExceeded as GraphCap
from .graphs import Graph, critical_edges, graph_matrix, graph_matrix_zeros, stability_number
from .poly import Polynomial
from .sdp import SdpConfig
from .symmat import SymMat

EXIT_YES = 0
EXIT_NO = 1
EXIT_INCONCLUSIVE = 2
EXIT_INPUT = 3
EXIT_CAP = 4
EXIT_INTERNAL = 5


@dataclass
class RunConfig:
    decision_tol: float = 1e-7
    sdp_tol: float = 1e-8
    max_iters: int = 120
    output: str = "text"
    seed: int = 0
    jobs: int = 1

    def cone_config(self) -> cones.ConeConfig:
        if self.decision_tol <= 0 or self.sdp_tol <= 0:
            raise ValueError("tolerances must be positive")
        return cones.ConeConfig(
            decision_tol=self.decision_tol,
            sdp=SdpConfig(tol_gap=self.sdp_tol, tol_feas=self.sdp_tol,
                          max_iters=self.max_iters, seed=self.seed),
        )


def _load_matrix(source: str):
    if source.startswith("catalog:"):
        return catalog.lookup(source[len("catalog:"):])
    with open(source) as fh:
        return SymMat.from_text(fh.read())


def _load_graph(source: str) -> Graph:
    head, _, arg = source.partition(":")
    makers = {
        "cycle": lambda: Graph.cycle(int(arg)),
        "path": lambda: Graph.path(int(arg)),
        "complete": lambda: Graph.complete(int(arg)),
        "empty": lambda: Graph.empty(int(arg)),
    }
    if head in makers:
        return makers[head]()
    if source == "petersen":
        return Graph.petersen()
    with open(source) as fh:
        return Graph.from_text(fh.read())


def _emit(cfg: RunConfig, payload: dict, text_lines: list[str]) -> None:
    if cfg.output == "json":
        payload["schema"] = "copkit/1"
        print(json.dumps(payload, default=_jsonify))
    else:
        for line in text_lines:
            print(line)


def _jsonify(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator > 1 else str(v.numerator)
    if v == math.inf:
        return "inf"
    if isinstance(v, tuple):
        return list(v)
    return str(v)


def _fmt_value(v) -> str:
    if v == math.inf:
        return "inf"
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


# -- check ---------------------------------------------------------------------


def cmd_check(args, cfg: RunConfig) -> int:
    try:
        target = _load_matrix(args.matrix)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: cannot load matrix: {exc}", file=sys.stderr)
        return EXIT_INPUT
    ccfg = cfg.cone_config()
    r = args.r
    try:
        if isinstance(target, Polynomial):
            if args.cone != "sos":
                print("error: polynomial catalog items support only --cone sos", file=sys.stderr)
                return EXIT_INPUT
            verdict = _poly_sos_verdict(target, ccfg)
        else:
            verdict = _matrix_verdict(target, args.cone, r, ccfg)
    except cones.CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    cert_path = None
    if verdict.yes and verdict.certificate is not None and not isinstance(target, Polynomial):
        cert_path = args.cert_out or f"{args.cone}{r if r is not None else ''}.cert.json"
        save_certificate(cert_path, verdict.certificate, target)

    def _num(v):
        if v is None:
            return None
        v = float(v)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")

    payload = {
        "command": "check",
        "matrix": args.matrix,
        "cone": args.cone,
        "order": r,
        "decision": verdict.decision,
        "margin": _num(verdict.margin),
        "solver_margin": _num(verdict.solver_margin),
        "certificate": cert_path,
        "notes": list(verdict.notes),
    }
    lines = []
    if isinstance(target, Polynomial):
        lines.append(f"polynomial: {target.render()}")
    lines += [f"decision: {verdict.decision}", f"margin: {verdict.margin}"]
    if verdict.solver_margin is not None:
        lines.append(f"solver margin: {verdict.solver_margin:.3e}")
    if cert_path:
        lines.append(f"certificate: {cert_path}")
    for note in verdict.notes:
        lines.append(f"note: {note}")
    _emit(cfg, payload, lines)
    return {"YES": EXIT_YES, "NO": EXIT_NO}.get(verdict.decision, EXIT_INCONCLUSIVE)


def _matrix_verdict(mat: SymMat, cone: str, r, ccfg: cones.ConeConfig):
    if cone in ("c", "spn", "k1") and r not in (None, 0, 1):
        raise ValueError(f"cone {cone!r} does not take an order (got {r})")
    if cone == "c":
        return cones.c_membership(mat, r or 0, ccfg)
    if cone == "spn":
        return cones.spn_membership(mat, ccfg)
    if cone == "k1":
        return cones.k1_membership(mat, ccfg)
    if cone == "k":
        return cones.kr_membership(mat, 0 if r is None else r, ccfg)
    if cone == "q":
        return cones.qr_membership(mat, 0 if r is None else r, ccfg)
    if cone == "las":
        if r is None:
            raise ValueError("the las test needs --r (at least 2)")
        return cones.las_simplex_membership(mat, r, ccfg)
    raise ValueError(f"unknown cone {cone!r}")


def _poly_sos_verdict(p: Polynomial, ccfg: cones.ConeConfig):
    return cones.sos_check(p, ccfg)


# -- bound ---------------------------------------------------------------------


def _parse_orders(spec: str) -> list[int]:
    if ".." in spec:
        a, b = spec.split("..")
        lo, hi = int(a), int(b)
        if hi < lo:
            raise ValueError(f"bad order range {spec!r}")
        return list(range(lo, hi + 1))
    return [int(spec)]


def _bound_cell(payload):
    source, hierarchy, r = payload
    g = _load_graph(source)
    if hierarchy == "zeta":
        rep = bounds_mod.zeta_report(g, r, source)
    elif hierarchy == "theta":
        rep = bounds_mod.theta_r(g, r, graph_id=source)
    else:
        rep = bounds_mod.lovasz_report(g, source)
    return rep


def cmd_bound(args, cfg: RunConfig) -> int:
    try:
        _load_graph(args.graph)
        orders = _parse_orders(args.r) if args.hierarchy != "lovasz" else [0]
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    cells = [(args.graph, args.hierarchy, r) for r in orders]
    try:
        if cfg.jobs > 1 and len(cells) > 1:
            with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
                reports = list(pool.map(_bound_cell, cells))
        else:
            reports = [_bound_cell(c) for c in cells]
    except GraphCap as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    rows = []
    lines = [f"{'r':>3}  {'value':>12}  {'floor':>6}  {'alpha':>5}  {'gap':>10}"]
    for rep in reports:
        gap = math.inf if rep.value == math.inf else float(rep.value) - rep.alpha
        rows.append(
            {
                "order": rep.order,
                "hierarchy": rep.hierarchy,
                "value": rep.value,
                "floor": rep.floor,
                "alpha": rep.alpha,
                "gap": gap,
                "notes": list(rep.notes),
            }
        )
        lines.append(
            f"{rep.order:>3}  {_fmt_value(rep.value):>12}  {_fmt_value(rep.floor):>6}"
            f"  {rep.alpha:>5}  {_fmt_value(gap):>10}"
        )
    _emit(cfg, {"command": "bound", "graph": args.graph, "rows": rows}, lines)
    return EXIT_YES


# -- graph ---------------------------------------------------------------------


def cmd_graph(args, cfg: RunConfig) -> int:
    try:
        g = _load_graph(args.graph)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        alpha, sets = stability_number(g)
        crit = critical_edges(g)
        warn: list[str] = []
        zeros = graph_matrix_zeros(g, warn)
    except GraphCap as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    payload = {
        "command": "graph",
        "graph": args.graph,
        "n": g.n,
        "edges": g.edge_list(),
        "alpha": alpha,
        "max_stable_sets": [list(s) for s in sets],
        "critical_edges": [list(e) for e in crit],
        "acritical": not crit,
        "finite_zeros": [[str(v) for v in z] for z in zeros.finite_zeros],
        "zero_families": [
            {"support": list(f.support), "dimension": f.dimension}
            for f in zeros.infinite_families
        ],
        "warnings": warn,
    }
    lines = [
        f"n = {g.n}, m = {len(g.edge_list())}",
        f"alpha = {alpha}",
        f"maximum stable sets ({len(sets)}): " + " ".join(str(list(s)) for s in sets),
        f"critical edges ({len(crit)}): " + " ".join(str(list(e)) for e in crit),
        f"acritical: {not crit}",
        f"graph-matrix zeros: {len(zeros.finite_zeros)} isolated, "
        f"{len(zeros.infinite_families)} infinite families",
    ]
    for f in zeros.infinite_families:
        lines.append(f"  family on support {list(f.support)}, dimension {f.dimension}")
    lines.extend(f"warning: {w}" for w in warn)
    _emit(cfg, payload, lines)
    return EXIT_YES


# -- verify ---------------------------------------------------------------------


def cmd_verify(args, cfg: RunConfig) -> int:
    try:
        cert, mode = load_certificate(args.certificate)
    except SchemaError as exc:
        for problem in exc.problems:
            print(f"schema error: {problem}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        mat = _load_matrix(args.matrix)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: cannot load matrix: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if isinstance(mat, Polynomial):
        print("error: certificates verify against matrices only", file=sys.stderr)
        return EXIT_INPUT
    notes = []
    with open(args.certificate) as fh:
        declared_sha = json.load(fh).get("matrix_sha")
    if declared_sha != mat.sha256():
        notes.append("matrix_sha differs from the supplied matrix")
    try:
        report = verify_certificate(mat, cert, mode=mode, tol=args.verify_tol)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    payload = {
        "command": "verify",
        "certificate": args.certificate,
        "matrix": args.matrix,
        "mode": report.mode,
        "passed": report.passed,
        "identity_residual": report.identity_residual,
        "psd_margin": report.psd_margin,
        "notes": notes,
    }
    lines = [
        f"mode: {report.mode}",
        f"identity residual: {report.identity_residual:.3e}",
        f"psd margin: {report.psd_margin:.3e}",
        f"verdict: {'pass' if report.passed else 'FAIL'}",
    ] + [f"note: {n}" for n in notes]
    _emit(cfg, payload, lines)
    return EXIT_YES if report.passed else EXIT_NO


# -- entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0, help="SDP initialization jitter seed")
    common.add_argument("--tol", type=float, default=None,
                        help="decision tolerance (default 1e-7; env COPKIT_TOL)")
    common.add_argument("--jobs", type=int, default=1, help="parallel sweep cells")

    ap = argparse.ArgumentParser(prog="copkit", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="cone membership of a matrix", parents=[common])
    c.add_argument("matrix")
    c.add_argument("--cone", required=True, choices=["c", "spn", "k1", "k", "q", "las", "sos"])
    c.add_argument("--r", type=int, default=None, help="hierarchy order")
    c.add_argument("--cert-out", default=None, help="certificate output path")

    b = sub.add_parser("bound", help="stable-set bounds", parents=[common])
    b.add_argument("graph")
    b.add_argument("--hierarchy", required=True, choices=["zeta", "theta", "lovasz"])
    b.add_argument("--r", default="0", help="order or range like 0..5")

    gp = sub.add_parser("graph", help="stability analysis of a graph", parents=[common])
    gp.add_argument("graph")

    v = sub.add_parser("verify", help="re-verify a certificate file", parents=[common])
    v.add_argument("certificate")
    v.add_argument("matrix")
    v.add_argument("--verify-tol", type=float, default=1e-6,
                   help="float-mode verification tolerance")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    tol = args.tol
    if tol is None and os.environ.get("COPKIT_TOL"):
        try:
            tol = float(os.environ["COPKIT_TOL"])
        except ValueError:
            print(f"error: bad COPKIT_TOL {os.environ['COPKIT_TOL']!r}", file=sys.stderr)
            return EXIT_INPUT
    cfg = RunConfig(
        decision_tol=tol if tol else 1e-7,
        output="json" if args.json else "text",
        seed=args.seed,
        jobs=args.jobs,
    )
    try:
        if args.command == "check":
            return cmd_check(args, cfg)
        if args.command == "bound":
            return cmd_bound(args, cfg)
        if args.command == "graph":
            return cmd_graph(args, cfg)
        if args.command == "verify":
            return cmd_verify(args, cfg)
    except Exception as exc:  # pragma: no cover - final safety net
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
