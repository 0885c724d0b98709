"""Graphs, exact stability numbers, critical edges, and graph matrices.

The maximum-stable-set solver is a branch and bound on vertex inclusion
with a greedy clique-cover upper bound, followed by a complete
enumeration of the optimal sets (the zero structure of the graph matrix
needs every maximum stable set, not just one).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .simplexopt import ZeroFamily, ZeroSet
from .symmat import SymMat

STABILITY_CAP = 40


class CapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[frozenset[int]]

    @staticmethod
    def from_edges(n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        es = set()
        for (i, j) in edges:
            if i == j:
                raise ValueError(f"loop at vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i},{j}) out of range for n={n}")
            es.add(frozenset((i, j)))
        return Graph(n, frozenset(es))

    def has_edge(self, i: int, j: int) -> bool:
        return frozenset((i, j)) in self.edges

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted(tuple(sorted(e)) for e in self.edges)

    def neighbors(self, i: int) -> set[int]:
        return {next(iter(e - {i})) for e in self.edges if i in e}

    def without_edge(self, i: int, j: int) -> "Graph":
        e = frozenset((i, j))
        if e not in self.edges:
            raise ValueError(f"({i},{j}) is not an edge")
        return Graph(self.n, self.edges - {e})

    def adjacency(self) -> SymMat:
        return SymMat(
            [
                [Fraction(1 if self.has_edge(i, j) else 0) for j in range(self.n)]
                for i in range(self.n)
            ]
        )

    # -- standard families ---------------------------------------------------

    @staticmethod
    def cycle(n: int) -> "Graph":
        if n < 3:
            raise ValueError("cycle needs n >= 3")
        return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @staticmethod
    def path(n: int) -> "Graph":
        if n < 1:
            raise ValueError("path needs n >= 1")
        return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @staticmethod
    def complete(n: int) -> "Graph":
        return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])

    @staticmethod
    def empty(n: int) -> "Graph":
        return Graph.from_edges(n, [])

    @staticmethod
    def petersen() -> "Graph":
        outer = [(i, (i + 1) % 5) for i in range(5)]
        spokes = [(i, i + 5) for i in range(5)]
        inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        return Graph.from_edges(10, outer + spokes + inner)

    # -- file format -----------------------------------------------------------

    @staticmethod
    def from_text(text: str) -> "Graph":
        lines = [
            ln.strip()
            for ln in text.splitlines()
            if ln.strip() and not ln.strip().startswith("#")
        ]
        if not lines:
            raise ValueError("empty graph file")
        head = lines[0].split()
        if len(head) != 2:
            raise ValueError("first line must be 'n m'")
        n, m = int(head[0]), int(head[1])
        if len(lines) - 1 != m:
            raise ValueError(f"expected {m} edge lines, found {len(lines) - 1}")
        edges = []
        for ln in lines[1:]:
            a, b = ln.split()
            edges.append((int(a) - 1, int(b) - 1))
        return Graph.from_edges(n, edges)

    def to_text(self) -> str:
        el = self.edge_list()
        lines = [f"{self.n} {len(el)}"]
        lines += [f"{i + 1} {j + 1}" for (i, j) in el]
        return "\n".join(lines) + "\n"


@dataclass
class GraphReport:
    alpha: int
    max_stable_sets: list[tuple[int, ...]]
    critical_edges: list[tuple[int, int]]

    @property
    def acritical(self) -> bool:
        return not self.critical_edges


def _check_cap(g: Graph) -> None:
    if g.n > STABILITY_CAP:
        raise CapExceeded(f"stable-set search capped at n <= {STABILITY_CAP} (got {g.n})")


def _greedy_clique_cover(g: Graph, vertices: list[int]) -> int:
    """Number of cliques in a greedy cover; an upper bound on alpha of the
    induced subgraph."""
    remaining = list(vertices)
    cliques = 0
    while remaining:
        v = remaining.pop()
        clique = {v}
        rest = []
        for u in remaining:
            if all(g.has_edge(u, w) for w in clique):
                clique.add(u)
            else:
                rest.append(u)
        remaining = rest
        cliques += 1
    return cliques


def _alpha_branch_bound(g: Graph) -> int:
    _check_cap(g)
    best = 0
    order = sorted(range(g.n), key=lambda v: -len(g.neighbors(v)))
    adj = [g.neighbors(v) for v in range(g.n)]

    def recurse(candidates: list[int], size: int) -> None:
        nonlocal best
        if size > best:
            best = size
        if not candidates:
            return
        if size + _greedy_clique_cover(g, candidates) <= best:
            return
        v = candidates[0]
        rest = candidates[1:]
        recurse([u for u in rest if u not in adj[v]], size + 1)
        if size + _greedy_clique_cover(g, rest) > best:
            recurse(rest, size)

    recurse(order, 0)
    return best


def stability_number(g: Graph) -> tuple[int, list[tuple[int, ...]]]:
    """Exact alpha(G) together with every maximum stable set."""
    alpha = _alpha_branch_bound(g)
    adj = [g.neighbors(v) for v in range(g.n)]
    sets: list[tuple[int, ...]] = []

    def extend(start: int, chosen: list[int]) -> None:
        if len(chosen) == alpha:
            sets.append(tuple(chosen))
            return
        for v in range(start, g.n):
            if g.n - v < alpha - len(chosen):
                return
            if any(u in adj[v] for u in chosen):
                continue
            candidates = [u for u in range(v + 1, g.n) if u not in adj[v] and all(w not in adj[u] for w in chosen)]
            if len(chosen) + 1 + _greedy_clique_cover(g, candidates) < alpha:
                continue
            extend(v + 1, chosen + [v])

    extend(0, [])
    return alpha, sets


def critical_edges(g: Graph) -> list[tuple[int, int]]:
    """Edges whose removal increases alpha by one."""
    alpha = _alpha_branch_bound(g)
    out = []
    for (i, j) in g.edge_list():
        if _alpha_branch_bound(g.without_edge(i, j)) == alpha + 1:
            out.append((i, j))
    return out


def graph_report(g: Graph) -> GraphReport:
    alpha, sets = stability_number(g)
    return GraphReport(alpha, sets, critical_edges(g))


def graph_matrix(g: Graph) -> SymMat:
    """alpha(G) (I + A_G) - J, the copositive matrix attached to G."""
    alpha = _alpha_branch_bound(g)
    a = g.adjacency()
    return SymMat(
        [
            [
                Fraction(alpha) * (Fraction(int(i == j)) + a[i, j]) - 1
                for j in range(g.n)
            ]
            for i in range(g.n)
        ]
    )


# -- zero structure of the graph matrix ---------------------------------------


def _connected_components(g: Graph, support: Sequence[int]) -> list[list[int]]:
    support_set = set(support)
    seen: set[int] = set()
    comps = []
    for v in support:
        if v in seen:
            continue
        stack = [v]
        comp = []
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            comp.append(u)
            stack.extend(w for w in g.neighbors(u) if w in support_set and w not in seen)
        comps.append(sorted(comp))
    return comps


def _is_clique(g: Graph, vertices: Sequence[int]) -> bool:
    return all(g.has_edge(i, j) for i, j in combinations(vertices, 2))


FAMILY_SUPPORT_SLACK = 4


def graph_matrix_zeros(g: Graph, warn: list[str] | None = None) -> ZeroSet:
    """Zeros of x^T M_G x in the simplex by the combinatorial criterion:
    the support splits into alpha(G) cliques, one per component, each of
    total weight 1/alpha.

    Supports larger than alpha + 4 are not enumerated; a warning entry is
    appended to `warn` when the cap bites.
    """
    alpha, stable_sets = stability_number(g)
    zs = ZeroSet()
    inv = Fraction(1, alpha)
    for s in stable_sets:
        point = [Fraction(0)] * g.n
        for v in s:
            point[v] = inv
        zs.finite_zeros.append(tuple(point))
    cap = alpha + FAMILY_SUPPORT_SLACK
    if cap < g.n and warn is not None:
        warn.append(f"zero families limited to supports of size <= {cap}")
    for size in range(alpha + 1, min(g.n, cap) + 1):
        for support in combinations(range(g.n), size):
            comps = _connected_components(g, support)
            if len(comps) != alpha:
                continue
            if not all(_is_clique(g, comp) for comp in comps):
                continue
            # weights: each clique carries total 1/alpha, split freely
            point = [Fraction(0)] * g.n
            directions: list[tuple[Fraction, ...]] = []
            for comp in comps:
                share = Fraction(1, alpha * len(comp))
                for v in comp:
                    point[v] = share
                base = comp[0]
                for v in comp[1:]:
                    d = [Fraction(0)] * g.n
                    d[base] = Fraction(-1)
                    d[v] = Fraction(1)
                    directions.append(tuple(d))
            zs.infinite_families.append(
                ZeroFamily(support, len(directions), tuple(point), tuple(directions))
            )
    zs.finite_zeros.sort()
    zs.infinite_families.sort(key=lambda f: f.support)
    return zs


def check_zero_characterization(g: Graph, x: Sequence[Fraction]) -> tuple[bool, list[list[int]]]:
    """Decide x^T M_G x = 0 combinatorially and cross-check by evaluation.

    Returns (is_zero, clique decomposition).  A disagreement between the
    two routes raises, since it can only come from an implementation bug.
    """
    if len(x) != g.n:
        raise ValueError("point length mismatch")
    x = [Fraction(v) for v in x]
    if any(v < 0 for v in x) or sum(x) != 1:
        raise ValueError("point must lie in the standard simplex")
    alpha, _ = stability_number(g)
    support = [i for i, v in enumerate(x) if v != 0]
    comps = _connected_components(g, support)
    combinatorial = (
        len(comps) == alpha
        and all(_is_clique(g, comp) for comp in comps)
        and all(sum(x[v] for v in comp) == Fraction(1, alpha) for comp in comps)
    )
    direct = graph_matrix(g).quad(x) == 0
    if combinatorial != direct:
        raise AssertionError(
            f"zero characterization disagreement at {x}: "
            f"combinatorial={combinatorial} direct={direct}"
        )
    return combinatorial, comps
