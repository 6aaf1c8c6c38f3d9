"""Orthogonality graphs of MUB-like 2-designs.

Vertices are design elements, edges join orthogonal pairs.  When the
off-diagonal overlaps take exactly two values ``{0, a}`` the graph is
strongly regular and its spectrum pins down the design's combinatorics.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .designs import ProjectiveDesign, cluster_values, welch_design_check
from .errors import CliqueLimitError, NotDelsarteError, NotMubLikeError, NotStronglyRegularError
from .geometry import independent_rows, linear_residual

ORTHOGONAL_TOL = 1e-8
CLIQUE_CAP = 10**6

# (n, kappa, lambda, mu, d, r, q, psi, c); the MUB row is generated per d.
TABLE = {
    "penrose-witting-d4": (40, 12, 2, 4, 4, 2, 4, 1, 1),
    "two-distance-d5": (45, 12, 3, 3, 5, 3, 3, 1, 1),
    "mitchell-d6": (126, 45, 12, 18, 6, 3, 9, 2, 3),
    "rudvalis-d28": (4060, 1755, 730, 780, 28, 15, 65, 12, 45),
}


def mub_row(d: int) -> tuple:
    return (d * (d + 1), d - 1, d - 2, 0, d, d - 1, 1, 0, 1)


@dataclass(frozen=True, eq=False)
class OrthogonalityGraph:
    n: int
    adjacency: np.ndarray
    a: float
    dim: int

    def neighbours(self, v: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[v])

    def edges(self):
        j, k = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(j.tolist(), k.tolist()))


def build_orthogonality_graph(design: ProjectiveDesign, tol: float = ORTHOGONAL_TOL) -> OrthogonalityGraph:
    G = design.gram()
    n = design.n
    off = G[~np.eye(n, dtype=bool)]
    clusters = cluster_values(off, tol)
    zero = [v for v, _ in clusters if abs(v) < tol]
    nonzero = [v for v, _ in clusters if abs(v) >= tol]
    if not zero or len(nonzero) != 1:
        raise NotMubLikeError(
            f"off-diagonal overlaps cluster into {len(clusters)} value(s) "
            f"{[(round(v, 12), k) for v, k in clusters]}, expected exactly {{0, a}}",
            clusters,
        )
    adj = G < tol
    np.fill_diagonal(adj, False)
    spread = np.max(np.abs(G[~adj & ~np.eye(n, dtype=bool)] - nonzero[0]))
    if spread > tol:
        raise NotMubLikeError(f"non-orthogonal overlaps deviate from a by {spread:.3e}", clusters)
    adj.setflags(write=False)
    return OrthogonalityGraph(n=n, adjacency=adj, a=float(nonzero[0]), dim=design.dim)


@dataclass(frozen=True)
class SrgParameters:
    n: int
    kappa: int
    lam: int
    mu: int
    d: int
    r: int
    q: int
    psi: int
    f: int
    g: int
    eigenvalues: tuple
    multiplicities: tuple
    welch_levenshtein_a: Fraction
    a: float
    c: int | str = "not-delsarte"

    def table_row(self) -> tuple:
        return (self.n, self.kappa, self.lam, self.mu, self.d, self.r, self.q, self.psi, self.c)

    def as_dict(self) -> dict:
        out = dict(self.__dict__)
        out["welch_levenshtein_a"] = str(self.welch_levenshtein_a)
        out["eigenvalues"] = list(self.eigenvalues)
        out["multiplicities"] = list(self.multiplicities)
        return out


def _int_exact(x: float, what: str, tol: float = 1e-8) -> int:
    k = int(round(x))
    if abs(x - k) > tol:
        raise NotStronglyRegularError(f"{what} = {x!r} is not an integer")
    return k


def srg_analysis(graph: OrthogonalityGraph, d: int | None = None) -> SrgParameters:
    """SRG parameters by counting, ``(r, q)`` from the spectrum, identities checked.

    Raises :class:`NotStronglyRegularError` when the graph is not strongly
    regular or any parameter identity fails (the message lists all of them).
    """
    d = graph.dim if d is None else int(d)
    A = graph.adjacency.astype(float)
    n = graph.n
    deg = A.sum(axis=1)
    if np.ptp(deg) != 0:
        raise NotStronglyRegularError(f"graph is not regular (degrees {int(deg.min())}..{int(deg.max())})")
    kappa = int(deg[0])
    common = A @ A
    off = ~np.eye(n, dtype=bool)
    adj_common = common[graph.adjacency]
    non_common = common[off & ~graph.adjacency]
    if adj_common.size and np.ptp(adj_common) != 0:
        raise NotStronglyRegularError("adjacent pairs have varying common-neighbour counts")
    if non_common.size and np.ptp(non_common) != 0:
        raise NotStronglyRegularError("non-adjacent pairs have varying common-neighbour counts")
    lam = int(adj_common[0]) if adj_common.size else 0
    mu = int(non_common[0]) if non_common.size else 0

    w = np.linalg.eigvalsh(A)
    ints = np.array([_int_exact(x, "adjacency eigenvalue") for x in w])
    if int(ints.max()) != kappa:
        raise NotStronglyRegularError(f"largest eigenvalue {ints.max()} differs from degree {kappa}")
    rest = sorted(ints.tolist())
    rest.remove(kappa)
    r, minus_q = max(rest), min(rest)
    q = -minus_q
    f = rest.count(r)
    g = rest.count(minus_q)
    if len(set(rest)) > 2:
        raise NotStronglyRegularError(f"spectrum has more than three distinct eigenvalues: {sorted(set(ints.tolist()))}")
    if r + q == 0:
        raise NotStronglyRegularError("degenerate spectrum (r + q = 0)")
    psi_frac = Fraction(r * (q - 1), r + q)

    violations = []
    checks = [
        ("d = r + psi + 1", Fraction(d), r + psi_frac + 1),
        ("n = d(r + 2q)", Fraction(n), Fraction(d * (r + 2 * q))),
        ("kappa = (d-1)q", Fraction(kappa), Fraction((d - 1) * q)),
        ("mu = psi q", Fraction(mu), psi_frac * q),
        ("lambda = mu + r - q", Fraction(lam), Fraction(mu + r - q)),
        ("f = n - d^2", Fraction(f), Fraction(n - d * d)),
        ("g = d^2 - 1", Fraction(g), Fraction(d * d - 1)),
    ]
    for name, lhs, rhs in checks:
        if lhs != rhs:
            violations.append(f"{name}: {lhs} != {rhs}")
    if psi_frac.denominator != 1:
        violations.append(f"psi = {psi_frac} is not an integer")
    wl = Fraction(2 * n - d * (d + 1), (n - d) * (d + 1))
    if abs(graph.a - float(wl)) > 1e-10:
        violations.append(f"a = {graph.a!r} differs from the Welch-Levenshtein value {wl}")
    if abs(graph.a - 1 / (r + 1)) > 1e-10:
        violations.append(f"a = {graph.a!r} differs from 1/(r+1) = {Fraction(1, r + 1)}")
    if violations:
        raise NotStronglyRegularError("; ".join(violations))

    eig = (kappa, r, -q)
    mult = (1, f, g)
    return SrgParameters(n, kappa, lam, mu, d, r, q, int(psi_frac), f, g, eig, mult, wl, graph.a)


def maximal_cliques(graph: OrthogonalityGraph, cap: int = CLIQUE_CAP) -> list:
    """All maximal cliques (Bron-Kerbosch with pivoting), as sorted tuples.

    Vertex sets are Python-int bitmasks, so the ordering is deterministic.
    """
    n = graph.n
    nbr = [0] * n
    for v in range(n):
        for u in graph.neighbours(v):
            nbr[v] |= 1 << int(u)
    out = []

    def bits(x):
        while x:
            low = x & -x
            yield low.bit_length() - 1
            x ^= low

    def expand(R, P, X):
        if not P and not X:
            out.append(R)
            if len(out) > cap:
                raise CliqueLimitError(f"more than {cap} maximal cliques")
            return
        pivot = max(bits(P | X), key=lambda u: (nbr[u] & P).bit_count())
        for v in list(bits(P & ~nbr[pivot])):
            expand(R | (1 << v), P & nbr[v], X & nbr[v])
            P &= ~(1 << v)
            X |= 1 << v

    expand(0, (1 << n) - 1, 0)
    cliques = [tuple(bits(R)) for R in out]
    return sorted(cliques, key=lambda c: (-len(c), c))


@dataclass(frozen=True)
class CliqueReport:
    cliques: list
    bases: list
    max_size: int
    per_vertex: tuple
    c: int | None
    nexus: int | None
    delsarte: bool
    expected_total: int | None


def clique_analysis(graph: OrthogonalityGraph, d: int | None = None, srg: SrgParameters | None = None) -> CliqueReport:
    """Maximal cliques, size-d bases and the Delsarte clique-graph test."""
    d = graph.dim if d is None else int(d)
    cliques = maximal_cliques(graph)
    max_size = max((len(c) for c in cliques), default=0)
    if max_size > d:
        raise NotStronglyRegularError(f"clique of size {max_size} exceeds the bound d = {d}")
    bases = [c for c in cliques if len(c) == d]
    per_vertex = np.zeros(graph.n, dtype=int)
    per_edge = {}
    for B in bases:
        per_vertex[list(B)] += 1
        for i, j in ((i, j) for i in B for j in B if i < j):
            per_edge[(i, j)] = per_edge.get((i, j), 0) + 1
    edges = graph.edges()
    counts = {per_edge.get(e, 0) for e in edges}
    c = counts.pop() if len(counts) == 1 and edges else None
    if c == 0:
        c = None
    A = graph.adjacency
    nexus_values = set()
    for B in bases:
        inside = np.zeros(graph.n, dtype=bool)
        inside[list(B)] = True
        nexus_values.update(A[~inside][:, inside].sum(axis=1).tolist())
    nexus = nexus_values.pop() if len(nexus_values) == 1 else (0 if not nexus_values and bases else None)
    delsarte = c is not None and nexus is not None
    expected = None
    if srg is not None:
        delsarte = delsarte and nexus == srg.psi
        if c is not None:
            expected = (srg.r + 2 * srg.q) * c * srg.q
            delsarte = delsarte and expected == len(bases) and bool(np.all(per_vertex == c * srg.q))
    return CliqueReport(cliques, bases, max_size, tuple(per_vertex.tolist()), c, nexus, bool(delsarte), expected)


@dataclass(frozen=True)
class GraphReport:
    srg: SrgParameters
    cliques: CliqueReport
    table_match: str | None
    reduced_equations: int

    def as_dict(self) -> dict:
        row = self.srg.table_row()
        return {
            "row": dict(zip(("n", "kappa", "lambda", "mu", "d", "r", "q", "psi", "c"), row)),
            "eigenvalues": list(self.srg.eigenvalues),
            "multiplicities": list(self.srg.multiplicities),
            "a": self.srg.a,
            "welch_levenshtein_a": str(self.srg.welch_levenshtein_a),
            "bases": len(self.cliques.bases),
            "maximal_cliques": len(self.cliques.cliques),
            "bases_per_vertex": sorted(set(self.cliques.per_vertex)),
            "delsarte": self.cliques.delsarte,
            "table_match": self.table_match,
            "reduced_equations": self.reduced_equations,
        }


def match_table_row(row) -> str | None:
    row = tuple(row)
    for name, ref in TABLE.items():
        if ref == row:
            return name
    d = row[4]
    if row == mub_row(d):
        return f"mub-d{d}"
    return None


def analyse_design(design: ProjectiveDesign) -> GraphReport:
    """Full pipeline: graph, SRG parameters, cliques, table lookup."""
    graph = build_orthogonality_graph(design)
    srg = srg_analysis(graph, design.dim)
    cl = clique_analysis(graph, design.dim, srg)
    srg = SrgParameters(**{**srg.__dict__, "c": cl.c if cl.delsarte else "not-delsarte"})
    reduced = len(basis_equation_subset(cl.bases, graph.n))
    return GraphReport(srg, cl, match_table_row(srg.table_row()), reduced)


def basis_equation_subset(bases, n: int) -> list:
    """Indices of a maximal linearly independent subset of the basis-sum equations."""
    rows = np.zeros((len(bases), n + 1))
    for i, B in enumerate(bases):
        rows[i, list(B)] = 1.0
        rows[i, n] = 1.0
    return independent_rows(rows)


@dataclass(frozen=True)
class BasisSumResult:
    in_affine: bool
    per_basis_sums: np.ndarray
    clique_violations: list
    linear_ok: bool
    basis_ok: bool
    inequality_ok: bool
    agree: bool


def basis_sum_membership(design: ProjectiveDesign, p, report: CliqueReport | None = None, tol: float = 1e-10) -> BasisSumResult:
    """Three equivalent descriptions of the primal polytope for MUB-like designs.

    (i) the design's linear equations; (ii) ``p`` in the simplex with every
    basis summing to ``d/n``; (iii) every clique summing to at most ``d/n``.
    For ``p >= 0`` it suffices to check (iii) on maximal cliques.
    """
    if report is None:
        graph = build_orthogonality_graph(design)
        report = clique_analysis(graph, design.dim, srg_analysis(graph, design.dim))
    if not report.delsarte:
        raise NotDelsarteError("orthogonality graph is not a Delsarte clique graph; equivalence not guaranteed")
    p = np.asarray(p, dtype=float)
    if np.min(p) < -tol or abs(p.sum() - 1) > tol:
        raise ValueError("p must be a nonnegative vector summing to 1")
    target = design.dim / design.n
    sums = np.array([p[list(B)].sum() for B in report.bases])
    basis_ok = bool(np.all(np.abs(sums - target) <= tol))
    violations = [B for B in report.cliques if p[list(B)].sum() > target + tol]
    linear_ok = linear_residual(design, p) <= tol * design.n
    inequality_ok = not violations
    agree = linear_ok == basis_ok == inequality_ok
    return BasisSumResult(basis_ok, sums, violations, linear_ok, basis_ok, inequality_ok, agree)


def is_mub_like_two_design(design: ProjectiveDesign) -> bool:
    try:
        build_orthogonality_graph(design)
    except NotMubLikeError:
        return False
    return welch_design_check(design, 2)[0]


def adjacency_list(graph: OrthogonalityGraph) -> str:
    """Plain text, one edge ``j k`` (0-based) per line."""
    return "".join(f"{j} {k}\n" for j, k in graph.edges())
