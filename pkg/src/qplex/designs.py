"""Complex projective designs, the built-in catalog and qubit range shapes."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .errors import NotADesignError
from .povm import Povm, is_equal_trace, rank_one_vectors

GRAM_CLUSTER_TOL = 1e-8
MAX_DESIGN_T = 4


@dataclass(frozen=True, eq=False)
class ProjectiveDesign:
    """A finite set of pure states, stored through unit generating vectors.

    The associated rank-1 POVM is ``(d/n) |v_j><v_j|``; it is only a valid POVM
    when the set is a 1-design, which :meth:`povm` enforces.
    """

    vectors: np.ndarray
    label: str = ""

    def __post_init__(self):
        V = np.array(self.vectors, dtype=complex)
        if V.ndim != 2 or V.shape[0] == 0 or V.shape[1] < 2:
            raise ValueError(f"expected (n, d) vectors with d >= 2, got {V.shape}")
        norms = np.linalg.norm(V, axis=1)
        if np.any(norms < 1e-12):
            raise ValueError("zero generating vector")
        # leave already-unit rows untouched so that save/load is bit-exact
        scale = np.where(np.abs(norms - 1) <= 8 * np.finfo(float).eps, 1.0, norms)
        V = V / scale[:, None]
        V.setflags(write=False)
        object.__setattr__(self, "vectors", V)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def states(self) -> np.ndarray:
        V = self.vectors
        return np.einsum("ni,nj->nij", V, V.conj())

    def overlaps(self) -> np.ndarray:
        """Complex Gram matrix ``<v_j|v_k>``."""
        return self.vectors.conj() @ self.vectors.T

    def gram(self) -> np.ndarray:
        """Real matrix of ``tr(rho_j rho_k) = |<v_j|v_k>|^2``."""
        return np.abs(self.overlaps()) ** 2

    def povm(self) -> Povm:
        return Povm(self.dim / self.n * self.states, label=self.label)


@dataclass(frozen=True)
class GramData:
    gram: np.ndarray
    distinct_offdiag_values: list  # [(value, multiplicity)] ascending; ordered pairs counted


def cluster_values(values, tol: float = GRAM_CLUSTER_TOL):
    """Group sorted reals into clusters whose consecutive gaps are <= ``tol``."""
    vals = np.sort(np.asarray(values, dtype=float).ravel())
    if vals.size == 0:
        return []
    clusters = [[vals[0]]]
    for v in vals[1:]:
        if v - clusters[-1][-1] <= tol:
            clusters[-1].append(v)
        else:
            clusters.append([v])
    return [(float(np.mean(c)), len(c)) for c in clusters]


def gram_data(design: ProjectiveDesign, tol: float = GRAM_CLUSTER_TOL) -> GramData:
    G = design.gram()
    off = G[~np.eye(design.n, dtype=bool)]
    return GramData(G, cluster_values(off, tol))


def design_from_povm(povm: Povm, tol: float = 1e-9) -> ProjectiveDesign:
    """Recover the pure states behind a rank-1 equal-trace POVM."""
    V = rank_one_vectors(povm, tol)
    if V is None or not is_equal_trace(povm, tol):
        raise NotADesignError("POVM is not rank-1 with equal traces")
    return ProjectiveDesign(V, label=povm.label)


def haar_moment(d: int, s: int) -> Fraction:
    """Average of tr(rho sigma)^s over independent Haar-random pure states."""
    return Fraction(1, math.comb(d + s - 1, s))


def frame_potentials(design: ProjectiveDesign, t: int) -> list:
    G = design.gram()
    n2 = design.n**2
    return [float((G**s).sum() / n2) for s in range(1, t + 1)]


def welch_design_check(design: ProjectiveDesign, t: int, rel_tol: float = 1e-10):
    """Is ``design`` a complex projective ``t``-design?

    Compares the moments ``(1/n^2) sum_{jk} tr(rho_j rho_k)^s`` for
    ``s = 1..t`` with their Haar values ``1 / C(d+s-1, s)``.  Returns
    ``(passed, potentials)``.
    """
    if not 1 <= t <= MAX_DESIGN_T:
        raise ValueError(f"t must be between 1 and {MAX_DESIGN_T}")
    pots = frame_potentials(design, t)
    ok = all(
        abs(p - float(haar_moment(design.dim, s))) <= rel_tol * float(haar_moment(design.dim, s))
        for s, p in enumerate(pots, start=1)
    )
    return ok, pots


def design_level(design: ProjectiveDesign, tmax: int = MAX_DESIGN_T) -> int:
    """Largest ``t <= tmax`` for which ``design`` is a t-design (0 if none)."""
    level = 0
    for t in range(1, tmax + 1):
        if not welch_design_check(design, t)[0]:
            break
        level = t
    return level


def two_design_identity_check(design: ProjectiveDesign) -> float:
    """Worst HS residual of ``tau = (d+1) sum_j (d/n) tr(tau rho_j) rho_j - I``.

    Evaluated on the unit-trace operators ``I/d`` and ``I/d + B_k`` for the
    Gell-Mann basis ``B_k``; since the identity is affine in ``tau`` this covers
    every unit-trace Hermitian operator.
    """
    d, n = design.dim, design.n
    basis = linalg.gell_mann_basis(d)
    taus = np.concatenate([np.eye(d)[None] / d, np.eye(d)[None] / d + basis])
    rho = design.states
    weights = np.einsum("tab,jba->tj", taus, rho).real * (d / n)
    image = (d + 1) * np.einsum("tj,jab->tab", weights, rho) - np.eye(d)
    return float(np.max(np.linalg.norm(image - taus, axis=(1, 2))))


# --- catalog ---------------------------------------------------------------


def _from_bloch(points, label) -> ProjectiveDesign:
    return ProjectiveDesign(np.array([linalg.bloch_to_vector(r) for r in points]), label=label)


def disphenoid(angle: float) -> ProjectiveDesign:
    """Four qubit states on a tetragonal disphenoid; a SIC at arcsin(1/sqrt 3)."""
    s, c = np.sin(angle), np.cos(angle)
    pts = [(c, 0, s), (-c, 0, s), (0, c, -s), (0, -c, -s)]
    return _from_bloch(pts, f"disphenoid({angle!r})")


def sic_d2() -> ProjectiveDesign:
    pts = np.array([(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]) / np.sqrt(3)
    return _from_bloch(pts, "sic-d2")


def cube() -> ProjectiveDesign:
    # bottom face z=-1 labelled 1..4 in cyclic order; vertex i+4 is antipodal to i
    bottom = [(1, 1, -1), (-1, 1, -1), (-1, -1, -1), (1, -1, -1)]
    pts = np.array(bottom + [tuple(-np.array(v)) for v in bottom]) / np.sqrt(3)
    return _from_bloch(pts, "cube")


def _twelve_vertex(s: float, label: str) -> ProjectiveDesign:
    odd = [(s, 1, 0), (s, -1, 0), (0, s, 1), (0, s, -1), (1, 0, s), (-1, 0, s)]
    pts = []
    for v in odd:
        pts.append(v)
        pts.append(tuple(-x for x in v))
    return _from_bloch(np.array(pts) / np.sqrt(s * s + 1), label)


def cuboctahedron() -> ProjectiveDesign:
    return _twelve_vertex(1.0, "cuboctahedron")


GOLDEN_RATIO = (1 + np.sqrt(5)) / 2


def icosahedron() -> ProjectiveDesign:
    return _twelve_vertex(GOLDEN_RATIO, "icosahedron")


def sic_d3(t: float = 0.0) -> ProjectiveDesign:
    """One-parameter SIC family in C^3; state ``(m, j)`` sits at index ``3m + j``.

    ``t = 0`` gives the Hesse configuration.
    """
    eta = np.exp(2j * np.pi / 3)
    vecs = []
    for m in range(3):
        for j in range(3):
            e = -np.exp(1j * t) * eta**j
            v = [(e, 0, 1), (1, e, 0), (0, 1, e)][m]
            vecs.append(np.array(v, dtype=complex) / np.sqrt(2))
    return ProjectiveDesign(np.array(vecs), label=f"sic-d3({t!r})")


def _is_prime(d: int) -> bool:
    return d >= 2 and all(d % k for k in range(2, int(d**0.5) + 1))


_I = 1j
_MUB4 = np.array(
    [
        [[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, -1, 1], [1, -1, 1, -1]],
        [[1, -1, -_I, -_I], [1, -1, _I, _I], [1, 1, _I, -_I], [1, 1, -_I, _I]],
        [[1, -_I, -_I, -1], [1, -_I, _I, 1], [1, _I, _I, -1], [1, _I, -_I, 1]],
        [[1, -_I, -1, -_I], [1, -_I, 1, _I], [1, _I, 1, -_I], [1, _I, -1, _I]],
    ],
    dtype=complex,
) / 2


def mub(d: int) -> ProjectiveDesign:
    """Complete set of d+1 mutually unbiased bases; computational basis first.

    Prime ``d`` uses the quadratic-phase construction; ``d = 4`` uses a fixed
    table whose overlaps are checked on construction.
    """
    d = int(d)
    if d == 4:
        V = np.concatenate([np.eye(4, dtype=complex), _MUB4.reshape(16, 4)])
        G = np.abs(V.conj() @ V.T) ** 2
        block = np.kron(np.eye(5), np.ones((4, 4)))
        expected = np.where(block == 1, np.eye(20), 0.25)
        if np.max(np.abs(G - expected)) > 1e-12:
            raise RuntimeError("embedded d=4 MUB table failed its overlap check")
        return ProjectiveDesign(V, label="mub(4)")
    if not _is_prime(d):
        raise NotADesignError(f"MUB construction only available for prime d and d=4, got {d}")
    x = np.arange(d)
    vecs = list(np.eye(d, dtype=complex))
    for a in range(d):
        for b in range(d):
            if d == 2:
                phase = (1j) ** (a * x * x) * (-1.0) ** (b * x)
            else:
                phase = np.exp(2j * np.pi * ((a * x * x + b * x) % d) / d)
            vecs.append(phase / np.sqrt(d))
    return ProjectiveDesign(np.array(vecs), label=f"mub({d})")


def two_distance_d5() -> ProjectiveDesign:
    """45 states in C^5 with overlaps {0, 1/4} (27 bases, GQ(4,2) geometry)."""
    eta = np.exp(2j * np.pi / 3)
    seeds = [np.array([1, 0, 0, 0, 0], dtype=complex)]
    for s1, s2, s3 in itertools.product((1, -1), repeat=3):
        seeds.append(np.array([0, 1, s1 * eta, s2 * eta, s3], dtype=complex) / 2)
    vecs = [np.roll(v, k) for v in seeds for k in range(5)]
    return ProjectiveDesign(np.array(vecs), label="two-distance-d5")


def computational_pvm(d: int) -> ProjectiveDesign:
    return ProjectiveDesign(np.eye(int(d), dtype=complex), label=f"pvm({int(d)})")


def bipyramid() -> Povm:
    """Rank-1 qubit POVM that is morphophoric but not a tight IC-POVM."""
    a = (np.sqrt(3) - 1) / 4
    b = (3 - np.sqrt(3)) / 6
    I = np.eye(2)
    X, Y, Z = linalg.PAULI
    effects = [a * Z + a * I, -a * Z + a * I, b * X + b * I, -b / 2 * X + a * Y + b * I, -b / 2 * X - a * Y + b * I]
    return Povm(np.array(effects), label="bipyramid")


@dataclass(frozen=True)
class CatalogEntry:
    builder: object
    nparams: int
    advertised_t: int | None
    summary: str


CATALOG = {
    "disphenoid": CatalogEntry(disphenoid, 1, None, "4 qubit states on a tetragonal disphenoid (param: angle)"),
    "sic-d2": CatalogEntry(sic_d2, 0, 2, "qubit SIC, tetrahedron"),
    "cube": CatalogEntry(cube, 0, 2, "8 qubit states on a cube"),
    "cuboctahedron": CatalogEntry(cuboctahedron, 0, 2, "12 qubit states on a cuboctahedron"),
    "icosahedron": CatalogEntry(icosahedron, 0, 2, "12 qubit states on an icosahedron"),
    "sic-d3": CatalogEntry(sic_d3, 1, 2, "SIC family in C^3 (param: t, Hesse at 0)"),
    "mub": CatalogEntry(mub, 1, 2, "complete MUBs (param: d prime or 4)"),
    "two-distance-d5": CatalogEntry(two_distance_d5, 0, 2, "45-state MUB-like design in C^5"),
    "bipyramid": CatalogEntry(bipyramid, 0, None, "morphophoric, not tight-IC qubit POVM"),
    "pvm": CatalogEntry(computational_pvm, 1, None, "computational-basis PVM (param: d)"),
}


def catalog_build(name: str, params=()):
    """Build a catalog entry; returns a ProjectiveDesign or (bipyramid) a Povm."""
    try:
        entry = CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(sorted(CATALOG))}") from None
    params = list(params)
    if name == "sic-d3" and not params:
        params = [0.0]
    if len(params) != entry.nparams:
        raise ValueError(f"{name} takes {entry.nparams} parameter(s), got {len(params)}")
    if name in ("mub", "pvm"):
        if float(params[0]) != int(params[0]):
            raise ValueError(f"{name} needs an integer dimension")
        params = [int(params[0])]
    return entry.builder(*params)


def catalog_povm(name: str, params=()) -> Povm:
    obj = catalog_build(name, params)
    return obj if isinstance(obj, Povm) else obj.povm()


# --- qubit range shapes ----------------------------------------------------

SHAPES = ("point", "segment", "elongated-spheroid", "ball", "flattened-spheroid", "disk", "generic-ellipsoid")


@dataclass(frozen=True)
class RangeShapeD2:
    kind: str
    semiaxes: tuple


def range_shape_d2(povm: Povm, tol: float = 1e-9) -> RangeShapeD2:
    """Classify the qubit probability range, an ellipsoid image of the Bloch ball.

    Semiaxes are the singular values of the measurement map restricted to
    traceless operators (Gell-Mann coordinates), sorted descending.
    """
    if povm.dim != 2:
        raise ValueError("range shape classification is only defined for d = 2")
    s = np.linalg.svd(povm.traceless_coordinates(), compute_uv=False)
    s = np.concatenate([s, np.zeros(3 - s.size)])[:3]
    s1, s2, s3 = (float(x) for x in s)

    def eq(a, b):
        return abs(a - b) <= tol

    if eq(s1, 0):
        kind = "point"
    elif eq(s2, 0):
        kind = "segment"
    elif eq(s3, 0):
        kind = "disk" if eq(s1, s2) else "generic-ellipsoid"
    elif eq(s1, s3):
        kind = "ball"
    elif eq(s2, s3):
        kind = "elongated-spheroid"
    elif eq(s1, s2):
        kind = "flattened-spheroid"
    else:
        kind = "generic-ellipsoid"
    return RangeShapeD2(kind, (s1, s2, s3))


# --- SIC-d3 cubic identity -------------------------------------------------


def sic_d3_index_classes() -> dict:
    """Ordered triples of distinct labels (m, j) grouped into J0, J1, J2, J3, J'.

    Labels are flattened to ``3m + j`` to match :func:`sic_d3`.
    """
    labels = [(m, j) for m in range(3) for j in range(3)]
    classes = {"J0": [], "J1": [], "J2": [], "J3": [], "J'": []}
    for a, b, c in itertools.permutations(labels, 3):
        ms = {a[0], b[0], c[0]}
        if len(ms) == 3:
            key = f"J{(a[1] + b[1] + c[1]) % 3}"
        elif len(ms) == 1:
            key = "J3"
        else:
            key = "J'"
        classes[key].append((3 * a[0] + a[1], 3 * b[0] + b[1], 3 * c[0] + c[1]))
    return {k: np.array(v) for k, v in classes.items()}


@dataclass(frozen=True)
class CubicIdentityResidual:
    displayed: float
    direct: float
    hesse: float | None


def _triple_sum(p, triples):
    return float(np.sum(p[triples[:, 0]] * p[triples[:, 1]] * p[triples[:, 2]]))


def sic_d3_cubic_identity(t: float, p) -> CubicIdentityResidual:
    """Residuals of the cubic constraint for the SIC-d3(t) probability range.

    ``displayed`` uses the closed-form triple-product coefficients
    (cos 3t, sin 3t weights per index class), ``direct`` the same sum with
    triple products computed from the vectors, and ``hesse`` (t = 0 only) the
    short form ``sum p^3 - 1/2 sum_{J0 u J3} p p p``.  All vanish on images of
    pure states.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (9,):
        raise ValueError("SIC-d3 probability vectors have 9 entries")
    cls = sic_d3_index_classes()
    sums = {k: _triple_sum(p, v) for k, v in cls.items()}
    c3, s3 = np.cos(3 * t), np.sin(3 * t)
    cubes = float(np.sum(p**3))
    rhs = (
        cubes / 4
        - c3 / 8 * sums["J0"]
        + (c3 + np.sqrt(3) * s3) / 16 * sums["J1"]
        + (c3 - np.sqrt(3) * s3) / 16 * sums["J2"]
        - sums["J3"] / 8
        + sums["J'"] / 16
    )
    displayed = abs(rhs - 1 / 32)

    K = sic_d3(t).overlaps()
    distinct = np.concatenate(list(cls.values()))
    T = (K[distinct[:, 0], distinct[:, 1]] * K[distinct[:, 1], distinct[:, 2]] * K[distinct[:, 2], distinct[:, 0]]).real
    direct = abs(cubes / 4 + float(np.sum(p[distinct[:, 0]] * p[distinct[:, 1]] * p[distinct[:, 2]] * T)) - 1 / 32)

    hesse = None
    if abs(t) < 1e-12:
        hesse = abs(cubes - 0.5 * (sums["J0"] + sums["J3"]))
    return CubicIdentityResidual(float(displayed), float(direct), hesse)
