"""External geometry of generalised qplexes.

The probability range of a morphophoric POVM lives in the primal affine space
``A`` (the affine span of the range).  It is sandwiched between the basis
polytope ``D`` (convex hull of the images of the normalised effects) and the
primal polytope ``Delta = A ∩ simplex``, which are polar to each other about
the central sphere of radius ``m = sqrt(alpha / d)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .designs import ProjectiveDesign, design_from_povm, welch_design_check
from .errors import NotADesignError, NotInAffineSpaceError, NotMorphophoricError
from .linalg import EQ_TOL
from .povm import Povm, is_equal_trace, measurement_map, morphophoricity_report, rank_one_vectors
from .sampling import haar_pure_states, hs_mixed_states, rng_from

AFFINE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class AffineSubspace:
    """``offset + span(directions)`` in R^n; ``directions`` has orthonormal rows."""

    offset: np.ndarray
    directions: np.ndarray

    @property
    def ambient_dim(self) -> int:
        return self.offset.size

    @property
    def dim(self) -> int:
        return self.directions.shape[0]

    def project(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        U = self.directions
        return self.offset + ((x - self.offset) @ U.T) @ U

    def distance(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.linalg.norm(x - self.project(x), axis=-1)

    def contains(self, x, tol: float = AFFINE_TOL) -> bool:
        return bool(np.all(self.distance(x) <= tol))

    def constraints(self):
        """Orthonormal equations ``(A, b)`` with ``A x = b`` exactly on the space."""
        n = self.ambient_dim
        if self.dim == 0:
            A = np.eye(n)
        else:
            _, s, Vt = np.linalg.svd(self.directions, full_matrices=True)
            A = Vt[self.dim :]
        return A, A @ self.offset

    def equation_residual(self, coeffs, rhs) -> float:
        """How far the equations ``coeffs . x = rhs`` are from holding on the whole space.

        ``coeffs`` may be one row or a stack of rows.
        """
        a = np.atleast_2d(np.asarray(coeffs, dtype=float))
        b = np.atleast_1d(np.asarray(rhs, dtype=float))
        tangent = np.max(np.abs(self.directions @ a.T), initial=0.0)
        return float(max(tangent, np.max(np.abs(a @ self.offset - b))))


def primal_affine_space(povm: Povm, rel_tol: float = EQ_TOL) -> AffineSubspace:
    """Affine span of the probability range: ``c_Pi + p_Pi(traceless operators)``."""
    F = povm.traceless_coordinates()
    U, s, _ = np.linalg.svd(F, full_matrices=False)
    keep = s > rel_tol * s[0] if s.size and s[0] > 0 else np.zeros(s.size, dtype=bool)
    return AffineSubspace(povm.center.copy(), U[:, keep].T.copy())


def design_linear_system(design: ProjectiveDesign):
    """The n equations ``(n/d) p_l - (d+1) sum_j p_j tr(rho_j rho_l) = -1`` as ``(M, b)``."""
    n, d = design.n, design.dim
    M = (n / d) * np.eye(n) - (d + 1) * design.gram()
    return M, -np.ones(n)


def linear_residual(design: ProjectiveDesign, p) -> float:
    M, b = design_linear_system(design)
    return float(np.max(np.abs(M @ np.asarray(p, dtype=float) - b)))


def independent_rows(A, tol: float = 1e-10) -> list:
    """Greedy pivoted elimination: indices of a maximal independent row subset.

    Rows are taken in order and kept when they are not (numerically) in the
    span of the rows kept so far.  Any maximal subset is an equally valid
    reduced system; this picks the lexicographically first one.
    """
    A = np.asarray(A, dtype=float)
    basis = []
    kept = []
    for i, row in enumerate(A):
        r = row.copy()
        for q in basis:
            r -= (r @ q) * q
        norm = np.linalg.norm(r)
        if norm > tol * max(np.linalg.norm(row), 1.0):
            basis.append(r / norm)
            kept.append(i)
    return kept


def reduced_linear_system(design: ProjectiveDesign):
    M, b = design_linear_system(design)
    idx = independent_rows(np.column_stack([M, b]))
    return idx, M[idx], b[idx]


def _two_design(obj, check: bool = True) -> ProjectiveDesign:
    design = obj if isinstance(obj, ProjectiveDesign) else design_from_povm(obj)
    if check and not welch_design_check(design, 2)[0]:
        raise NotADesignError(f"{design.label or 'input'} is not a 2-design")
    return design


def as_two_design(povm: Povm):
    """The 2-design behind a rank-1 equal-trace POVM, or ``None``."""
    if rank_one_vectors(povm) is None or not is_equal_trace(povm):
        return None
    design = design_from_povm(povm)
    return design if welch_design_check(design, 2)[0] else None


@dataclass(frozen=True, eq=False)
class PolytopeV:
    vertices: np.ndarray
    label: str


@dataclass(frozen=True, eq=False)
class GeometryReport:
    m: float
    r: float
    R: float
    alpha: float
    center: np.ndarray
    dim_affine: int
    linear_system_rank: int
    mediality_distances: np.ndarray
    basis_distributions: np.ndarray
    is_two_design: bool
    contraction_residual: float | None

    def as_dict(self) -> dict:
        out = dict(self.__dict__)
        for k, v in out.items():
            if isinstance(v, np.ndarray):
                out[k] = v.tolist()
        return out


def basis_distributions(povm: Povm) -> np.ndarray:
    """Row ``j`` is ``f_j = p_Pi(Pi_j / tr Pi_j)``."""
    return np.einsum("jab,kba->jk", povm.effects, povm.effects).real / povm.traces[:, None]


def radii(alpha: float, d: int):
    """``(m, r, R)`` with ``m = sqrt(alpha/d)``, ``r = m/sqrt(d-1)``, ``R = m sqrt(d-1)``."""
    m = np.sqrt(alpha / d)
    return float(m), float(m / np.sqrt(d - 1)), float(m * np.sqrt(d - 1))


def geometry_report(povm: Povm, tol: float = 1e-9) -> GeometryReport:
    rep = morphophoricity_report(povm, tol)
    if not rep.is_morphophoric:
        raise NotMorphophoricError(f"frame deviation {rep.frame_deviation:.3e} exceeds {tol:g}")
    d, n = povm.dim, povm.n
    m, r, R = radii(rep.alpha, d)
    space = primal_affine_space(povm)
    E = np.eye(n)
    proj = space.project(E)
    med = np.linalg.norm(E - proj, axis=1)
    f = basis_distributions(povm)
    design = as_two_design(povm)
    contraction = None
    if design is not None:
        c = povm.center
        h = c + (proj - c) / (d + 1)
        contraction = float(np.max(np.abs(h - f)))
    return GeometryReport(
        m=m,
        r=r,
        R=R,
        alpha=rep.alpha,
        center=povm.center,
        dim_affine=space.dim,
        linear_system_rank=n - space.dim,
        mediality_distances=med,
        basis_distributions=f,
        is_two_design=design is not None,
        contraction_residual=contraction,
    )


# --- algebraic membership for 2-designs ------------------------------------


def cubic_form(design: ProjectiveDesign, p) -> float:
    """``sum_{jkl} p_j p_k p_l tr(rho_j rho_k rho_l)`` via the overlap matrix."""
    DK = np.asarray(p, dtype=float)[:, None] * design.overlaps()
    return float(np.trace(DK @ DK @ DK).real)


def distinct_cubic_form(design: ProjectiveDesign, p) -> float:
    """The cubic form restricted to pairwise distinct indices."""
    p = np.asarray(p, dtype=float)
    G = design.gram()
    cubes = float(np.sum(p**3))
    two_equal = float(np.sum(p**2 * (G @ p))) - cubes
    return cubic_form(design, p) - cubes - 3 * two_equal


@dataclass(frozen=True)
class PureMembership:
    is_pure_image: bool
    linear: float
    quadratic: float
    cubic: float
    new3rd: float


def pure_state_constants(d: int, n: int):
    """Right-hand sides ``(2d/(n(d+1)), (d+7)/(d+1)^3)`` of the quadratic and cubic equations."""
    return 2 * d / (n * (d + 1)), (d + 7) / (d + 1) ** 3


def pure_membership_check(design, p, tol: float = 1e-9) -> PureMembership:
    """Is ``p`` the image of a pure state under a 2-design POVM?

    Evaluates the n linear equations, the quadratic sphere equation and the
    cubic equation; the alternative cubic form over distinct triples is
    returned as ``new3rd`` for cross-checking.
    """
    design = _two_design(design)
    p = np.asarray(p, dtype=float)
    d, n = design.dim, design.n
    quad_rhs, cub_rhs = pure_state_constants(d, n)
    lin = linear_residual(design, p)
    quad = abs(float(p @ p) - quad_rhs)
    cub = abs(cubic_form(design, p) - cub_rhs)
    alt_lhs = (3 * n / (d * (d + 1)) - 2) * float(np.sum(p**3)) + distinct_cubic_form(design, p)
    alt_rhs = (n * (d + 7) - 6 * d * (d + 1)) / (n * (d + 1) ** 3)
    new3rd = abs(alt_lhs - alt_rhs)
    return PureMembership(bool(max(lin, quad, cub) <= tol), lin, quad, cub, new3rd)


def state_membership_low_dim(design, p, tol: float = 1e-9) -> bool:
    """Membership in the probability range by polynomial inequalities (d = 2, 3).

    Uses the linear equations, ``sum p^2 <= 2d/(n(d+1))`` and, for ``d = 3``,
    the cubic inequality.  Higher dimensions need
    :func:`reconstruction_membership` instead.
    """
    design = _two_design(design)
    d, n = design.dim, design.n
    if d not in (2, 3):
        raise ValueError(f"inequality description only holds for d in (2, 3), got {d}; use reconstruction_membership")
    p = np.asarray(p, dtype=float)
    sq = float(p @ p)
    quad_rhs, _ = pure_state_constants(d, n)
    if linear_residual(design, p) > tol or sq > quad_rhs + tol:
        return False
    if d == 3:
        bound = 9 * n / (2 * d * (d + 1) ** 2) * sq + (d - 2) / (d + 1) ** 3
        return cubic_form(design, p) >= bound - tol
    return True


def _povm_of(obj) -> Povm:
    return obj.povm() if isinstance(obj, ProjectiveDesign) else obj


def reconstruct_state(povm, p, method: str = "frame", tol: float = AFFINE_TOL) -> np.ndarray:
    """Invert the measurement map on the primal affine space.

    ``method="frame"`` works for any morphophoric POVM via
    ``tau = I/d + (1/alpha) sum_j (p_j - c_j) pi0(Pi_j)``; ``method="design"``
    uses ``tau = (d+1) sum_j p_j rho_j - I`` and needs a 2-design.
    """
    P = _povm_of(povm)
    p = np.asarray(p, dtype=float)
    space = primal_affine_space(P)
    resid = float(space.distance(p))
    if resid > tol:
        raise NotInAffineSpaceError(resid)
    d = P.dim
    if method == "design":
        design = _two_design(povm)
        tau = (d + 1) * np.einsum("j,jab->ab", p, design.states) - np.eye(d)
    elif method == "frame":
        rep = morphophoricity_report(P)
        if not rep.is_morphophoric:
            raise NotMorphophoricError("frame reconstruction needs a morphophoric POVM")
        tau = np.eye(d) / d + np.einsum("j,jab->ab", p - P.center, linalg.traceless_project(P.effects)) / rep.alpha
    else:
        raise ValueError(f"unknown reconstruction method {method!r}")
    return (tau + tau.conj().T) / 2


def reconstruction_membership(povm, p, tol: float = 1e-9) -> bool:
    """Membership in the probability range via reconstruction and positivity."""
    try:
        tau = reconstruct_state(povm, p)
    except NotInAffineSpaceError:
        return False
    return linalg.min_eigenvalue(tau) >= -tol


# --- polytopes and duality --------------------------------------------------


def basis_polytope(povm: Povm) -> PolytopeV:
    return PolytopeV(basis_distributions(povm), "basis-polytope-D")


def primal_polytope(povm: Povm, max_dim: int = 8) -> PolytopeV:
    """Vertices of ``A ∩ simplex`` (via half-space intersection, small ``dim A`` only)."""
    from scipy.spatial import HalfspaceIntersection

    space = primal_affine_space(povm)
    k = space.dim
    if k > max_dim:
        raise ValueError(f"vertex enumeration limited to dim A <= {max_dim}, got {k}")
    U, c = space.directions, space.offset
    if k == 1:
        u = U[0]
        lo = max((-c[i] / u[i] for i in range(u.size) if u[i] > 0), default=-np.inf)
        hi = min((-c[i] / u[i] for i in range(u.size) if u[i] < 0), default=np.inf)
        return PolytopeV(np.array([c + lo * u, c + hi * u]), "primal-polytope-Delta")
    halfspaces = np.column_stack([-U.T, -c])
    hs = HalfspaceIntersection(halfspaces, np.zeros(k))
    pts = c + hs.intersections @ U
    uniq = []
    for v in pts:
        if not any(np.linalg.norm(v - w) < 1e-9 for w in uniq):
            uniq.append(v)
    return PolytopeV(np.array(uniq), "primal-polytope-Delta")


def sample_primal_polytope(povm: Povm, count: int, rng):
    """Points of ``Delta``: interior points plus the boundary hit along each ray.

    Returns ``(interior, boundary, facet_index)`` where ``boundary[i]`` has
    coordinate ``facet_index[i]`` equal to zero.
    """
    rng = rng_from(rng)
    space = primal_affine_space(povm)
    c, U = space.offset, space.directions
    u = rng.standard_normal((count, space.dim)) @ U
    with np.errstate(divide="ignore"):
        ratio = np.where(u < -1e-15, c / -u, np.inf)
    facet = np.argmin(ratio, axis=1)
    tmax = ratio[np.arange(count), facet]
    s = rng.uniform(size=count)
    interior = c + (s * tmax)[:, None] * u
    boundary = c + tmax[:, None] * u
    boundary[np.arange(count), facet] = 0.0
    return interior, boundary, facet


@dataclass(frozen=True)
class DualityReport:
    m: float
    r: float
    R: float
    polar_max_excess: float
    polar_facet_gap: float
    fundamental_min: float
    fundamental_max: float
    fundamental_ok: bool
    design_inner_min: float | None
    design_inner_max: float | None
    self_dual_candidates: int
    self_dual_accepted: int
    self_dual_sampled_only: int
    self_dual_min_eig_accepted: float
    self_dual_max_eig_rejected: float
    self_dual_ok: bool
    d_vertices_in_range: bool
    range_in_delta: bool
    inscribed_touch_residual: float | None
    basis_symmetry_residual: float | None
    seed: int | None
    passed: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def duality_checks(povm: Povm, samples: int = 1000, seed=None, tol: float = 1e-10) -> DualityReport:
    """Sampled verification of polarity, fundamental inequalities and self-duality.

    (a) For ``p`` in the primal polytope and each vertex ``f_k`` of ``D``,
        ``<iota(p) - c, f_k - c> <= m^2`` with equality on the facet ``p_k = 0``.
    (b) For ``p, q`` in the range, ``-m^2 <= <p - c, q - c> <= R^2``; for
        2-designs also ``d m^2 <= <p, q> <= 2 d m^2``.
    (c) Points of ``A`` that satisfy the dual inequality against every pure
        image (decided exactly by a minimum eigenvalue) reconstruct to
        positive operators, and points that violate it do not.
    (d) ``D`` lies in the range and sampled range points lie in ``Delta``.
    """
    rep = morphophoricity_report(povm)
    if not rep.is_morphophoric:
        raise NotMorphophoricError("duality checks need a morphophoric POVM")
    rng = rng_from(seed)
    d, n = povm.dim, povm.n
    m, r, R = radii(rep.alpha, d)
    c = povm.center
    f = basis_distributions(povm)
    fc = f - c

    # (a)
    interior, boundary, facet = sample_primal_polytope(povm, samples, rng)
    pts = np.concatenate([interior, boundary])
    inv = 2 * c - pts
    polar = (inv - c) @ fc.T
    polar_max_excess = float(np.max(polar) - m * m)
    on_facet = polar[samples + np.arange(samples), facet]
    polar_facet_gap = float(np.max(np.abs(on_facet - m * m)))

    # (b)
    states = np.concatenate([haar_pure_states(d, samples, rng), hs_mixed_states(d, samples, rng)])
    Q = measurement_map(povm, states)
    Qc = Q - c
    half = len(Q) // 2
    inner = np.einsum("ij,ij->i", Qc[:half], Qc[half : 2 * half])
    inner = np.concatenate([inner, np.einsum("ij,ij->i", Qc[:half], Qc[:half])])
    fmin, fmax = float(inner.min()), float(inner.max())
    fundamental_ok = fmin >= -m * m - tol and fmax <= R * R + tol
    dmin = dmax = None
    design = as_two_design(povm)
    if design is not None:
        raw = np.einsum("ij,ij->i", Q[:half], Q[half : 2 * half])
        dmin, dmax = float(raw.min()), float(raw.max())
        fundamental_ok = fundamental_ok and dmin >= d * m * m - tol and dmax <= 2 * d * m * m + tol

    # (c)
    space = primal_affine_space(povm)
    radius = rng.uniform(0, 1.5 * R, size=samples)
    dirs = rng.standard_normal((samples, space.dim)) @ space.directions
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    cand = c + radius[:, None] * dirs
    pure_imgs = Qc[: len(Q) // 2]
    sampled_ok = np.min((cand - c) @ pure_imgs.T, axis=1) >= -m * m - tol
    traceless = linalg.traceless_project(povm.effects)
    X = np.einsum("sj,jab->sab", cand - c, traceless)
    exact_ok = np.linalg.eigvalsh(X)[:, 0] >= -m * m - tol
    tau_min = np.array([linalg.min_eigenvalue(reconstruct_state(povm, p)) for p in cand])
    acc_min = float(tau_min[exact_ok].min()) if exact_ok.any() else float("inf")
    rej_max = float(tau_min[~exact_ok].max()) if (~exact_ok).any() else float("-inf")
    self_dual_ok = bool(acc_min >= -1e-6 and rej_max < 1e-9 and np.all(sampled_ok[exact_ok]))

    # (d)
    d_in = all(reconstruction_membership(povm, fk) for fk in f)
    range_in_delta = bool(np.min(Q) >= -1e-12 and space.contains(Q, tol=1e-10))

    touch = sym = None
    if design is not None and d > 1:
        rho_perp = (np.eye(d) - design.states) / (d - 1)
        fp = measurement_map(povm, rho_perp)
        touch = float(
            max(
                np.max(np.abs(fp[np.arange(n), np.arange(n)])),
                np.max(np.abs(np.linalg.norm(fp - c, axis=1) - r)),
            )
        )
    if is_equal_trace(povm):
        sym = float(np.max(np.abs(f - f.T)))

    passed = bool(
        polar_max_excess <= tol
        and polar_facet_gap <= 1e-9
        and fundamental_ok
        and self_dual_ok
        and d_in
        and range_in_delta
        and (touch is None or touch <= 1e-10)
        and (sym is None or sym <= 1e-12)
    )
    return DualityReport(
        m=m,
        r=r,
        R=R,
        polar_max_excess=polar_max_excess,
        polar_facet_gap=polar_facet_gap,
        fundamental_min=fmin,
        fundamental_max=fmax,
        fundamental_ok=bool(fundamental_ok),
        design_inner_min=dmin,
        design_inner_max=dmax,
        self_dual_candidates=int(samples),
        self_dual_accepted=int(exact_ok.sum()),
        self_dual_sampled_only=int(np.sum(sampled_ok & ~exact_ok)),
        self_dual_min_eig_accepted=acc_min,
        self_dual_max_eig_rejected=rej_max,
        self_dual_ok=self_dual_ok,
        d_vertices_in_range=bool(d_in),
        range_in_delta=range_in_delta,
        inscribed_touch_residual=touch,
        basis_symmetry_residual=sym,
        seed=seed if isinstance(seed, int) else None,
        passed=passed,
    )
