"""POVMs, informational completeness and the morphophoricity test.

A POVM is morphophoric when its probability range is similar to the state
space.  That holds exactly when the traceless parts of the effects form a
tight frame on traceless Hermitian operators; the frame bound is then the
square ``alpha`` of the similarity ratio.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DecompositionError, DimensionMismatchError, PovmValidationError
from .linalg import EQ_TOL, FRAME_TOL


def _violations(E: np.ndarray, tol: float):
    out = []
    n, d = E.shape[0], E.shape[1]
    herm = np.max(np.abs(E - np.conj(np.swapaxes(E, 1, 2))))
    if herm > tol:
        out.append(("hermitian", "effects are not Hermitian", float(herm)))
        return out
    E = (E + np.conj(np.swapaxes(E, 1, 2))) / 2
    mins = np.linalg.eigvalsh(E)[:, 0]
    for j in np.flatnonzero(mins < -tol):
        out.append(("psd", f"effect {j} has eigenvalue {mins[j]:.3e}", float(-mins[j])))
    norms = np.linalg.norm(E, axis=(1, 2))
    for j in np.flatnonzero(norms <= 1e-12):
        out.append(("nonzero", f"effect {j} is zero", float(norms[j])))
    dev = float(np.linalg.norm(E.sum(axis=0) - np.eye(d)))
    if dev > tol:
        out.append(("sum", f"effects sum to identity only up to HS distance {dev:.3e}", dev))
    return out


@dataclass(frozen=True, eq=False)
class Povm:
    """Ordered effects ``(n, d, d)`` summing to the identity.

    Construction validates positivity, non-vanishing effects and the sum rule
    at tolerance ``tol``; failures raise :class:`PovmValidationError` listing
    every violated invariant.
    """

    effects: np.ndarray
    label: str = ""
    tol: float = field(default=EQ_TOL, repr=False)

    def __post_init__(self):
        E = np.array(self.effects, dtype=complex)
        if E.ndim == 2:
            E = E[None]
        if E.ndim != 3 or E.shape[1] != E.shape[2] or E.shape[0] == 0 or E.shape[1] == 0:
            raise PovmValidationError([("shape", f"expected (n, d, d) effects, got {E.shape}", 0.0)])
        if not np.all(np.isfinite(E)):
            raise PovmValidationError([("finite", "effects contain non-finite entries", float("inf"))])
        problems = _violations(E, self.tol)
        if problems:
            raise PovmValidationError(problems)
        E = (E + np.conj(np.swapaxes(E, 1, 2))) / 2
        E.setflags(write=False)
        object.__setattr__(self, "effects", E)

    @property
    def n(self) -> int:
        return self.effects.shape[0]

    @property
    def dim(self) -> int:
        return self.effects.shape[1]

    def __len__(self):
        return self.n

    def __iter__(self):
        return iter(self.effects)

    def __getitem__(self, j):
        return self.effects[j]

    @property
    def traces(self) -> np.ndarray:
        return np.trace(self.effects, axis1=1, axis2=2).real

    @property
    def center(self) -> np.ndarray:
        """c_Pi = p_Pi(I/d), the image of the maximally mixed state."""
        return self.traces / self.dim

    def traceless_coordinates(self) -> np.ndarray:
        """``(n, d^2-1)`` Gell-Mann coordinates of the traceless parts."""
        return linalg.coordinates(self.effects, linalg.gell_mann_basis(self.dim))


def validate(effects, tol: float = EQ_TOL, label: str = "") -> Povm:
    return Povm(effects, label=label, tol=tol)


def check_probability_vector(p, tol: float = EQ_TOL) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("probability vector must be a nonempty 1-d array")
    if np.min(p) < -1e-12:
        raise ValueError(f"probability vector has negative entry {np.min(p):.3e}")
    if abs(p.sum() - 1) > tol:
        raise ValueError(f"probability vector sums to {p.sum():.12g}")
    return p


def measurement_map(povm: Povm, rho) -> np.ndarray:
    """Born-rule probabilities ``tr(rho Pi_j)``.

    ``rho`` may be a single ``(d, d)`` operator or a stack ``(m, d, d)``; the
    result has shape ``(n,)`` or ``(m, n)``.  Works for any Hermitian input,
    not only states.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (povm.dim, povm.dim):
        raise DimensionMismatchError(f"state has shape {rho.shape[-2:]}, POVM acts on C^{povm.dim}")
    return np.einsum("jab,...ba->...j", povm.effects, rho).real


def span_rank(povm: Povm, rel_tol: float = EQ_TOL) -> int:
    d = povm.dim
    basis = np.concatenate([np.eye(d)[None] / np.sqrt(d), linalg.gell_mann_basis(d)])
    return linalg.matrix_rank(linalg.coordinates(povm.effects, basis), rel_tol)


def traceless_span_rank(povm: Povm, rel_tol: float = EQ_TOL) -> int:
    return linalg.matrix_rank(povm.traceless_coordinates(), rel_tol)


def is_informationally_complete(povm: Povm, rel_tol: float = EQ_TOL):
    """Return ``(is_ic, rank)`` where ``rank`` is the dimension of lin(Pi)."""
    rank = span_rank(povm, rel_tol)
    return rank == povm.dim**2, rank


def has_norm_one_property(povm: Povm, tol: float = EQ_TOL) -> bool:
    top = np.linalg.eigvalsh(povm.effects)[:, -1]
    return bool(np.all(np.abs(top - 1) <= tol))


@dataclass(frozen=True)
class SimplexCheck:
    norm_one: bool
    vertex_attained: tuple
    sampled_vertex_gap: float
    consistent: bool


def full_simplex_check(povm: Povm, samples: int = 2000, seed=None, tol: float = 1e-8) -> SimplexCheck:
    """Compare the norm-1 property with attainment of the simplex vertices.

    Vertex ``e_k`` is attained iff some unit ``z`` has ``<z|Pi_k|z> >= 1 - tol``;
    the top eigenvector of ``Pi_k`` is the maximiser, so this is decided
    exactly.  Sampled pure states only add a diagnostic gap.
    """
    from .sampling import haar_pure_states

    w, V = np.linalg.eigh(povm.effects)
    z = V[:, :, -1]
    best = np.einsum("ka,kab,kb->k", z.conj(), povm.effects, z).real
    attained = tuple(bool(b >= 1 - tol) for b in best)
    probs = measurement_map(povm, haar_pure_states(povm.dim, samples, seed))
    gap = float(1 - probs.max(axis=0).min())
    norm1 = has_norm_one_property(povm)
    return SimplexCheck(norm1, attained, gap, all(attained) == norm1)


def frame_operator(povm: Povm, weights=None) -> np.ndarray:
    """Frame operator of the traceless parts in Gell-Mann coordinates.

    ``S = sum_j w_j |pi0(Pi_j))(pi0(Pi_j)|`` as a real symmetric
    ``(d^2-1) x (d^2-1)`` matrix; ``weights`` default to 1.
    """
    F = povm.traceless_coordinates()
    if weights is not None:
        return F.T @ (np.asarray(weights, dtype=float)[:, None] * F)
    return F.T @ F


def alpha_closed_form(povm: Povm) -> float:
    """Squared similarity ratio from traces: (sum tr Pi^2 - sum (tr Pi)^2 / d) / (d^2 - 1)."""
    d = povm.dim
    tr_sq = np.einsum("jab,jba->j", povm.effects, povm.effects).real
    return float((tr_sq.sum() - (povm.traces**2).sum() / d) / (d * d - 1))


def beta_closed_form(povm: Povm) -> float:
    d = povm.dim
    tr_sq = np.einsum("jab,jba->j", povm.effects, povm.effects).real
    return float(((tr_sq / povm.traces).sum() - 1) / (d * d - 1))


def _tightness(S: np.ndarray):
    k = S.shape[0]
    mean = float(np.trace(S) / k)
    w = np.linalg.eigvalsh(S)
    deviation = float(np.max(np.abs(w - mean)))
    return mean, deviation, float(w[-1] - w[0])


@dataclass(frozen=True)
class MorphophoricityReport:
    is_morphophoric: bool
    alpha: float
    frame_deviation: float
    spectral_spread: float
    alpha_closed_form: float
    is_tight_ic: bool
    beta: float
    tight_ic_deviation: float
    beta_closed_form: float
    is_ic: bool
    rank_of_span: int
    traceless_rank: int
    tolerance: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def morphophoricity_report(povm: Povm, tol: float = FRAME_TOL) -> MorphophoricityReport:
    """Decide morphophoricity and tight-IC status of ``povm``.

    ``frame_deviation`` is the operator norm of ``S - alpha I`` where
    ``alpha = tr S / (d^2 - 1)``; the POVM is morphophoric iff it is at most
    ``tol`` and ``alpha > tol``.  The tight-IC test is the same with weights
    ``1 / tr Pi_j``.
    """
    alpha, dev, spread = _tightness(frame_operator(povm))
    beta, dev_ic, _ = _tightness(frame_operator(povm, 1.0 / povm.traces))
    is_ic, rank = is_informationally_complete(povm)
    return MorphophoricityReport(
        is_morphophoric=bool(dev <= tol and alpha > tol),
        alpha=alpha,
        frame_deviation=dev,
        spectral_spread=spread,
        alpha_closed_form=alpha_closed_form(povm),
        is_tight_ic=bool(dev_ic <= tol and beta > tol),
        beta=beta,
        tight_ic_deviation=dev_ic,
        beta_closed_form=beta_closed_form(povm),
        is_ic=is_ic,
        rank_of_span=rank,
        traceless_rank=traceless_span_rank(povm),
        tolerance=tol,
    )


def mix_with_noise(povm: Povm, lam: float, q=None) -> Povm:
    """Effects ``lam * Pi_j + (1 - lam) * q_j * I``; ``q`` defaults to uniform."""
    if not 0 < lam <= 1:
        raise ValueError(f"mixing weight must lie in (0, 1], got {lam}")
    q = np.full(povm.n, 1 / povm.n) if q is None else check_probability_vector(q)
    if q.size != povm.n:
        raise DimensionMismatchError(f"noise vector has {q.size} entries, POVM has {povm.n}")
    E = lam * povm.effects + (1 - lam) * q[:, None, None] * np.eye(povm.dim)
    return Povm(E, label=povm.label and f"{povm.label}~noise")


def union(povms, weights) -> Povm:
    """Concatenate ``t_i * Pi^i`` for convex weights ``t_i``."""
    weights = np.asarray(weights, dtype=float)
    if len(povms) != weights.size or np.any(weights < 0) or abs(weights.sum() - 1) > EQ_TOL:
        raise ValueError("union needs one nonnegative weight per POVM, summing to 1")
    return Povm(np.concatenate([t * P.effects for P, t in zip(povms, weights)]))


@dataclass(frozen=True)
class BoundaryDecomposition:
    boundary_povm: Povm
    lam: float
    noise_weights: np.ndarray


def boundary_decompose(povm: Povm, boundary_tol: float = 1e-9) -> BoundaryDecomposition:
    """Split ``Pi = lam E + (1 - lam) q I`` with ``E`` boundary.

    ``q`` and ``lam`` come from the smallest eigenvalue of each effect.  The
    boundary part is morphophoric whenever ``Pi`` is (its traceless parts are
    those of ``Pi`` scaled by ``1/lam``).
    """
    low = np.linalg.eigvalsh(povm.effects)[:, 0]
    if np.all(low <= boundary_tol):
        raise DecompositionError("POVM is already boundary")
    total = float(np.clip(low, 0, None).sum())
    if total >= 1 - EQ_TOL:
        raise DecompositionError("every effect is a multiple of the identity; no boundary part exists")
    q = np.clip(low, 0, None) / total
    lam = 1 - total
    E = (povm.effects - (1 - lam) * q[:, None, None] * np.eye(povm.dim)) / lam
    return BoundaryDecomposition(Povm(E), lam, q)


def dual_boundary_decompose(povm: Povm, degenerate_tol: float = EQ_TOL) -> BoundaryDecomposition:
    """Find boundary ``E~`` with ``lam Pi + (1 - lam) E~ = q I``.

    Built from the largest eigenvalue of each effect.  When those sum to 1
    (all effects scalar) ``lam`` would be 1 and the construction degenerates;
    that case raises :class:`DecompositionError`.
    """
    top = np.linalg.eigvalsh(povm.effects)[:, -1]
    total = float(top.sum())
    if total <= 1 + degenerate_tol:
        raise DecompositionError(f"largest eigenvalues sum to {total:.12g}; dual boundary POVM is degenerate")
    lam = 1 / total
    q = top / total
    E = (q[:, None, None] * np.eye(povm.dim) - lam * povm.effects) / (1 - lam)
    return BoundaryDecomposition(Povm(E), lam, q)


def rank_one_vectors(povm: Povm, tol: float = 1e-9):
    """Unit vectors ``v_j`` with ``Pi_j = tr(Pi_j) |v_j><v_j|``, or ``None``.

    Returns ``None`` unless every effect has rank one at tolerance ``tol``.
    """
    w, V = np.linalg.eigh(povm.effects)
    if np.any(np.abs(w[:, :-1]) > tol):
        return None
    return V[:, :, -1].copy()


def is_equal_trace(povm: Povm, tol: float = EQ_TOL) -> bool:
    t = povm.traces
    return bool(np.max(np.abs(t - t.mean())) <= tol)
