"""Sequential measurements and the primal equation.

A "sky" POVM ``Pi`` is measured first with the Lüders instrument, then a
"ground" POVM ``Xi``.  For morphophoric ``Pi`` the ground deviations are a
fixed linear image of the sky deviations: ``delta_Xi = (d/alpha) C delta_Pi``
with ``C`` the covariance matrix at the maximally mixed state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatchError,
    NotADesignError,
    NotInformationallyCompleteError,
    NotMorphophoricError,
)
from .povm import (
    Povm,
    is_equal_trace,
    is_informationally_complete,
    measurement_map,
    morphophoricity_report,
    rank_one_vectors,
)
from .sampling import random_states, rng_from

ZERO_PROB = 1e-12


def _same_dim(sky: Povm, ground: Povm):
    if sky.dim != ground.dim:
        raise DimensionMismatchError(f"sky acts on C^{sky.dim}, ground on C^{ground.dim}")


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """``matrix[j, k]`` is the probability of sky outcome j then ground outcome k.

    ``conditionals[j, k]`` is ``p(k | j)``; rows with sky probability below
    ``1e-12`` are NaN (undefined).
    """

    matrix: np.ndarray
    sky_marginal: np.ndarray
    conditionals: np.ndarray

    @property
    def ground_marginal(self) -> np.ndarray:
        return self.matrix.sum(axis=0)


def lueders_joint(sky: Povm, ground: Povm, rho) -> JointDistribution:
    _same_dim(sky, ground)
    rho = linalg.as_hermitian(rho)
    if rho.shape[0] != sky.dim:
        raise DimensionMismatchError(f"state has dimension {rho.shape[0]}, POVMs act on C^{sky.dim}")
    roots = np.array([linalg.operator_sqrt(E) for E in sky.effects])
    post = roots @ rho @ roots
    joint = np.einsum("kab,jba->jk", ground.effects, post).real
    p_sky = np.trace(post, axis1=1, axis2=2).real
    defined = p_sky > ZERO_PROB
    cond = np.full_like(joint, np.nan)
    cond[defined] = joint[defined] / p_sky[defined, None]
    gap = np.max(np.abs(joint.sum(axis=1) - measurement_map(sky, rho)))
    if gap > 1e-10:
        raise ArithmeticError(f"Lüders marginal inconsistent by {gap:.3e}")
    return JointDistribution(joint, p_sky, cond)


def covariance_matrix(sky: Povm, ground: Povm) -> np.ndarray:
    """``C[k, j] = tr(pi0(Xi_k) pi0(Pi_j)) / d``, shape ``(N, n)``."""
    _same_dim(sky, ground)
    a = linalg.traceless_project(ground.effects)
    b = linalg.traceless_project(sky.effects)
    return np.einsum("kab,jba->kj", a, b).real / sky.dim


def covariance_from_joint(sky: Povm, ground: Povm) -> np.ndarray:
    """Same matrix from its definition: joint minus product of marginals at ``I/d``."""
    d = sky.dim
    centre = np.eye(d) / d
    joint = lueders_joint(sky, ground, centre).matrix
    return joint.T - np.outer(measurement_map(ground, centre), measurement_map(sky, centre))


def deviation(povm: Povm, rho) -> np.ndarray:
    return measurement_map(povm, rho) - povm.center


def _alpha(sky: Povm) -> float:
    alpha = morphophoricity_report(sky).alpha
    if not alpha > 0:
        raise NotMorphophoricError(f"similarity ratio squared must be positive, got {alpha:.3e}")
    return alpha


def urgleichung_check(sky: Povm, ground: Povm, rho, alpha: float | None = None) -> float:
    """Max-norm residual of ``delta_Xi - (d/alpha) C delta_Pi``.

    ``rho`` may be a stack of states; the worst residual is returned.  With
    ``alpha`` omitted it is read off the sky's frame operator, so a
    non-morphophoric sky gives a visibly nonzero residual instead of an error.
    """
    alpha = _alpha(sky) if alpha is None else alpha
    C = covariance_matrix(sky, ground)
    lhs = deviation(ground, rho)
    rhs = (sky.dim / alpha) * deviation(sky, rho) @ C.T
    return float(np.max(np.abs(lhs - rhs)))


def rank_one_conditionals(sky: Povm, ground: Povm) -> np.ndarray:
    """``p(k | j)`` for a rank-1 sky, evaluated at the maximally mixed state."""
    return lueders_joint(sky, ground, np.eye(sky.dim) / sky.dim).conditionals


def rank1_urgleichung_check(sky: Povm, ground: Povm, rho) -> float:
    """Residual of ``p_k = sum_j p(k|j) ((d+1) p_j - d/n)`` for a rank-1 equal-trace sky."""
    if rank_one_vectors(sky) is None or not is_equal_trace(sky):
        raise NotADesignError("rank-1 form needs a rank-1 equal-trace sky POVM")
    d, n = sky.dim, sky.n
    cond = rank_one_conditionals(sky, ground)
    p = measurement_map(sky, rho)
    predicted = ((d + 1) * p - d / n) @ cond
    return float(np.max(np.abs(measurement_map(ground, rho) - predicted)))


class UrgleichungFit(NamedTuple):
    holds: bool
    alpha: float
    residual: float


def morphophoricity_from_urgleichung(sky: Povm, ground: Povm, trials: int | None = None, seed=None, tol: float = 1e-9) -> UrgleichungFit:
    """Fit a single ``alpha`` to ``alpha delta_Xi = d C delta_Pi`` over random states.

    With an informationally complete ground POVM the fit is exact iff the sky
    is morphophoric, and then ``alpha`` is its similarity ratio squared.
    """
    ic, rank = is_informationally_complete(ground)
    if not ic:
        raise NotInformationallyCompleteError(f"ground POVM spans only {rank} of {ground.dim ** 2} dimensions")
    _same_dim(sky, ground)
    d = sky.dim
    trials = 5 * d * d if trials is None else int(trials)
    states = random_states(d, trials, rng_from(seed))
    x = deviation(ground, states)
    y = d * deviation(sky, states) @ covariance_matrix(sky, ground).T
    denom = float(np.sum(x * x))
    alpha = float(np.sum(x * y) / denom) if denom > 0 else 0.0
    residual = float(np.max(np.abs(alpha * x - y)))
    return UrgleichungFit(bool(residual < tol and alpha > tol), alpha, residual)


def total_probability_gap(sky: Povm, ground: Povm, rho) -> float:
    """``max_k |p_Xi(rho)_k - sum_j p_j p(k|j)|``: how far the classical law is off."""
    joint = lueders_joint(sky, ground, rho)
    return float(np.max(np.abs(measurement_map(ground, rho) - joint.ground_marginal)))
