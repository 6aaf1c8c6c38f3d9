"""Seeded samplers for states and POVMs.

Pure states are Haar-distributed; mixed states follow the Hilbert-Schmidt
measure (rho = G G^dag / tr with G complex Ginibre).
"""

from __future__ import annotations

import numpy as np

DEFAULT_SEED = 0x5EED


def rng_from(seed=None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(DEFAULT_SEED if seed is None else seed)


def _ginibre(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def haar_vectors(d: int, count: int, rng) -> np.ndarray:
    """``count`` Haar-random unit vectors in C^d, shape ``(count, d)``."""
    v = _ginibre(rng_from(rng), count, d)
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def haar_pure_states(d: int, count: int, rng) -> np.ndarray:
    v = haar_vectors(d, count, rng)
    return np.einsum("ni,nj->nij", v, v.conj())


def hs_mixed_states(d: int, count: int, rng) -> np.ndarray:
    G = _ginibre(rng_from(rng), count, d, d)
    rho = G @ np.conj(np.swapaxes(G, 1, 2))
    tr = np.trace(rho, axis1=1, axis2=2).real
    rho = rho / tr[:, None, None]
    return (rho + np.conj(np.swapaxes(rho, 1, 2))) / 2


def random_states(d: int, count: int, rng, pure_fraction: float = 0.5) -> np.ndarray:
    """A mix of Haar pure and Hilbert-Schmidt mixed states."""
    rng = rng_from(rng)
    n_pure = int(round(count * pure_fraction))
    return np.concatenate([haar_pure_states(d, n_pure, rng), hs_mixed_states(d, count - n_pure, rng)])


def random_povm_effects(d: int, n: int, rng, rank: int | None = None) -> np.ndarray:
    """Effects of a random POVM (test utility, not a physical construction).

    Draws ``n`` random PSD matrices ``A_j`` and normalises them to
    ``S^{-1/2} A_j S^{-1/2}`` with ``S = sum_j A_j``.
    """
    rng = rng_from(rng)
    k = d if rank is None else rank
    G = _ginibre(rng, n, d, k)
    A = G @ np.conj(np.swapaxes(G, 1, 2))
    S = A.sum(axis=0)
    w, V = np.linalg.eigh(S)
    S_inv_half = (V / np.sqrt(w)) @ V.conj().T
    E = S_inv_half @ A @ S_inv_half
    return (E + np.conj(np.swapaxes(E, 1, 2))) / 2
