"""Small-dimension Hermitian linear algebra.

Operators are plain ``numpy`` complex arrays of shape ``(d, d)``; stacks of
operators have shape ``(n, d, d)``.  All tolerances are absolute.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import (
    DimensionMismatchError,
    EigenSolverError,
    NotHermitianError,
    NotPSDError,
)

EQ_TOL = 1e-10
ORTH_TOL = 1e-8
FRAME_TOL = 1e-9
HERMITIAN_TOL = 1e-10

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def as_hermitian(A, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Coerce ``A`` to a Hermitian complex array, symmetrising small defects.

    Raises :class:`NotHermitianError` if ``A`` is not square/finite or its
    anti-Hermitian part exceeds ``tol`` entrywise.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise NotHermitianError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NotHermitianError("matrix has non-finite entries")
    defect = np.max(np.abs(A - A.conj().T)) if A.size else 0.0
    if defect > tol:
        raise NotHermitianError(f"matrix is not Hermitian (max |A - A^dag| = {defect:.3e})")
    return (A + A.conj().T) / 2


def _check_same_dim(A, B):
    if A.shape[-2:] != B.shape[-2:]:
        raise DimensionMismatchError(f"dimension mismatch: {A.shape[-2:]} vs {B.shape[-2:]}")


def hs_inner(A, B) -> float:
    """Hilbert-Schmidt inner product tr(AB) for Hermitian ``A``, ``B``."""
    A = np.asarray(A)
    B = np.asarray(B)
    _check_same_dim(A, B)
    return float(np.einsum("ij,ji->", A, B).real)


def hs_norm(A) -> float:
    return float(np.linalg.norm(np.asarray(A)))


def traceless_project(A) -> np.ndarray:
    """Orthogonal projection onto traceless operators: A - (tr A / d) I."""
    A = np.asarray(A, dtype=complex)
    d = A.shape[-1]
    tr = np.trace(A, axis1=-2, axis2=-1)
    return A - (tr / d)[..., None, None] * np.eye(d)


def hermitian_eig(A, residual_tol: float = 1e-10):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, V)`` with ``w`` ascending and the columns of ``V`` the
    corresponding orthonormal eigenvectors.
    """
    A = np.asarray(A, dtype=complex)
    try:
        w, V = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(str(exc)) from exc
    scale = max(np.linalg.norm(A, 2), 1.0)
    resid = np.max(np.abs(A @ V - V * w)) if A.size else 0.0
    if resid > residual_tol * scale:
        raise EigenSolverError(f"eigen residual {resid:.3e} exceeds tolerance")
    return w, V


def min_eigenvalue(A) -> float:
    return float(np.linalg.eigvalsh(np.asarray(A, dtype=complex))[0])


def operator_sqrt(A, psd_tol: float = 1e-8) -> np.ndarray:
    """Square root of a positive semidefinite operator.

    Eigenvalues down to ``-psd_tol * ||A||`` are clamped to zero; anything
    more negative raises :class:`NotPSDError`.  Eigenvalues within rounding
    noise of zero are also zeroed, so projectors map to themselves.
    """
    w, V = hermitian_eig(A)
    scale = max(float(np.max(np.abs(w))) if w.size else 0.0, 1e-300)
    if w[0] < -psd_tol * scale:
        raise NotPSDError(f"operator has eigenvalue {w[0]:.3e} < 0")
    noise = 16 * np.finfo(float).eps * w.size * scale
    root = np.sqrt(np.where(w > noise, w, 0.0))
    S = (V * root) @ V.conj().T
    return (S + S.conj().T) / 2


@lru_cache(maxsize=None)
def _gell_mann(d: int) -> np.ndarray:
    mats = []
    for j in range(d):
        for k in range(j + 1, d):
            M = np.zeros((d, d), dtype=complex)
            M[j, k] = M[k, j] = 1 / np.sqrt(2)
            mats.append(M)
    for j in range(d):
        for k in range(j + 1, d):
            M = np.zeros((d, d), dtype=complex)
            M[j, k] = -1j / np.sqrt(2)
            M[k, j] = 1j / np.sqrt(2)
            mats.append(M)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(complex))
    out = np.array(mats)
    out.setflags(write=False)
    return out


def gell_mann_basis(d: int) -> np.ndarray:
    """HS-orthonormal basis of traceless Hermitian d x d matrices.

    Ordered as symmetric, antisymmetric, then diagonal families; for ``d = 2``
    this is ``(X, Y, Z) / sqrt(2)``.  Returns a read-only ``(d^2-1, d, d)``
    array.
    """
    if int(d) != d or d < 2:
        raise ValueError(f"Gell-Mann basis needs d >= 2, got {d}")
    return _gell_mann(int(d))


def coordinates(ops, basis) -> np.ndarray:
    """Real coordinates ``tr(A B_k)`` of one operator or a stack of them."""
    ops = np.asarray(ops)
    return np.einsum("kij,...ji->...k", basis, ops).real


def from_coordinates(coords, basis) -> np.ndarray:
    return np.einsum("...k,kij->...ij", np.asarray(coords, dtype=float), basis)


def bloch_embed(rho) -> np.ndarray:
    """Coordinates of a qubit state in the scaled Bloch convention.

    The convention is ``rho - I/2 = sum_i b_i sigma_i / sqrt(2)``, so pure
    states land on the sphere of radius ``1/sqrt(2)`` and the embedding is an
    isometry for the Hilbert-Schmidt norm.  Multiply by ``sqrt(2)`` to get the
    textbook unit Bloch vector.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise DimensionMismatchError("Bloch embedding is only defined for d = 2")
    return coordinates(rho, gell_mann_basis(2))


def bloch_unembed(b) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    if b.shape != (3,):
        raise DimensionMismatchError("Bloch vector must have 3 coordinates")
    return np.eye(2) / 2 + from_coordinates(b, gell_mann_basis(2))


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def bloch_to_vector(r) -> np.ndarray:
    """Unit vector in C^2 whose projector has unit Bloch vector ``r``."""
    x, y, z = (float(c) for c in r)
    norm = np.sqrt(x * x + y * y + z * z)
    x, y, z = x / norm, y / norm, z / norm
    if z < -1 + 1e-15:
        return np.array([0.0, 1.0], dtype=complex)
    return np.array([1 + z, x + 1j * y], dtype=complex) / np.sqrt(2 * (1 + z))


def matrix_rank(M, rel_tol: float = 1e-10) -> int:
    s = np.linalg.svd(np.asarray(M), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))
