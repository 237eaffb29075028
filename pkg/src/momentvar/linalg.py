"""Dense complex linear algebra kernel for small matrices (n <= ~64).

Thin, validated wrappers around LAPACK (via numpy) providing the three
primitives the rest of the package is built on: Hermitian eigendecomposition,
rank-revealing nullspaces and minimal-norm least squares.  All functions are
pure and deterministic: eigenvalues come back ascending, kernel bases are
canonicalized to a pivot-ordered, phase-fixed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Pivots/singular values below RANK_TOL * max(shape) * (largest pivot) count
# as zero.  Catalog structure constants are exact small integers, so the
# spectral gaps this has to resolve are O(1).
DEFAULT_RANK_TOL = 1e-9


@dataclass(frozen=True)
class HermEig:
    """Eigendecomposition of a Hermitian matrix.

    eigenvalues are real and ascending; eigenvectors is unitary with column i
    paired to eigenvalue i.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_cmatrix(a) -> np.ndarray:
    """Coerce to a finite complex 2-d array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got array of ndim {m.ndim}")
    if m.size and not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def hermitian_eig(a, herm_tol: float = 1e-8) -> HermEig:
    """Eigendecomposition of a Hermitian matrix, ascending eigenvalues.

    The input is symmetrized internally; a deviation from Hermitianity larger
    than herm_tol (relative to the Frobenius norm) is an error.
    """
    m = as_cmatrix(a)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    if m.size == 0:
        raise ValueError("empty matrix")
    scale = np.linalg.norm(m)
    if np.linalg.norm(m - m.conj().T) > herm_tol * max(scale, 1.0):
        raise ValueError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return HermEig(w, v)


def nullspace(a, tol: float = DEFAULT_RANK_TOL, scale: float = 0.0) -> np.ndarray:
    """Orthonormal basis (columns) of {v : ||A v|| <= tol-scale * ||v||}.

    Singular values below tol * max(shape) * max(sigma_max, scale) are
    treated as zero; pass the natural scale of the system when the matrix
    itself may be a roundoff-level perturbation of zero (a pure relative
    cutoff would then see full rank in noise).  The basis is canonical: it
    depends only on the kernel subspace, with vectors ordered by the row
    index of their leading (pivot) coordinate and phased so the pivot entry
    is real positive.
    """
    m = as_cmatrix(a)
    if m.size == 0:
        raise ValueError("empty matrix")
    if tol <= 0:
        raise ValueError("tol must be positive")
    _, s, vh = np.linalg.svd(m)
    cutoff = tol * max(m.shape) * max(s[0] if s.size else 0.0, scale)
    rank = int(np.sum(s > cutoff))
    kernel = vh[rank:].conj().T
    return _pivot_canonical(kernel)


def _pivot_canonical(basis: np.ndarray) -> np.ndarray:
    """Canonical orthonormal basis of span(basis), pivot-ordered.

    Works on the orthogonal projector, so the result depends only on the
    subspace: Gram-Schmidt over projector columns in index order, picking the
    first column whose deflated norm is within a factor 2 of the current
    maximum (keeps pivots well conditioned while staying deterministic).
    """
    n, k = basis.shape
    if k == 0 or k == n:
        # Trivial kernels: identity is already canonical.
        return np.eye(n, dtype=complex) if k == n else basis
    proj = basis @ basis.conj().T
    cols: list[np.ndarray] = []
    remaining = proj.copy()
    for _ in range(k):
        norms = np.linalg.norm(remaining, axis=0)
        best = norms.max()
        j = int(np.argmax(norms >= 0.5 * best))
        v = remaining[:, j]
        for b in cols:  # re-orthogonalize against accepted vectors
            v = v - b * (b.conj() @ v)
        v = v / np.linalg.norm(v)
        pivot = int(np.argmax(np.abs(v) >= 0.5 * np.abs(v).max()))
        phase = v[pivot] / abs(v[pivot])
        v = v * phase.conj()
        cols.append(v)
        remaining = remaining - np.outer(v, v.conj() @ remaining)
    out = np.column_stack(cols)
    order = np.argsort([int(np.argmax(np.abs(c) >= 0.5 * np.abs(c).max())) for c in cols])
    return out[:, order]


def lstsq_min_norm(a, b) -> tuple[np.ndarray, float]:
    """Minimal-norm x minimizing ||A x - b||; returns (x, residual)."""
    m = as_cmatrix(a)
    rhs = np.asarray(b, dtype=complex).reshape(-1)
    if rhs.shape[0] != m.shape[0]:
        raise ValueError("shape mismatch between matrix and right-hand side")
    x, _, _, _ = np.linalg.lstsq(m, rhs, rcond=None)
    residual = float(np.linalg.norm(m @ x - rhs))
    return x, residual


def orthonormal_range(a, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the column space of a."""
    m = as_cmatrix(a)
    if m.size == 0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    cutoff = tol * max(m.shape) * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > cutoff))
    return _pivot_canonical(u[:, :rank]) if 0 < rank < m.shape[0] else u[:, :rank]


def subspace_contains(basis: np.ndarray, vectors: np.ndarray, tol: float = 1e-8) -> bool:
    """True iff every column of `vectors` lies in span(basis) up to tol."""
    if vectors.size == 0:
        return True
    if basis.size == 0:
        return bool(np.all(np.linalg.norm(vectors, axis=0) <= tol))
    residual = vectors - basis @ (basis.conj().T @ vectors)
    norms = np.linalg.norm(vectors, axis=0)
    return bool(np.all(np.linalg.norm(residual, axis=0) <= tol * np.maximum(norms, 1.0)))


def subspace_dim_of_union(a: np.ndarray, b: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> int:
    """Dimension of span(a) + span(b)."""
    stacked = np.hstack([a, b]) if a.size and b.size else (a if b.size == 0 else b)
    if stacked.size == 0:
        return 0
    return orthonormal_range(stacked, tol).shape[1]
