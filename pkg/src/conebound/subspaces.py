"""Rank-revealing subspace machinery for affine inclusions.

Orthonormal bases of column spaces and adjoint kernels with relative
rank thresholds; the linear-algebra substrate of the inclusion
classifier.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cones import ConeSpec, DimensionMismatch

RANK_TOL = 1e-10


class NonFiniteEntries(ValueError):
    pass


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis columns with the rank decision that produced them."""

    Q: np.ndarray
    rank: int
    tol: float

    @property
    def ambient_dim(self) -> int:
        return self.Q.shape[0]

    def project(self, v: np.ndarray) -> np.ndarray:
        """Orthogonal projection of v onto the span."""
        if self.rank == 0:
            return np.zeros_like(np.asarray(v, dtype=float))
        return self.Q @ (self.Q.T @ v)


@dataclass(frozen=True)
class AffineInclusion:
    """The feasibility problem A x + b in K."""

    A: np.ndarray
    b: np.ndarray
    cone: ConeSpec

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).ravel()
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise NonFiniteEntries("A and b must be finite")
        if A.shape[0] != b.shape[0]:
            raise DimensionMismatch(f"A has {A.shape[0]} rows but b has length {b.shape[0]}")
        if A.shape[0] != self.cone.m:
            raise DimensionMismatch(f"A has {A.shape[0]} rows but the cone lives in R^{self.cone.m}")
        if A.shape[1] < 1:
            raise DimensionMismatch("A must have at least one column")

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def map(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            x = x.reshape(1)
        return self.A @ x + self.b


def _checked(A: np.ndarray) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if not np.all(np.isfinite(A)):
        raise NonFiniteEntries("matrix has non-finite entries")
    return A


def image_basis(A: np.ndarray, tol: float = RANK_TOL) -> SubspaceBasis:
    """Orthonormal basis of the column space.

    Rank = number of singular values >= tol * sigma_max; the zero matrix
    yields a legitimate rank-0 basis.
    """
    if tol <= 0.0:
        raise ValueError("rank tolerance must be positive")
    A = _checked(A)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    rank = 0 if s.size == 0 or s[0] == 0.0 else int(np.sum(s >= tol * s[0]))
    return SubspaceBasis(Q=U[:, :rank].copy(), rank=rank, tol=tol)


def kernel_adjoint_basis(A: np.ndarray, tol: float = RANK_TOL) -> SubspaceBasis:
    """Orthonormal basis of Ker A^T, the orthogonal complement of Im A."""
    if tol <= 0.0:
        raise ValueError("rank tolerance must be positive")
    A = _checked(A)
    U, s, _ = np.linalg.svd(A, full_matrices=True)
    rank = 0 if s.size == 0 or s[0] == 0.0 else int(np.sum(s >= tol * s[0]))
    return SubspaceBasis(Q=U[:, rank:].copy(), rank=A.shape[0] - rank, tol=tol)


def contains_vector(basis: SubspaceBasis, v: np.ndarray, tol: float = 1e-8) -> bool:
    """True iff v lies in span(basis) up to tol * max(1, ||v||)."""
    v = np.asarray(v, dtype=float)
    if v.shape != (basis.ambient_dim,):
        raise DimensionMismatch(f"expected length {basis.ambient_dim}, got shape {v.shape}")
    resid = np.linalg.norm(v - basis.project(v))
    return resid <= tol * max(1.0, float(np.linalg.norm(v)))


def projection_residual(basis: SubspaceBasis, v: np.ndarray) -> float:
    """||v - P_span v|| / max(1, ||v||)."""
    v = np.asarray(v, dtype=float)
    return float(np.linalg.norm(v - basis.project(v)) / max(1.0, np.linalg.norm(v)))


def span_shift_invariance_check(points, tol: float = 1e-8) -> bool:
    """span(D - x) is the same subspace for every base point x in D.

    Checked pairwise over the first five points: equal ranks and matching
    orthogonal projectors.  A failure here indicates a broken
    factorization, not geometry.
    """
    pts = [np.asarray(p, dtype=float) for p in points]
    if len(pts) < 2:
        raise ValueError("need at least two points")
    D = np.column_stack(pts)
    heads = pts[:5]
    bases = [image_basis(D - x[:, None], tol=RANK_TOL) for x in heads]
    for i in range(len(heads)):
        for j in range(i + 1, len(heads)):
            bi, bj = bases[i], bases[j]
            if bi.rank != bj.rank:
                return False
            Pi = bi.Q @ bi.Q.T if bi.rank else np.zeros((bi.ambient_dim,) * 2)
            Pj = bj.Q @ bj.Q.T if bj.rank else np.zeros((bj.ambient_dim,) * 2)
            if np.abs(Pi - Pj).max() > tol:
                return False
    return True
