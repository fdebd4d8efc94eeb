"""Dense complex linear algebra on H and H (x) H.

Operators are plain ``numpy`` complex arrays. Kronecker products always put
the first factor on the outer blocks, so the basis state ``|i>|j>`` of
``C^d (x) C^d`` sits at flat index ``i * d + j``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, NotHermitianError, SubspaceError

TOL = 1e-10
# Largest Gram-matrix deviation that is still treated as input rounding and
# repaired instead of rejected.
SANITIZE_TOL = 1e-6


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def hermiticity_deviation(m: np.ndarray) -> float:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return float("inf")
    return float(np.max(np.abs(m - dagger(m)), initial=0.0))


def is_hermitian(m: np.ndarray, tol: float = TOL) -> bool:
    return hermiticity_deviation(m) <= tol


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product ``a (x) b``; ``a`` indexes the outer blocks."""
    return np.kron(as_matrix(a), as_matrix(b))


def swap_operator(d: int) -> np.ndarray:
    """SWAP on ``C^d (x) C^d``: ``S|i>|j> = |j>|i>``."""
    if d < 1:
        raise DimensionError(f"swap_operator needs d >= 1, got {d}")
    s = np.zeros((d * d, d * d), dtype=complex)
    i, j = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    s[(j * d + i).ravel(), (i * d + j).ravel()] = 1.0
    return s


def hermitian_eigensystem(m, tol: float = TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    Raises:
        NotHermitianError: if ``max|m - m^dagger|`` exceeds ``tol``. The
            offending deviation is attached as ``.deviation``.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"eigensystem of non-square matrix {m.shape}")
    dev = hermiticity_deviation(m)
    if dev > tol:
        raise NotHermitianError(dev)
    # symmetrize so LAPACK sees exactly Hermitian input
    evals, evecs = np.linalg.eigh((m + dagger(m)) / 2)
    return evals, evecs


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis of a subspace C of C^d, stored as columns of ``vectors``."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=complex)
        if v.ndim != 2 or v.shape[1] == 0:
            raise SubspaceError("subspace basis must contain at least one vector")
        object.__setattr__(self, "vectors", v)
        dev = orthonormality_deviation(v)
        if dev > TOL:
            raise SubspaceError(f"basis is not orthonormal (Gram deviation {dev:.3g})")

    @property
    def ambient_dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def projector(self) -> np.ndarray:
        return self.vectors @ dagger(self.vectors)

    @classmethod
    def from_vectors(cls, vectors: Sequence, sanitize_tol: float = SANITIZE_TOL) -> "SubspaceBasis":
        """Build a basis from row vectors, repairing rounding-level non-orthonormality.

        Vectors whose Gram matrix is within ``sanitize_tol`` of the identity are
        re-orthonormalized with two-pass Gram-Schmidt; anything further off is
        rejected.
        """
        rows = [np.asarray(v, dtype=complex).ravel() for v in vectors]
        if not rows:
            raise SubspaceError("subspace basis must contain at least one vector")
        if len({r.shape[0] for r in rows}) != 1:
            raise DimensionError("subspace vectors have different lengths")
        v = np.stack(rows, axis=1)
        dev = orthonormality_deviation(v)
        if dev > sanitize_tol:
            raise SubspaceError(f"basis is not orthonormal (Gram deviation {dev:.3g})")
        return cls(gram_schmidt(v))

    @classmethod
    def full(cls, d: int) -> "SubspaceBasis":
        return cls(np.eye(d, dtype=complex))


def orthonormality_deviation(v: np.ndarray) -> float:
    gram = dagger(v) @ v
    return float(np.max(np.abs(gram - np.eye(gram.shape[0]))))


def gram_schmidt(v: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Orthonormalize the columns of ``v`` (classical GS, applied twice per column)."""
    v = np.array(v, dtype=complex)
    q = np.zeros_like(v)
    for k in range(v.shape[1]):
        x = v[:, k].copy()
        norm0 = np.linalg.norm(x)
        for _ in range(2):
            x -= q[:, :k] @ (dagger(q[:, :k]) @ x)
        norm = np.linalg.norm(x)
        if norm <= tol * max(norm0, 1.0):
            raise SubspaceError(f"vector {k} is linearly dependent on the previous ones")
        q[:, k] = x / norm
    return q


def symmetric_projector(c: SubspaceBasis) -> np.ndarray:
    """Normalized projector onto the symmetric part of ``C (x) C`` (unit trace)."""
    k = c.dim
    d = c.ambient_dim
    pp = tensor_product(c.projector(), c.projector())
    return pp @ (np.eye(d * d) + swap_operator(d)) @ pp / (k * (k + 1))


def symmetric_basis(d: int) -> np.ndarray:
    """Columns ``|ii>`` and ``(|ij> + |ji>)/sqrt(2)`` for ``i < j``; shape ``(d*d, d(d+1)/2)``."""
    cols = []
    for i in range(d):
        for j in range(i, d):
            v = np.zeros(d * d, dtype=complex)
            if i == j:
                v[i * d + i] = 1.0
            else:
                v[i * d + j] = v[j * d + i] = 1 / np.sqrt(2)
            cols.append(v)
    return np.stack(cols, axis=1)


def doubled(psi: np.ndarray) -> np.ndarray:
    """``|psi> (x) |psi>`` as a flat vector."""
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.kron(psi, psi)


def check_state(psi, dim: int | None = None, tol: float = TOL) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    if dim is not None and psi.shape[0] != dim:
        raise DimensionError(f"state has dimension {psi.shape[0]}, expected {dim}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > tol:
        raise ValueError(f"state is not normalized (norm {norm!r})")
    return psi


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_random_state(d: int, rng_seed=None) -> np.ndarray:
    """Haar-random unit vector in C^d from normalized complex Gaussians.

    ``rng_seed`` may be an int, a ``SeedSequence`` or an existing ``Generator``.
    """
    if d < 1:
        raise DimensionError(f"haar_random_state needs d >= 1, got {d}")
    rng = _rng(rng_seed)
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def haar_random_unitary(d: int, rng_seed=None) -> np.ndarray:
    """Haar-random d x d unitary (QR of a Ginibre matrix with phase fix)."""
    rng = _rng(rng_seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases
