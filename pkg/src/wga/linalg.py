"""Small dense non-Hermitian linear algebra: eigensystems, projectors, resolvents."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DefectiveMatrix, SingularShift

CONDITION_LIMIT = 1e10
CLUSTER_GAP = 1e-8
SINGULAR_SHIFT_TOL = 1e-13


@dataclass(frozen=True)
class Eigensystem:
    """Eigen-decomposition ``M = sum_l values[l] * projectors[l]``.

    ``right_vectors[:, l]`` and ``left_vectors[:, l]`` satisfy
    ``M r_l = a_l r_l``, ``l_l^T M = a_l l_l^T`` and ``l_l^T r_m = delta_lm``
    (plain transpose, no conjugation).
    """

    values: np.ndarray
    right_vectors: np.ndarray = field(repr=False)
    left_vectors: np.ndarray = field(repr=False)

    @property
    def projectors(self) -> list[np.ndarray]:
        return [
            np.outer(self.right_vectors[:, l], self.left_vectors[:, l])
            for l in range(len(self.values))
        ]

    @property
    def projector_stack(self) -> np.ndarray:
        """Projectors as a ``(n, dim, dim)`` array."""
        return np.einsum("il,jl->lij", self.right_vectors, self.left_vectors)


def _clusters(values: np.ndarray, gap: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for i, v in enumerate(values):
        for grp in groups:
            if any(abs(v - values[j]) < gap for j in grp):
                grp.append(i)
                break
        else:
            groups.append([i])
    return groups


def eig_general(M: np.ndarray) -> Eigensystem:
    """Eigen-decompose a small complex matrix with biorthonormal left/right vectors.

    Uses LAPACK's Hessenberg reduction followed by shifted QR (``zgeev``),
    which returns left vectors from the same Schur form. Eigenvalues are
    sorted by real part, then imaginary part. Exactly or nearly degenerate
    eigenvalues are accepted as long as the eigenvector basis is well
    conditioned; the left vectors of each cluster are then re-biorthogonalized
    against the right ones.

    Raises:
        DefectiveMatrix: the eigenvector matrix has condition number above 1e10.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")

    w, vl, vr = scipy.linalg.eig(M, left=True, right=True)
    order = np.lexsort((w.imag, w.real))
    w, vl, vr = w[order], vl[:, order], vr[:, order]

    vr = vr / np.linalg.norm(vr, axis=0)
    if np.linalg.cond(vr) > CONDITION_LIMIT:
        raise DefectiveMatrix("eigenvector matrix is ill-conditioned")

    left = vl.conj()
    scale = max(1.0, float(np.linalg.norm(M, 2)))
    for grp in _clusters(w, CLUSTER_GAP * scale):
        Y = left[:, grp].T
        X = vr[:, grp]
        S = Y @ X
        if np.linalg.cond(S) > CONDITION_LIMIT:
            raise DefectiveMatrix("left/right eigenvectors cannot be biorthonormalized")
        left[:, grp] = np.linalg.solve(S, Y).T

    return Eigensystem(w, vr, left)


def solve_resolvent(M: np.ndarray, z: complex, v: np.ndarray) -> np.ndarray:
    """Return ``w`` with ``(z I - M) w = v``.

    Raises:
        SingularShift: ``z`` is numerically an eigenvalue of ``M``.
    """
    M = np.asarray(M, dtype=complex)
    A = z * np.eye(M.shape[0]) - M
    smin = np.linalg.svd(A, compute_uv=False)[-1]
    if smin < SINGULAR_SHIFT_TOL * max(1.0, abs(z), float(np.linalg.norm(M, 2))):
        raise SingularShift(f"z = {z} coincides with an eigenvalue")
    return np.linalg.solve(A, np.asarray(v, dtype=complex))


def solve_resolvent_batch(M: np.ndarray, z: np.ndarray, v: np.ndarray, transpose: bool = False) -> np.ndarray:
    """Vectorized :func:`solve_resolvent` over an array of shifts.

    Returns an array of shape ``z.shape + (dim,)``. With ``transpose=True``
    solves ``(z I - M)^T w = v``, i.e. ``w^T = v^T (z I - M)^{-1}``.
    No singularity check; callers stay off the spectrum.
    """
    M = np.asarray(M, dtype=complex)
    z = np.asarray(z, dtype=complex)
    n = M.shape[0]
    A = z[..., None, None] * np.eye(n) - (M.T if transpose else M)
    rhs = np.broadcast_to(np.asarray(v, dtype=complex), z.shape + (n,))
    return np.linalg.solve(A, rhs[..., None])[..., 0]


def residue_weights(es: Eigensystem, bra: np.ndarray, ket: np.ndarray) -> np.ndarray:
    """Partial-fraction weights ``c_l = bra P_l ket``.

    ``bra (z - M)^{-1} ket = sum_l c_l / (z - values[l])``.
    """
    bra = np.asarray(bra, dtype=complex)
    ket = np.asarray(ket, dtype=complex)
    return (bra @ es.right_vectors) * (ket @ es.left_vectors)
