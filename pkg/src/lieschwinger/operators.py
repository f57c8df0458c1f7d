"""Dense operator algebra on interval subspaces.

Operators live on the tensor factors of their support interval, with the
leftmost site as the most significant base-M digit, and act as the identity
elsewhere.  Matrices are dense complex; Hermitian / anti-Hermitian structure
is checked against a tolerance, never assumed from storage format.

Matrix exponentials of anti-Hermitian generators go through the
eigendecomposition of iS, so the resulting conjugation is exactly unitary
and preserves spectra to machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmbeddingError, GeneratorError, ValidationError
from .intervals import Interval

TOL_HERM = 1e-10


def _as_matrix(m) -> np.ndarray:
    out = np.asarray(m, dtype=complex)
    if out.ndim != 2 or out.shape[0] != out.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {out.shape}")
    return out


@dataclass(frozen=True, eq=False)
class LocalOperator:
    """A dense matrix on the Hilbert space of one interval."""

    support: Interval
    matrix: np.ndarray

    def __post_init__(self):
        mat = _as_matrix(self.matrix)
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def hermitian_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def antihermitian_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m + m.conj().T))) if m.size else 0.0


def site_dim(op: LocalOperator) -> int:
    """Per-site dimension M recovered from the matrix size and edge count."""
    M = round(op.dim ** (1.0 / (op.support.k + 1)))
    if M ** (op.support.k + 1) != op.dim:
        raise ValidationError(
            f"matrix dim {op.dim} is not a power matching support {op.support}"
        )
    return M


def embed(op: LocalOperator, target: Interval, M: int | None = None) -> LocalOperator:
    """Tensor-pad with identities so ``op`` acts on ``target``.

    The embedding is an algebra homomorphism and leaves the operator norm
    unchanged.
    """
    if M is None:
        M = site_dim(op)
    sup = op.support
    if not target.contains(sup):
        raise EmbeddingError(f"support {sup} not contained in target {target}")
    left = sup.q - target.q
    right = target.last - sup.last
    out = op.matrix
    if left:
        out = np.kron(np.eye(M ** left, dtype=complex), out)
    if right:
        out = np.kron(out, np.eye(M ** right, dtype=complex))
    return LocalOperator(target, out)


def op_norm(op: LocalOperator | np.ndarray, tol: float = 1e-8) -> float:
    """Spectral norm (largest |eigenvalue|) of a (anti-)Hermitian matrix.

    Symmetry is classified relative to the matrix's own scale so that small
    generators are not mistaken for noisy Hermitian matrices.
    """
    m = op.matrix if isinstance(op, LocalOperator) else np.asarray(op, dtype=complex)
    if m.size == 0:
        return 0.0
    scale = float(np.max(np.abs(m)))
    if scale == 0.0:
        return 0.0
    if hermitian_defect(m) <= tol * scale:
        h = (m + m.conj().T) / 2
    elif antihermitian_defect(m) <= tol * scale:
        h = (1j * m + (1j * m).conj().T) / 2
    else:
        raise ValidationError("op_norm supports Hermitian or anti-Hermitian matrices only")
    return float(np.max(np.abs(np.linalg.eigvalsh(h))))


def orthogonal_complement_basis(v: np.ndarray) -> np.ndarray:
    """Columns form an orthonormal basis of the subspace orthogonal to v.

    Householder reflector sending e_0 to (a phase times) v; its remaining
    columns span the complement exactly.
    """
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    d = v.shape[0]
    phase = v[0] / abs(v[0]) if abs(v[0]) > 1e-14 else 1.0
    w = v + phase * np.eye(d, dtype=complex)[:, 0]
    Q = np.eye(d, dtype=complex) - 2.0 * np.outer(w, w.conj()) / np.real(w.conj() @ w)
    return Q[:, 1:]


@dataclass(frozen=True, eq=False)
class ProjectorPair:
    """Rank-1 product-vacuum projector and its complement on one interval.

    ``plus_basis`` holds an orthonormal basis of range(p_plus) so blocks can
    be restricted without picking up spurious zero modes from range(p_minus).
    """

    support: Interval
    vac: np.ndarray
    p_minus: np.ndarray
    p_plus: np.ndarray
    plus_basis: np.ndarray


def build_projectors(interval: Interval, omega: np.ndarray) -> ProjectorPair:
    """Product-vacuum projector pair on ``interval`` for on-site vector omega."""
    omega = np.asarray(omega, dtype=complex)
    omega = omega / np.linalg.norm(omega)
    vac = omega
    for _ in range(interval.k):
        vac = np.kron(vac, omega)
    d = vac.shape[0]
    p_minus = np.outer(vac, vac.conj())
    p_plus = np.eye(d, dtype=complex) - p_minus
    return ProjectorPair(interval, vac, p_minus, p_plus, orthogonal_complement_basis(vac))


def unitary_exp(S: np.ndarray, tol_herm: float = TOL_HERM) -> np.ndarray:
    """exp(S) for anti-Hermitian S, exactly unitary via eigendecomposition of iS."""
    S = _as_matrix(S)
    defect = antihermitian_defect(S)
    if defect > tol_herm * max(1.0, float(np.max(np.abs(S)))):
        raise GeneratorError(f"generator not anti-Hermitian: |S + S^dag| = {defect:.3e}")
    lam, U = np.linalg.eigh(1j * (S - S.conj().T) / 2)
    return (U * np.exp(-1j * lam)) @ U.conj().T


def conjugate_exact(op: LocalOperator, gen: LocalOperator,
                    tol_herm: float = TOL_HERM) -> LocalOperator:
    """exp(S) A exp(-S) on a common support, re-symmetrized.

    The generator must be anti-Hermitian within tol_herm; the conjugated
    matrix is re-symmetrized as (B + B^dag)/2 after checking that the
    Hermiticity drift stays below tol_herm.
    """
    if op.support != gen.support:
        raise EmbeddingError(
            f"supports differ: {op.support} vs {gen.support}; embed before conjugating"
        )
    U = unitary_exp(gen.matrix, tol_herm)
    B = U @ op.matrix @ U.conj().T
    defect = hermitian_defect(B)
    if hermitian_defect(op.matrix) <= tol_herm * max(1.0, float(np.max(np.abs(op.matrix)))):
        if defect > tol_herm * max(1.0, float(np.max(np.abs(B)))):
            raise GeneratorError(f"conjugation broke Hermiticity: drift {defect:.3e}")
        B = (B + B.conj().T) / 2
    return LocalOperator(op.support, B)


def conjugate_by_unitary(op_matrix: np.ndarray, U: np.ndarray) -> np.ndarray:
    """U A U^dag with re-symmetrization, for a precomputed unitary."""
    B = U @ op_matrix @ U.conj().T
    return (B + B.conj().T) / 2
