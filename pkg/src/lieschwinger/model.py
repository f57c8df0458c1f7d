"""Chain model container, validation, and reproducible random models.

A valid model has a positive semidefinite on-site matrix with a
one-dimensional kernel, on-site gap at least 1 above the kernel, and
interaction terms of operator norm at most 1 supported on contiguous
intervals of at most ``kbar`` edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .intervals import Interval
from .operators import LocalOperator, hermitian_defect, op_norm

ONSITE_GAP_MIN = 1.0
_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ChainModel:
    """N sites of local dimension M with on-site term ``onsite`` and
    interval-supported interactions scaled by the coupling t.

    ``energy_offset`` is an additive constant carried through assembly and
    reporting (used by restricted Kitaev models); it shifts every eigenvalue
    and no gap.
    """

    N: int
    M: int
    onsite: np.ndarray
    omega: np.ndarray
    interactions: dict[Interval, LocalOperator]
    t: float
    kbar: int
    energy_offset: float = 0.0
    seed_info: dict = field(default_factory=dict)


def ground_vector(onsite: np.ndarray, tol: float = _TOL) -> np.ndarray:
    """Normalized kernel vector of the on-site matrix, phase-fixed."""
    evals, evecs = np.linalg.eigh(onsite)
    if abs(evals[0]) > tol:
        raise ValidationError(f"on-site matrix has no zero eigenvalue: min = {evals[0]:.3e}")
    v = evecs[:, 0]
    pivot = v[int(np.argmax(np.abs(v)))]
    return v * (pivot.conjugate() / abs(pivot))


def build_chain_model(N, M, onsite, interactions, t, kbar=None,
                      energy_offset=0.0, seed_info=None) -> ChainModel:
    """Assemble and validate a ChainModel; interactions as {Interval: matrix}."""
    onsite = np.asarray(onsite, dtype=complex)
    ops = {}
    for iv, mat in interactions.items():
        iv = Interval(*iv)
        ops[iv] = mat if isinstance(mat, LocalOperator) else LocalOperator(iv, mat)
    if kbar is None:
        kbar = max((iv.k for iv in ops), default=1)
    model = ChainModel(
        N=int(N), M=int(M), onsite=onsite, omega=ground_vector(onsite),
        interactions=ops, t=float(t), kbar=int(kbar),
        energy_offset=float(energy_offset), seed_info=dict(seed_info or {}),
    )
    validate_chain_model(model)
    return model


def validate_chain_model(model: ChainModel, tol: float = _TOL) -> None:
    """Raise ValidationError naming the first violated model constraint."""
    if model.N < 2:
        raise ValidationError(f"need at least 2 sites, got N={model.N}")
    if model.M < 2:
        raise ValidationError(f"need on-site dimension >= 2, got M={model.M}")
    H = model.onsite
    if H.shape != (model.M, model.M):
        raise ValidationError(f"on-site matrix shape {H.shape} does not match M={model.M}")
    if hermitian_defect(H) > tol:
        raise ValidationError("on-site matrix is not Hermitian")
    evals = np.linalg.eigvalsh(H)
    if evals[0] < -tol:
        raise ValidationError(f"on-site matrix not positive semidefinite: min {evals[0]:.3e}")
    if abs(evals[0]) > tol:
        raise ValidationError("on-site matrix has no zero ground eigenvalue")
    if evals.shape[0] < 2 or evals[1] < ONSITE_GAP_MIN - tol:
        raise ValidationError(
            f"on-site gap {evals[1]:.6f} is below the required minimum {ONSITE_GAP_MIN}"
        )
    if abs(np.linalg.norm(model.omega) - 1.0) > 1e-8 or np.linalg.norm(H @ model.omega) > 1e-7:
        raise ValidationError("omega is not a normalized kernel vector of the on-site matrix")
    for iv, op in model.interactions.items():
        if iv.k < 1 or not iv.fits(model.N):
            raise ValidationError(f"interaction support {iv} does not fit a chain of {model.N} sites")
        if iv.k > model.kbar:
            raise ValidationError(f"interaction support {iv} exceeds max range kbar={model.kbar}")
        if op.dim != iv.dim(model.M):
            raise ValidationError(f"interaction on {iv} has dimension {op.dim}, expected {iv.dim(model.M)}")
        if hermitian_defect(op.matrix) > tol * max(1.0, float(np.max(np.abs(op.matrix)))):
            raise ValidationError(f"interaction on {iv} is not Hermitian")
        norm = op_norm(op)
        if norm > 1.0 + tol:
            raise ValidationError(f"interaction on {iv} has norm {norm:.6f} > 1")


def random_chain_model(N, t, M=2, kbar=1, seed=0) -> ChainModel:
    """Reproducible random model: on-site diag(0, 1, ..., M-1), Hermitian
    interactions drawn as (A + A^dag)/2 and normalized to unit norm.

    The generator name and seed are recorded on the model for reports.
    """
    rng = np.random.default_rng(seed)
    onsite = np.diag(np.arange(M, dtype=float)).astype(complex)
    interactions = {}
    for k in range(1, kbar + 1):
        for q in range(1, N - k + 1):
            d = M ** (k + 1)
            A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            V = (A + A.conj().T) / 2
            V = V / np.max(np.abs(np.linalg.eigvalsh(V)))
            interactions[Interval(k, q)] = V
    return build_chain_model(
        N, M, onsite, interactions, t, kbar,
        seed_info={"generator": "numpy.default_rng(PCG64)", "seed": int(seed)},
    )
