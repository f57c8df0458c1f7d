"""Exception types shared across the package."""

from __future__ import annotations


class ChainError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ChainError):
    """A model, operator, or input file violates a stated constraint."""


class EmbeddingError(ChainError):
    """Operator support is not contained in the embedding target."""


class GeneratorError(ChainError):
    """A conjugation generator is not anti-Hermitian within tolerance."""


class OrderError(ChainError):
    """A local Hamiltonian was requested out of sweep order."""


class DimensionError(ChainError):
    """A full-space assembly would exceed the dense-matrix guard."""


class GapError(ChainError):
    """Gap assumption violated: vacuum not the ground state, or gap below threshold.

    Carries the failing step and a short reason so a run report can name it.
    """

    def __init__(self, message, step=None, reason="", value=None):
        super().__init__(message)
        self.step = step
        self.reason = reason
        self.value = value


class SeriesError(ChainError):
    """Generator series failed to converge at the allowed order."""

    def __init__(self, message, step=None, last_term_norm=None, residual=None):
        super().__init__(message)
        self.step = step
        self.last_term_norm = last_term_norm
        self.residual = residual


class CertificationError(ChainError):
    """Final block-diagonality residual exceeded the accepted tolerance."""


class RegroupError(ChainError):
    """A perturbation classified as bulk fails the zero-mode commutation check."""
