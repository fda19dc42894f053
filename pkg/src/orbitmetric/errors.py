"""Shared exception types for contract violations."""


class SizeLimitError(ValueError):
    """Input exceeds a documented size limit of the chosen algorithm."""


class InsufficientTailError(ValueError):
    """A shift point cannot supply enough symbols for the requested orbit."""


class NotBistochasticError(ValueError):
    """Matrix rows or columns do not sum to one within tolerance."""


class DecompositionFailureError(RuntimeError):
    """No perfect matching exists on the support of a residual matrix."""


class SamplingError(RuntimeError):
    """Rejection sampling failed to produce a valid sample in bounded attempts."""
