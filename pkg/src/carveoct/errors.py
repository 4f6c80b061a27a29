"""Exception types shared across the package."""


class CarveOctError(Exception):
    """Base class for all package errors."""


class DomainError(CarveOctError, ValueError):
    """An argument violates a documented precondition (level bounds, mixed dims, ...)."""


class ContractError(CarveOctError, RuntimeError):
    """An internal invariant that callers must uphold was violated (unsorted input,
    unbalanced tree, inconsistent ownership, ...)."""


class StlParseError(CarveOctError, ValueError):
    """Malformed STL input; message names the offending byte offset or line."""


class ClassificationError(CarveOctError, RuntimeError):
    """In/Out ray casting could not resolve a point after all retries."""


class ConfigError(CarveOctError, ValueError):
    """Config text failed to parse or violated a constraint; message carries line/column."""


class SolveError(CarveOctError, RuntimeError):
    """A linear solve produced NaNs or was otherwise unrecoverable."""


class CheckpointError(CarveOctError, RuntimeError):
    """Checkpoint file is corrupt, version-mismatched, or the rank count shrank."""
