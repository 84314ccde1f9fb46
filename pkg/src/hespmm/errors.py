"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid scheme or benchmark parameters."""


class CapacityError(ValueError):
    """Input does not fit the available ciphertext slots."""


class KeyMissingError(LookupError):
    """A required evaluation key was not generated."""


class EvalError(RuntimeError):
    """An evaluation-time precondition was violated."""
