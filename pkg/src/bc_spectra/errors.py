"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """Input violates a documented constraint (non-unitary matrix, bad window, ...)."""


class SpectrumError(RuntimeError):
    """The root finder could not certify its result.

    Carries an optional ``bracket`` so the failing search interval can be
    reported back to the caller.
    """

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class InconsistentRootError(SpectrumError):
    """A supposed eigenvalue has no numerical null space."""


class DiscretizationError(RuntimeError):
    """The finite-difference boundary closure degenerates for this U."""
