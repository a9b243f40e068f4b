"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class GameError(Exception):
    """Invalid input data: bad dimensions, empty or unbounded strategy sets."""

    exit_code = 2


class DegenerateInputError(GameError):
    """A polyhedral system too flat or ill-conditioned for the tolerances."""


class NotReducibleError(Exception):
    """No mixing parameter satisfies the restorability condition."""

    exit_code = 3


class DegenerateParameterError(NotReducibleError):
    """A + tB vanishes numerically for the requested t."""


class ConsistencyError(Exception):
    """Internal cross-check failed (route mismatch, value certification, face validation)."""

    exit_code = 4
