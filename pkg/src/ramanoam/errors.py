"""Exception hierarchy shared by the solver, optics and CLI layers."""


class RamanOAMError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(RamanOAMError, ValueError):
    """A physical parameter violates its domain invariants."""


class NonConvergenceError(RamanOAMError):
    """Time integration reached ``t_end`` without meeting the steady-state test."""

    def __init__(self, message, state=None, t=None, residual=None):
        super().__init__(message)
        self.state = state
        self.t = t
        self.residual = residual


class SingularSystemError(RamanOAMError):
    """The steady-state linear system has no unique solution."""


class ResolutionError(RamanOAMError, ValueError):
    """A beam or mode is not resolved by the sampling grid."""


class AliasingError(RamanOAMError):
    """A propagation kernel or chirp is under-sampled on the grid."""


class AtomicSolverError(RamanOAMError):
    """The local atomic response failed at a grid sample."""

    def __init__(self, message, x=None, y=None):
        super().__init__(message)
        self.x = x
        self.y = y


class LowContrastError(RamanOAMError):
    """A diagnostic image has no fringe that clears the acceptance thresholds."""


class UndefinedPhaseError(RamanOAMError):
    """The field vanishes on the sampling contour, so its phase is undefined."""


class NoGainError(RamanOAMError):
    """Requested a gain metric from a spectrum that never exceeds unity."""


class ConfigError(RamanOAMError):
    """Configuration text could not be parsed or validated."""

    def __init__(self, message, line=None, key=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)
        self.line = line
        self.key = key
