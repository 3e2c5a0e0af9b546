"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A configuration is internally inconsistent or violates an admissibility rule."""


class NumericalError(RuntimeError):
    """A numerical failure (overflow, non-finite objective value) during a run.

    Carries the offending iterate when one is available.
    """

    def __init__(self, message, iterate=None, step=None):
        super().__init__(message)
        self.iterate = iterate
        self.step = step


class DivergenceError(NumericalError):
    """Iterate norm exceeded the divergence guard on an unconstrained run."""


class InnerLoopStallError(RuntimeError):
    """The conditional-gradient inner loop hit its iteration cap before reaching
    the requested gap tolerance. Carries the last observed gap value."""

    def __init__(self, message, last_gap=None, step=None):
        super().__init__(message)
        self.last_gap = last_gap
        self.step = step
