"""Exception hierarchy shared by the solvers, optimizer and CLI."""


class AcougradError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(AcougradError, ValueError):
    """Invalid user input (shapes, extents, file contents, config keys)."""


class NonPositiveExtent(ValidationError):
    pass


class CflViolation(ValidationError):
    def __init__(self, ratio, cfl_max):
        self.ratio = ratio
        self.cfl_max = cfl_max
        super().__init__(
            f"CFL violation: tau/h = {ratio:.6g} exceeds cfl_max = {cfl_max:.6g} "
            "(pass allow_unstable=True to override)"
        )


class ShapeMismatch(ValidationError):
    pass


class NonPositiveSpeed(ValidationError):
    pass


class NonPositiveImpedance(ValidationError):
    pass


class DomainTooShort(ValidationError):
    pass


class NumericalError(AcougradError, ArithmeticError):
    """A solver produced unusable numbers."""


class NonFiniteBlowup(NumericalError):
    def __init__(self, i, j, what="solution"):
        self.i = i
        self.j = j
        super().__init__(f"non-finite {what} value first at (i={i}, j={j}); scheme is unstable")
