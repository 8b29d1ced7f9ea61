"""Exception and warning types raised by fastgreen."""


class FastGreenError(Exception):
    """Base class for all library errors."""


class InvalidInputError(FastGreenError, ValueError):
    """A parameter is outside its documented domain."""


class SingularityError(FastGreenError, ValueError):
    """The 1/r kernel was requested at r = 0."""


class OutOfRangeError(FastGreenError, ValueError):
    """A radius lies outside the tabulated interval [r_min, r_max]."""


class MeshError(FastGreenError, ValueError):
    """Mesh file could not be parsed or contains an invalid triangle."""

    def __init__(self, message, line=None, triangle=None):
        if line is not None:
            message = f"line {line}: {message}"
        if triangle is not None:
            message = f"triangle {triangle}: {message}"
        super().__init__(message)
        self.line = line
        self.triangle = triangle


class SamplingDensityWarning(UserWarning):
    """Samples per wavelength outside the recommended 1e3..1e4 range."""
