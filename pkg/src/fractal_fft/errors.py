"""Exception and warning types raised by fractal_fft."""


class FractalFFTError(Exception):
    """Base class for all library errors."""


class ValidationError(FractalFFTError, ValueError):
    """An IFS, system or configuration violates a structural requirement."""


class IndexRangeError(FractalFFTError, IndexError):
    """An index falls outside ``[0, K**N)``."""


class ShapeError(FractalFFTError, ValueError):
    """A vector or matrix has the wrong length for the requested operation."""


class ResourceError(FractalFFTError):
    """A requested size exceeds a configured cap."""


class NumericalError(FractalFFTError, ArithmeticError):
    """A matrix is singular or an inverse failed its residual check."""


class ContractionWarning(UserWarning):
    """The spatial maps are not contractions in the operator 2-norm."""
