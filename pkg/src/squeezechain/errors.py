"""Exception types raised across the package."""


class SqueezeChainError(Exception):
    """Base class for all package errors."""


class InvalidParameters(SqueezeChainError, ValueError):
    pass


class DegenerateMode(SqueezeChainError, ArithmeticError):
    """The Bogoliubov angle is undefined at a zero-energy mode."""


class NotSkewSymmetric(SqueezeChainError, ValueError):
    pass


class DimensionTooLarge(SqueezeChainError, ValueError):
    pass


class SeparationOutOfRange(SqueezeChainError, IndexError):
    pass


class ImaginaryResidue(SqueezeChainError, ArithmeticError):
    """A quantity that must be real came out with a sizeable imaginary part."""


class NegativeDiscriminant(SqueezeChainError, ArithmeticError):
    pass


class NegativeVariance(SqueezeChainError, ArithmeticError):
    pass


class WindowTooLong(SqueezeChainError, ValueError):
    """Averaging window reaches into the first finite-size revival."""


class NoRevivalFound(SqueezeChainError, LookupError):
    pass


class SizeTooLarge(SqueezeChainError, ValueError):
    pass


class EvolutionError(SqueezeChainError):
    """Wraps an upstream failure with the time point at which it happened."""

    def __init__(self, time, cause):
        super().__init__(f"at t={time!r}: {cause}")
        self.time = time
        self.cause = cause
