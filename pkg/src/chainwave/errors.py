"""Exception taxonomy shared across the package."""


class ChainwaveError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(ChainwaveError):
    """Model or packet parameters violate a documented invariant."""


class DimensionError(ChainwaveError):
    """Vector / matrix dimensions are inconsistent or too small."""


class UnsupportedModelError(ChainwaveError):
    """The requested operation is not defined for this model variant."""


class BackendUnsupportedError(ChainwaveError):
    """Requested evolution backend cannot handle this Hamiltonian."""


class PrecisionError(ChainwaveError):
    """Arithmetic precision insufficient for the requested computation.

    ``suggested_bits`` carries the smallest mantissa width estimated to make
    the run reliable.
    """

    def __init__(self, message: str, suggested_bits: int | None = None):
        super().__init__(message)
        self.suggested_bits = suggested_bits


class NoRootError(ChainwaveError):
    """A bracketed scalar solve has no root in the admissible interval."""


class InsufficientPeaksError(ChainwaveError):
    """A time series does not contain enough peaks for period estimation."""


class DomainError(ChainwaveError):
    """Input lies outside the validity domain of an analytic formula."""
