"""Exception hierarchy shared by all modules."""


class EntanglerError(Exception):
    """Base class for errors raised by this package."""


class DomainError(EntanglerError, ValueError):
    """A parameter lies outside the region where the model is defined."""


class ConfigurationError(EntanglerError, ValueError):
    """A configuration is incomplete or malformed."""


class ContractError(EntanglerError, ValueError):
    """Objects handed to an operation do not fit together (shape, basis)."""


class DegenerateStateError(EntanglerError, ValueError):
    """A variance in a denominator vanished."""


class NumericalError(EntanglerError, RuntimeError):
    """An integration or truncation did not reach its tolerance."""


class TruncationError(NumericalError):
    """A Fock-space cutoff is too small for the requested state."""
