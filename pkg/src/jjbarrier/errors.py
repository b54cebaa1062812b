"""Exception types shared across the package."""


class BarrierDomainError(ValueError):
    """Inputs outside the validity domain of the tunneling formula."""


class InsufficientDataError(ValueError):
    """Too few samples/points to perform the requested estimate."""


class ShortedFieldError(ValueError):
    """Operation on a barrier field that contains non-positive thickness."""


class NoFeasibleStepError(RuntimeError):
    """Damped least-squares could not find any in-domain step."""


class DataFormatError(ValueError):
    """Malformed input file; message carries the offending line number."""
