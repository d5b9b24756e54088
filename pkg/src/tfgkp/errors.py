"""Exception types raised by the simulation modules."""


class TfGkpError(Exception):
    """Base class for all library errors."""


class ZeroState(TfGkpError, ValueError):
    pass


class GridTooCoarse(TfGkpError, ValueError):
    pass


class OffGridShift(TfGkpError, ValueError):
    pass


class BadPumpCenter(TfGkpError, ValueError):
    pass


class EnvelopeClipped(TfGkpError, ValueError):
    pass


class BudgetExceeded(TfGkpError, ValueError):
    pass


class RegimeViolation(TfGkpError, ValueError):
    """Parameters fall outside the validity regime of an approximation."""


class NoDipFound(TfGkpError, ValueError):
    pass


class ModelMismatch(TfGkpError, TypeError):
    pass


class ConfigError(TfGkpError, ValueError):
    pass
