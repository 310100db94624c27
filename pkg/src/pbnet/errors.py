"""Exception types shared across the package."""


class PBNetError(Exception):
    """Base class for every error this package raises on purpose."""


class InputError(PBNetError, ValueError):
    """Malformed or out-of-domain input (unknown variable, bad assignment, ...)."""


class CapacityError(PBNetError):
    """An operation would exceed a configured size cap (joint tables, brute force)."""


class InfeasibleBudgetError(InputError):
    """Parameter budget below the edgeless minimum n * (alphabet - 1)."""


class ProtocolError(PBNetError):
    """A learner blackbox violated the calling convention (wrong variable set)."""
