"""Exception types raised across the package."""


class HetCacheError(Exception):
    """Base class for all package errors."""


class NotIrreducible(HetCacheError):
    """The transition graph of a chain is not strongly connected."""


class SolverDiverged(HetCacheError):
    """Iterative stationary solve hit its iteration cap above tolerance."""


class ValidationError(HetCacheError, ValueError):
    """A configuration field violates one of its invariants."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class ConfigParseError(HetCacheError):
    """The configuration document could not be parsed."""


class ZeroGoodput(HetCacheError):
    """Energy per bit requested while goodput is zero."""


class EmptyWindow(HetCacheError):
    """Simulation observation window has no length or no requests."""
