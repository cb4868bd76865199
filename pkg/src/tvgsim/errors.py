"""Exception hierarchy shared by all tvgsim modules."""


class TvgsimError(Exception):
    """Base class for all tvgsim errors."""


class ParseError(TvgsimError):
    """Malformed input file (graph text file or scenario JSON)."""


class DomainError(TvgsimError):
    """Operation invoked outside its domain (bad vertex, disconnected graph, ...)."""


class CapacityError(DomainError):
    """Brute-force oracle invoked above its configured size cap."""


class GenerationError(TvgsimError):
    """Random scenario generation could not satisfy its constraints."""


class NotConvergedError(TvgsimError):
    """A simulated protocol did not reach a stable output within the horizon."""
