"""Exception types shared across the library."""


class ParameterError(ValueError):
    """Invalid or mutually inconsistent scheme parameters."""


class DivisibilityError(ParameterError):
    """The antenna count must divide both the user count and the cache
    redundancy; parameters outside that grid should go through the
    memory-sharing planner instead."""


class NumericalDegeneracyError(RuntimeError):
    """A channel draw is too ill-conditioned for reliable zero-forcing;
    callers retry with the next derived seed."""


class DecodeError(RuntimeError):
    """A simulated delivery violated a decoding or coverage guarantee."""
