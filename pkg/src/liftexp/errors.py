"""Exception hierarchy shared by the library and the command line."""


class LiftError(Exception):
    """Base class for every error raised by liftexp."""


class ValidationError(LiftError, ValueError):
    """Malformed input: wrong dimension, non-finite numbers, bad weights."""


class AlgorithmError(LiftError, RuntimeError):
    """The input is well formed but an algorithm cannot proceed on it."""


class ReconstructionError(AlgorithmError):
    """Identification from marginal distributions failed."""
