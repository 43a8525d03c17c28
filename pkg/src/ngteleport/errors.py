"""Exceptions shared across the engine and the Fock-space oracle."""


class EngineError(Exception):
    """Base class for numerical-pipeline failures."""


class MeasureZeroOutcomeError(EngineError):
    """The heralding photon-number outcome has probability zero (below floor)."""


class NonPositiveKernelError(EngineError):
    """A Gaussian integration kernel was not positive definite (mis-assembled state)."""


class CutoffTooSmallError(EngineError):
    """Truncated Fock simulation left too much population above the cutoff."""
