"""Exception types shared across the package."""


class HbsaError(Exception):
    """Base class for all package errors."""


class StageMismatchError(HbsaError):
    """An operation received a state in the wrong pipeline stage."""


class DegenerateInputError(HbsaError):
    """A comparison or normalization was attempted on a zero vector."""


class InvalidParametersError(HbsaError, ValueError):
    """Cavity parameters fall outside their physical domain."""


class ModeCollisionError(HbsaError):
    """A PBS routing table sends two occupied inputs to the same output."""


class UnclassifiableError(HbsaError, KeyError):
    """A (spins, signature) pair is not in the classification table."""


class ProtocolViolationError(HbsaError):
    """A simulated outcome classified to the wrong hyper-Bell label."""


class NonPhysicalParametersWarning(UserWarning):
    """The block formulas gain norm (|d|^2 + |f|^2 > 1) at these parameters."""
