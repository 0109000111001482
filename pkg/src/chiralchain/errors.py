"""Exception types shared across the library.

Numerical signals (DefectiveMatrixError, VanishedNormError, ...) are part of
the API contract: callers are expected to catch them and either fall back to
an alternative code path or record a gap in ensemble statistics.
"""


class ConfigError(ValueError):
    """A system configuration violates one of its invariants."""


class DimensionMismatchError(ValueError):
    """Array arguments do not agree with the configured emitter count."""


class VanishedNormError(ArithmeticError):
    """The surviving excitation norm is below the floor where a
    norm-renormalized observable stops being defined."""


class CorruptStateError(ArithmeticError):
    """An amplitude state violates normalization beyond numerical tolerance."""


class DefectiveMatrixError(ArithmeticError):
    """The coupling matrix could not be reliably diagonalized (near-defective
    eigenvector basis); callers fall back to matrix-exponential stepping."""


class NonConvergedError(ArithmeticError):
    """The fallback propagator produced a non-finite or norm-increasing
    trajectory."""


class TooFewLevelsError(ValueError):
    """Fewer than three levels were supplied; no gap ratio exists."""


class NoValidRealizationsError(RuntimeError):
    """No realization retained enough levels to contribute statistics."""


class NoCrossingError(RuntimeError):
    """A gap-ratio curve never crosses its plateau midpoint."""


class FlatCurveError(RuntimeError):
    """A loss-ratio curve has no resolvable maximum above its noise level."""
