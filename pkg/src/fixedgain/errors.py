"""Exception types raised by the fixedgain package.

Everything derives from :class:`FixedGainError`, which itself derives from
``ValueError`` so callers that don't care about the distinction can catch the
usual thing.
"""


class FixedGainError(ValueError):
    """Base class for all errors raised by this package."""


# --- polynomial / matrix primitives ---------------------------------------

class NonRealCoefficients(FixedGainError):
    """A root set was not closed under conjugation, so the expanded
    polynomial has imaginary residue above tolerance."""


class DimensionMismatch(FixedGainError):
    """Matrix/vector operands have incompatible shapes."""


class SingularMatrix(FixedGainError):
    """Elimination hit a pivot too small to trust; the matrix has no
    usable inverse."""


class NotMonic(FixedGainError):
    """A characteristic polynomial was expected (leading coefficient
    exactly 1) but something else was supplied."""


class OrderOutOfRange(FixedGainError):
    """Requested filter order is outside the supported range."""


# --- model construction ----------------------------------------------------

class NonPositiveSamplingPeriod(FixedGainError):
    """Sampling period must be strictly positive."""


class DerivativeIndexOutOfRange(FixedGainError):
    """Requested derivative output does not exist for this order."""


class UnstablePoles(FixedGainError):
    """One or more requested poles lie on or outside the unit circle."""


class Unobservable(FixedGainError):
    """The observability matrix is numerically singular; no similarity
    transform to the observable canonical coordinates exists."""


class Uncontrollable(FixedGainError):
    """The controllability matrix is numerically singular; no similarity
    transform to the controllable canonical coordinates exists."""


class UnsupportedOrder(FixedGainError):
    """A closed-form shortcut was asked for an order it does not cover."""


class FormMismatch(FixedGainError):
    """A filter state was advanced through a realization in different
    coordinates than the state was initialized in."""


# --- response analysis ------------------------------------------------------

class NotNormalized(FixedGainError):
    """Recursion denominator must have leading coefficient exactly 1."""


class NonConvergent(FixedGainError):
    """Impulse response does not decay (pole on or outside the unit
    circle), so the requested sum cannot converge."""


class PoleOnUnitCircle(FixedGainError):
    """Frequency response is singular at the requested frequency."""


class PoleAtOne(FixedGainError):
    """Steady-state (dc) evaluation is singular: the denominator
    vanishes at z = 1."""
