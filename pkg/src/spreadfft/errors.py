"""Exception types shared across the pricing engine."""


class SpreadFftError(Exception):
    """Base class for all engine errors."""


class PoleError(SpreadFftError):
    """Log-gamma requested at a non-positive integer."""


class DampingViolation(SpreadFftError):
    """Damping vector outside the region where the payoff transform exists."""


class DegenerateDenominator(SpreadFftError):
    """Closed-form Riccati denominator vanished; coefficients unusable."""


class NonFinite(SpreadFftError):
    """Characteristic function or transform overflowed (NaN/Inf)."""


class NoFeasibleStep(SpreadFftError):
    """No grid step places the initial log-price on the lattice within bounds."""


class NegativePrice(SpreadFftError):
    """Extracted price is negative beyond numerical tolerance."""


class NotPsd(SpreadFftError):
    """Matrix is not positive semi-definite within tolerance."""


class ParseError(SpreadFftError):
    """Config text could not be parsed; message carries the line number."""


class ValidationError(SpreadFftError):
    """Config parsed but one or more fields are invalid.

    ``fields`` lists the offending dotted paths, e.g. ``contract.K``.
    """

    def __init__(self, message, fields=()):
        super().__init__(message)
        self.fields = list(fields)
