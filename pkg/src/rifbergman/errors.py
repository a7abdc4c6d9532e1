"""Exception types raised by the toolkit.

Every error carries its class name as the diagnostic label printed by the CLI.
"""


class RifError(Exception):
    """Base class for all toolkit errors."""


class InvalidPolynomial(RifError, ValueError):
    pass


class NotARationalInnerFunction(RifError, ValueError):
    pass


class DenominatorTooSmall(RifError, ArithmeticError):
    """|p(z)| fell below the evaluation guard; z is close to a boundary singularity."""


class NoConvergence(RifError, ArithmeticError):
    pass


class InstabilityDetected(RifError, ValueError):
    """The denominator vanishes (numerically) inside the shrunken bidisc."""


class NonUnimodularTarget(RifError, ValueError):
    pass


class SourceNotSingular(RifError, ValueError):
    pass


class UnsupportedWeight(RifError, ValueError):
    """Weight exponent at or below -1; the weighted volume diverges."""


class DegenerateFit(RifError, ValueError):
    pass


class SingularityMismatch(RifError, ValueError):
    pass


class EnvelopeTooSparse(RifError, ValueError):
    pass


class BetaTooSmall(RifError, ValueError):
    """beta <= 2q: the boundedness statement does not apply."""


class ConfigError(RifError, ValueError):
    """Malformed or incomplete experiment configuration."""
