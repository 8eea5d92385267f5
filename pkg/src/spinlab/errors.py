"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`SpinlabError`
so callers (and the CLI) can separate mathematical failures from bugs.
"""


class SpinlabError(Exception):
    pass


class ParamError(SpinlabError, ValueError):
    """Field parameters fail a standing hypothesis; ``check`` names which."""

    def __init__(self, check: str, message: str):
        super().__init__(message)
        self.check = check


class ZeroElement(SpinlabError, ValueError):
    pass


class PrecisionExhausted(SpinlabError, ArithmeticError):
    pass


class NotAUnit(SpinlabError, ValueError):
    pass


class ReduciblePolynomial(SpinlabError, ValueError):
    pass


class DegreeTooLarge(SpinlabError, ValueError):
    pass


class ValidationFailed(SpinlabError):
    def __init__(self, message: str, pair=None):
        super().__init__(message)
        self.pair = pair


class OrbitInvariantViolation(SpinlabError):
    pass


class StarInconsistency(SpinlabError):
    pass


class BoundViolation(SpinlabError, ValueError):
    pass


class WellDefinednessFailure(SpinlabError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class BadPrime(SpinlabError, ValueError):
    pass


class DenominatorClash(SpinlabError):
    pass


class EnumerationExhausted(SpinlabError):
    pass


class SignatureSpanFailure(SpinlabError):
    pass


class UnreachableSignature(SpinlabError):
    pass


class NonUnitResidue(SpinlabError):
    pass


class SampleFailure(SpinlabError):
    """Too many per-prime exclusions, or a flagship identity violation."""


class CacheError(SpinlabError):
    pass
