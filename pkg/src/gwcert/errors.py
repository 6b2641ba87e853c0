"""Exception types shared across the package."""


class GwcertError(Exception):
    """Base class for all package errors."""


class NonMonic(GwcertError):
    pass


class ReduciblePolynomial(GwcertError):
    pass


class DivisionByZero(GwcertError):
    pass


class UnsupportedDegree(GwcertError):
    pass


class UnsupportedField(GwcertError):
    pass


class NotAUnit(GwcertError):
    pass


class SingularBasis(GwcertError):
    pass


class PrimeMismatch(GwcertError):
    pass


class BusemannCapExceeded(GwcertError):
    """Busemann stabilization hit its safety cap; reported, never swallowed."""


class WNotUnitModQ(GwcertError):
    pass


class GroupTooLarge(GwcertError):
    pass


class NotHyperElementary(GwcertError):
    pass


class HypothesisViolated(GwcertError):
    pass


class NoConjugatorFound(GwcertError):
    """A conjugator required by the classification could not be found.

    Surfaced loudly: this is a counterexample candidate, not a soft failure.
    """


class BallTooLarge(GwcertError):
    pass


class CapExceeded(GwcertError):
    pass


class ShapeMismatch(GwcertError):
    pass


class RootOfUnity(GwcertError):
    pass


class NotInActingGroup(GwcertError):
    pass


class CounterexampleFound(GwcertError):
    """Certificate verification found a failing instance."""
