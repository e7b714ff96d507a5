"""Exception hierarchy shared by all dirichlet_lab modules."""


class DirichletLabError(Exception):
    """Base class for every error raised by the library."""


class InvalidFrequency(DirichletLabError, ValueError):
    pass


class InvalidRelations(DirichletLabError, ValueError):
    pass


class RelationInconclusive(DirichletLabError):
    """Numeric integer-relation detection could not decide at the given tolerance."""

    def __init__(self, index, message=""):
        self.index = index
        super().__init__(message or f"relation detection inconclusive at value index {index}")


class ModelMismatch(DirichletLabError, ValueError):
    pass


class InvalidModel(DirichletLabError, ValueError):
    pass


class InvalidParameter(DirichletLabError, ValueError):
    pass


class InvalidExponent(InvalidParameter):
    pass


class InvalidAbscissa(InvalidParameter):
    pass


class UndefinedAbscissa(DirichletLabError):
    pass


class NotCoprime(DirichletLabError, ValueError):
    pass


class AccuracyNotAchieved(DirichletLabError):
    """Quadrature error budget exceeded; carries the estimate and its error bound."""

    def __init__(self, estimate, error, tol):
        self.estimate = estimate
        self.error = error
        self.tol = tol
        super().__init__(f"quadrature error {error:.3g} exceeds tolerance {tol:.3g} (estimate {estimate!r})")
