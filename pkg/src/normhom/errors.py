"""Exception taxonomy shared across the package."""


class NormhomError(Exception):
    """Base class for all package-specific errors."""


class DegreeMismatch(NormhomError):
    pass


class NotAComplex(NormhomError):
    def __init__(self, degree, message=None):
        self.degree = degree
        super().__init__(message or f"coboundary composite is nonzero at degree {degree}")


class DegreeOutOfRange(NormhomError):
    pass


class ShapeMismatch(NormhomError):
    pass


class SaturationFailure(NormhomError):
    """The modulus chain did not stabilize; signals a bug or a bad bound."""


class ResolutionMismatch(NormhomError):
    pass


class NotAHomotopy(NormhomError):
    pass


class NotExact(NormhomError):
    def __init__(self, junction, message=None):
        self.junction = junction
        super().__init__(message or f"sequence fails exactness at {junction}")


class NotExactCoefficients(NormhomError):
    pass


class UnknownCovering(NormhomError):
    pass


class NotARefinement(NormhomError):
    pass


class NoStabilization(NormhomError):
    pass


class NotExactTowers(NormhomError):
    pass


class NotEventuallyStable(NormhomError):
    pass


class ParseError(NormhomError):
    exit_code = 4


class SchemaError(NormhomError):
    exit_code = 2


class InvariantError(NormhomError):
    exit_code = 3
