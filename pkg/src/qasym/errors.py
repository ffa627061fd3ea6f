"""Exception hierarchy.

Every failure raised by the library derives from :class:`QasymError`, so a
caller that only wants "did the pipeline work" can catch a single type.
"""


class QasymError(Exception):
    pass


class DimensionMismatch(QasymError, ValueError):
    pass


class NonConvergence(QasymError, ArithmeticError):
    pass


class NotHermitian(QasymError, ValueError):
    pass


class NotPositiveDefinite(QasymError, ValueError):
    pass


class BranchCut(QasymError, ArithmeticError):
    """An eigenvalue sits on (or too close to) the closed negative real axis."""


class SingularChannel(QasymError, ArithmeticError):
    pass


class ZeroSupport(QasymError, ArithmeticError):
    pass


class AlgebraClosureViolation(QasymError, ArithmeticError):
    pass


class DecompositionFailure(QasymError, ArithmeticError):
    pass


class FactorizationResidual(QasymError, ArithmeticError):
    pass


class PermutationAmbiguity(QasymError, ArithmeticError):
    pass


class NotInAttractor(QasymError, ValueError):
    pass


class NotFaithfulDecomposition(QasymError, ValueError):
    pass


class InvalidSpec(QasymError, ValueError):
    pass


class ParseError(QasymError, ValueError):
    pass


class InvalidState(QasymError, ValueError):
    pass
