"""Exception hierarchy.  ``exit_code`` is what the command line returns."""


class LieNormError(Exception):
    exit_code = 4


# parse / IO
class ParseError(LieNormError, ValueError):
    exit_code = 5

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class DocumentError(LieNormError, ValueError):
    exit_code = 5


# arithmetic
class DivisionByZero(LieNormError, ZeroDivisionError):
    exit_code = 3


class SingularMatrix(LieNormError, ArithmeticError):
    exit_code = 3


class EigenvalueNotGaussianRational(LieNormError, ArithmeticError):
    exit_code = 3


# structural / validation
class DimensionMismatch(LieNormError, ValueError):
    exit_code = 2


class IndexOutOfRange(LieNormError, IndexError):
    exit_code = 2


class ValidationFailed(LieNormError):
    exit_code = 2

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotSimultaneouslyTriangularizable(LieNormError):
    exit_code = 2


class SingularLinearPart(LieNormError, ArithmeticError):
    exit_code = 4


class NonCommuting(LieNormError):
    exit_code = 2


class DegenerateFrame(LieNormError):
    exit_code = 2


class ShapeViolation(LieNormError):
    exit_code = 4


# normalization assertions
class StraighteningResidue(LieNormError):
    exit_code = 4


class SearchExhausted(LieNormError):
    exit_code = 4


class NotTriangular(LieNormError):
    exit_code = 4


class SingularHomologicalSystem(LieNormError):
    exit_code = 4


class NonResonantResidue(LieNormError):
    exit_code = 4

    def __init__(self, message, residues=()):
        super().__init__(message)
        self.residues = list(residues)


class ConstrainedCocycleInfeasible(LieNormError):
    exit_code = 4

    def __init__(self, message, degree=None, residual=None):
        super().__init__(message)
        self.degree = degree
        self.residual = residual


class RepresentationBroken(LieNormError):
    exit_code = 4


class VerificationFailed(LieNormError):
    exit_code = 4

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class StageError(LieNormError):
    """Wraps an error raised inside a named pipeline stage."""

    def __init__(self, stage, cause):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 4)
