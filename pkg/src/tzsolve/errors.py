"""Exception hierarchy. Every error carries a machine-readable ``code``."""


class TzsolveError(Exception):
    code = "ERROR"

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        out = {"error": self.code, "message": str(self)}
        out.update({k: v for k, v in self.details.items()})
        return out


class InvalidSizeError(TzsolveError, ValueError):
    code = "INVALID_SIZE"


class CornerMismatchError(TzsolveError, ValueError):
    code = "CORNER_MISMATCH"


class SizeGuardError(TzsolveError, ValueError):
    code = "SIZE_GUARD"


class LengthMismatchError(TzsolveError, ValueError):
    code = "LENGTH_MISMATCH"


class DomainError(TzsolveError, ValueError):
    code = "DOMAIN"


class GeometryViolationError(TzsolveError, ValueError):
    code = "GEOMETRY_VIOLATION"


class MapValidationError(TzsolveError, ArithmeticError):
    code = "MAP_VALIDATION"


class ShiftCollisionError(TzsolveError, ArithmeticError):
    code = "SHIFT_COLLISION"


class SingularBlockError(TzsolveError, ArithmeticError):
    code = "SINGULAR_BLOCK"


class SingularMatrixError(TzsolveError, ArithmeticError):
    code = "SINGULAR"


class NumericallySingularError(TzsolveError, ArithmeticError):
    code = "NUMERICALLY_SINGULAR"


class FormatUnsupportedError(TzsolveError, ValueError):
    code = "FORMAT_UNSUPPORTED"


class RankDeficientError(TzsolveError, ArithmeticError):
    code = "RANK_DEFICIENT"
