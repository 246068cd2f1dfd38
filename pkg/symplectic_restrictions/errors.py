"""Exceptions raised by the restriction engine.

Every exception carries the exit code the command line front end uses for it.
"""


class RestrictionError(ValueError):
    exit_code: int = 1


class DimensionError(RestrictionError):
    pass


class GermParseError(RestrictionError):
    exit_code = 2

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class NotQuasiHomogeneousError(RestrictionError):
    exit_code = 2


class NotClosedError(RestrictionError):
    pass


class TangencyError(RestrictionError):
    def __init__(self, message: str, residual: str | None = None) -> None:
        self.residual = residual
        super().__init__(message if residual is None else f"{message}: {residual}")


class RulesetError(RestrictionError):
    exit_code = 3


class InvariantViolationError(RestrictionError):
    exit_code = 3


class VerificationMismatch(RestrictionError):
    exit_code = 3


class StabilizationError(RestrictionError):
    exit_code = 4


class UnsupportedGermError(RestrictionError):
    pass


class FrameError(RestrictionError):
    pass


class DegenerateFormError(RestrictionError):
    pass
