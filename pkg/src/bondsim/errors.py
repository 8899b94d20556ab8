"""Exception hierarchy.

Validation problems and numerical failures are kept apart so the CLI can
map them onto distinct exit codes.
"""


class BondsimError(Exception):
    pass


class ValidationError(BondsimError, ValueError):
    """An input violates a model rule. ``field`` names the offender."""

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


class NumericalError(BondsimError, ArithmeticError):
    pass


class SingularityError(NumericalError):
    """Evaluation at (or too close to) a pole, or a zero pivot."""

    def __init__(self, message: str, index: int | None = None):
        self.index = index
        super().__init__(message)


class BracketError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    """Iteration budget exhausted. ``state`` holds the last iterate."""

    def __init__(self, message: str, state=None):
        self.state = state
        super().__init__(message)
