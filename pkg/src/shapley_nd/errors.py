"""Exception hierarchy. CLI exit codes are keyed off these classes."""


class ShapleyError(Exception):
    """Base class for all package errors."""


class InputError(ShapleyError):
    """Malformed or invalid input (CLI exit code 2)."""


class ParseError(InputError):
    def __init__(self, line: int, column: int, reason: str):
        super().__init__(f"line {line}, column {column}: {reason}")
        self.line = line
        self.column = column
        self.reason = reason


class InvalidGameError(InputError):
    def __init__(self, violations):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class PreconditionError(InputError):
    pass


class DegenerateError(InputError):
    pass


class ExplosionError(ShapleyError):
    """A path or profile count exceeded its cap (CLI exit code 3)."""

    def __init__(self, what: str, cap: int, count: int):
        super().__init__(f"{what}: more than {cap} (counted {count} before stopping)")
        self.what = what
        self.cap = cap
        self.count = count


class BudgetError(ShapleyError):
    """An iteration budget was exhausted (CLI exit code 3)."""


class NoPathError(ShapleyError):
    pass


class StructureError(ShapleyError):
    """An optimum lacks the tree structure the bound checks rely on."""


class ReconstructionError(ShapleyError):
    pass


class InvariantViolation(ShapleyError):
    """An internal consistency check failed (CLI exit code 4)."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness
