"""Exception types shared by all engines."""


class StructuralError(ValueError):
    """Inputs have incompatible shapes, tables or symmetries."""


class DomainError(ArithmeticError):
    """A formal operation would not terminate or is undefined for the input."""
