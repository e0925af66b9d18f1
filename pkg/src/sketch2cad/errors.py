"""Exception hierarchy shared across the package."""


class SketchCadError(Exception):
    pass


class InvalidInputError(SketchCadError, ValueError):
    """An operation received an argument outside its contract."""


class ParseError(SketchCadError, ValueError):
    """Malformed sketch or corpus text. Carries the offending position."""

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message if position is None else f"{message} (at position {position})")
        self.position = position


class ConfigError(SketchCadError, ValueError):
    """Unsatisfiable or inconsistent configuration."""


class CapacityError(SketchCadError, ValueError):
    """Ground-truth set larger than the model's query budget."""


class DivergenceError(SketchCadError, RuntimeError):
    """Training produced a non-finite loss."""
