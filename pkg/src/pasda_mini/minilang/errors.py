class MiniLangError(Exception):
    """Base class for frontend and interpreter errors."""


class ParseError(MiniLangError):
    """Malformed source or an unresolved identifier."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}{message}")


class TypeCheckError(MiniLangError):
    def __init__(self, message: str, line: int = 0):
        self.message = message
        self.line = line
        super().__init__(f"{line}: {message}" if line else message)


class CallCycleError(MiniLangError):
    """Raised when user functions call each other recursively."""

    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__("recursive call cycle: " + " -> ".join(self.cycle))


class FuelExhausted(MiniLangError):
    """The interpreter exceeded its step budget."""
