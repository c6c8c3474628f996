"""Exception hierarchy. Everything derives from ``ValueError`` so callers that
only care about bad input can catch one thing."""


class AfcSimError(ValueError):
    pass


class InvalidFieldError(AfcSimError):
    pass


class EmptyFieldError(AfcSimError):
    pass


class PassivityError(AfcSimError):
    pass


class PulseOutsideGridError(AfcSimError):
    pass


class NormalizationError(AfcSimError):
    pass


class ModulatorRangeError(AfcSimError):
    pass


class NyquistError(AfcSimError):
    pass


class ProgramError(AfcSimError):
    pass


class GridError(AfcSimError):
    pass


class InfeasibleDesignError(AfcSimError):
    def __init__(self, message: str, constraint: str):
        super().__init__(message)
        self.constraint = constraint


class ConfigError(AfcSimError):
    """Bad scenario configuration; ``field`` is a dotted key path."""

    def __init__(self, message: str, field: str = "", line: int = 0, source: str = ""):
        self.field = field
        self.line = line
        self.source = source
        where = source or "<config>"
        if line:
            where += f":{line}"
        prefix = f"{where}: {field}: " if field else f"{where}: "
        super().__init__(prefix + message)
