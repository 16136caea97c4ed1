"""Exception hierarchy."""


class FieldLabError(Exception):
    pass


class ConfigError(FieldLabError, ValueError):
    """Invalid or mismatched configuration."""


class ShapeError(FieldLabError, ValueError):
    """Operands whose spaces do not compose."""


class NotOrthogonalError(FieldLabError, ValueError):
    pass


class ZeroEnergyModeError(ConfigError):
    """A lattice momentum with E_p = 0, where the 1/(2E_p) measure is undefined."""


class StructuralFailure(FieldLabError, RuntimeError):
    """An identity that should hold structurally does not (e.g. a broken chain).

    ``payload`` carries the offending operator or context for reporting.
    """

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload
