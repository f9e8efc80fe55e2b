"""Exception hierarchy for tcxy."""


class TcxyError(Exception):
    """Base class for all library errors."""


class DomainError(TcxyError, ValueError):
    """An argument lies outside the domain of an operation."""


class ConfigurationError(TcxyError, ValueError):
    """Inconsistent model or run configuration."""

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)


class UnsupportedConfigurationError(ConfigurationError):
    """Configuration is valid physics but not supported (e.g. odd N on a momentum grid)."""


class TruncationError(TcxyError, ValueError):
    """Fock cutoff too small for the requested coherent amplitude."""

    def __init__(self, message, required_cutoff):
        self.required_cutoff = required_cutoff
        super().__init__(f"{message} (requires fock_cutoff >= {required_cutoff})")


class SingularDetuningError(TcxyError, ZeroDivisionError):
    """Effective models are undefined at zero detuning."""


class RegimePreconditionError(TcxyError, ValueError):
    """A closed-form regime formula was requested outside its regime."""


class BudgetError(TcxyError, ValueError):
    """System too large for dense exact diagonalization."""


class StepSizeError(TcxyError, ArithmeticError):
    """Finite-difference step produced an unusable overlap deficit."""


class StepTooSmallError(StepSizeError):
    pass


class StepTooLargeError(StepSizeError):
    pass
