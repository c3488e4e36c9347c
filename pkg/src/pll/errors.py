"""Exception hierarchy."""


class PllError(Exception):
    """Base class for all errors raised by this package."""


class ArityError(PllError, TypeError):
    """A partial function was called with the wrong number of arguments."""


class GrammarError(PllError, ValueError):
    """A grammar failed validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(f"{v.code}: {v.message}" for v in self.violations))


class LexerContractError(PllError):
    """A lexer returned a token that does not match the input or the query."""

    def __init__(self, message, token=None):
        super().__init__(message)
        self.token = token


class SelectorContractError(PllError):
    """A selector broke ``A <= Sel(A, B) <= B``."""


class InternalInvariantError(PllError, AssertionError):
    """An engine invariant failed; indicates a bug or an impure lexer."""


class ResourceExhausted(PllError):
    """A run exceeded its EngineLimits."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class DomainEscapeError(PllError, ValueError):
    """A function produced a value outside the finite parameter domain."""


class DslError(PllError):
    """Syntax or validation errors in a grammar document."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))
