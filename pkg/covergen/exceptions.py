"""
Exceptions raised by the covergen library
"""


class CovergenError(Exception):
    """Base class for every error raised by covergen"""


class GrammarSyntaxError(CovergenError):
    """Grammar source text does not follow the file format"""

    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class GrammarError(CovergenError):
    """Structurally invalid grammar or derivation tree"""


class GrammarValidationError(CovergenError):
    """validate() reported at least one error"""

    def __init__(self, diagnostics):
        errors = [d for d in diagnostics if d.is_error]
        summary = "; ".join(d.message for d in errors) or "grammar failed validation"
        super().__init__(summary)
        self.diagnostics = list(diagnostics)


class SizeUnrealizable(CovergenError):
    """No derivation tree of the requested size exists"""

    def __init__(self, symbol, size):
        super().__init__(f"no derivation tree of size {size} rooted at {symbol}")
        self.symbol = symbol
        self.size = size


class EmptyLanguageAtSize(CovergenError):
    """The grammar has no derivation tree of size n from its start symbol"""

    def __init__(self, size):
        super().__init__(f"the grammar has no derivation tree of size {size}")
        self.size = size


class CapExceeded(CovergenError):
    """Exhaustive enumeration requested beyond the configured cap"""

    def __init__(self, size, cap):
        super().__init__(f"exhaustive enumeration is capped at size {cap} (requested {size})")
        self.size = size
        self.cap = cap


class StrategyError(CovergenError):
    """Invalid mixing distribution or empty coverage criterion"""
