"""Exception hierarchy shared by every stage of the pipeline."""


class AcolError(Exception):
    pass


# front end

class LexError(AcolError):
    def __init__(self, line, col, char):
        self.line = line
        self.col = col
        self.char = char
        super().__init__(f"{line}:{col}: unexpected character {char!r}")


class ParseError(AcolError):
    def __init__(self, line, col, expected, found):
        self.line = line
        self.col = col
        self.expected = frozenset(expected)
        self.found = found
        want = ", ".join(sorted(self.expected))
        super().__init__(f"{line}:{col}: expected one of {{{want}}}, found {found}")


# runtime

class AcolRuntimeError(AcolError):
    pass


class AcolTypeError(AcolRuntimeError, TypeError):
    pass


class DivisionByZero(AcolRuntimeError, ZeroDivisionError):
    pass


class UnboundVariable(AcolRuntimeError, LookupError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unbound variable {name!r}")


class StackUnderflow(AcolRuntimeError):
    def __init__(self, where):
        self.where = where
        super().__init__(f"stack underflow at {where}")


# bytecode and alternative representations

class LiteralOutOfRange(AcolError):
    def __init__(self, value):
        self.value = value
        super().__init__(f"integer literal {value} does not fit in 32 bits")


class MalformedImage(AcolError):
    pass


class AsmError(AcolError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class UnknownBlockId(AcolRuntimeError):
    def __init__(self, block_id):
        self.block_id = block_id
        super().__init__(f"unknown block id {block_id}")


class ConditionArity(AcolRuntimeError):
    def __init__(self, block_id, count):
        self.block_id = block_id
        self.count = count
        super().__init__(f"condition block {block_id} left {count} values, expected 1")


# benchmarking

class InsufficientSamples(AcolError):
    pass


class BackendMismatch(AcolError):
    """Two backends disagreed on a final environment."""

    def __init__(self, backend, variable, expected, actual, context=""):
        self.backend = backend
        self.variable = variable
        self.expected = expected
        self.actual = actual
        where = f" on {context}" if context else ""
        super().__init__(
            f"{backend} diverged{where}: {variable} = {actual!r}, reference has {expected!r}"
        )
