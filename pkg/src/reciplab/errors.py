"""Exception hierarchy shared by every reciplab module.

`ValidationError` and its subclasses describe bad inputs or configuration
(the CLI maps them to exit status 2); anything else deriving from
`LabError` is a runtime failure (exit status 1).
"""


class LabError(Exception):
    pass


class ValidationError(LabError, ValueError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)


class EmptyInputError(ValidationError):
    pass


class InsufficientDataError(ValidationError):
    pass


class DegenerateError(ValidationError):
    pass


class SingularDesignError(ValidationError):
    def __init__(self, message, columns=()):
        self.columns = tuple(columns)
        super().__init__(message)


class IncompatibleError(ValidationError):
    pass


class GenerationError(ValidationError):
    pass
