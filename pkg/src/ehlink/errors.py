"""Error types shared across the package.

The split mirrors how failures are reported to callers: bad argument values
raise ParameterError, malformed or inconsistent input data raises
InputDataError, and exceeding a memory/size budget raises ResourceLimitError.
The CLI maps these onto its exit codes and the service onto HTTP statuses.
"""


class ParameterError(ValueError):
    """An argument value is outside its documented domain."""


class InputDataError(ValueError):
    """Input data (file contents, profiles, traces) is malformed or inconsistent."""


class ResourceLimitError(RuntimeError):
    """A requested computation exceeds a configured size or memory budget."""
