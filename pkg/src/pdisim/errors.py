"""Exception hierarchy shared across the package."""


class PdisimError(Exception):
    """Base class for all pdisim errors."""


class ShapeError(PdisimError, ValueError):
    """Array shapes or state dimensions are inconsistent."""


class DomainError(PdisimError, ValueError):
    """A numeric argument is outside its valid domain."""


class SamplingError(PdisimError, ValueError):
    """A without-replacement draw is infeasible for the available pixels."""


class EstimationError(PdisimError, ValueError):
    """An estimator has no data to work with (e.g. empty dark region)."""


class DegenerateReferenceError(PdisimError, ValueError):
    """The reference beam amplitude is zero, so all interferograms coincide."""


class ConfigError(PdisimError, ValueError):
    """Invalid run configuration. Carries the offending key and line number."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        loc = ""
        if key is not None:
            loc += f" (key '{key}'"
            loc += f", line {line})" if line is not None else ")"
        elif line is not None:
            loc += f" (line {line})"
        super().__init__(message + loc)
        self.key = key
        self.line = line
