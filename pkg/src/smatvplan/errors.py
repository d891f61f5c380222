"""Exception hierarchy shared across the package."""

from __future__ import annotations


class PlanError(Exception):
    """Base class for all smatvplan errors."""


class NotReachable(PlanError):
    """A signal line does not reach the requested node."""


class AmbiguousPath(PlanError):
    """More than one source-to-node path exists for a signal line."""


class UnknownComponent(PlanError):
    """A component or cable id is not present in the catalog."""


class RegulatorIndexOutOfRange(PlanError):
    """A regulator index is outside the positions declared by the spec."""


class FrequencyOutOfRange(PlanError):
    """A frequency lies outside every supported band."""


class MissingSource(PlanError):
    """A signal line is referenced but no source emits it."""


class AmbiguousSource(PlanError):
    """More than one source emits the requested signal line."""


class EmptyPlan(PlanError):
    """A channel plan carries no channels for the requested line."""


class InvalidNetwork(PlanError):
    """The network fails validation; inspect .diagnostics."""

    def __init__(self, message: str, diagnostics=()):
        super().__init__(message)
        self.diagnostics = tuple(diagnostics)


class NoRegulators(PlanError):
    """Optimization was requested on a network without any regulator."""


class DocumentSyntaxError(PlanError):
    """A document is not well-formed JSON; carries line/column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class SchemaError(PlanError):
    """A well-formed document violates the format schema; carries a path."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class ValidationError(PlanError):
    """A parsed document produced a structurally invalid network."""

    def __init__(self, message: str, diagnostics=()):
        super().__init__(message)
        self.diagnostics = tuple(diagnostics)
