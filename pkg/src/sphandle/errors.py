"""Exception hierarchy shared by all sphandle modules."""


class SphandleError(ValueError):
    """Base class for every error raised by the library."""


class MalformedInputError(SphandleError):
    pass


class InvalidSizeError(SphandleError):
    pass


class OutOfDomainError(SphandleError):
    """A parameter (radius, rotation angle) lies outside the allowed range."""


class TraceMismatchError(SphandleError):
    pass


class DegenerateLogarithmError(SphandleError):
    """The logarithm of +-identity on a radius-r sphere is undefined."""


class MixedRadiusError(SphandleError):
    pass


class MalformedPDError(MalformedInputError):
    pass


class OrientationError(MalformedInputError):
    pass


class EmptyDiagramError(MalformedInputError):
    pass


class UnknownKnotError(SphandleError, LookupError):
    pass


class ConfigError(SphandleError):
    pass


class CorrespondenceViolation(SphandleError):
    pass


class NotInRepresentationSpace(SphandleError):
    """Representation whose generator traces differ from 2 cos r."""


class AuditFailure(SphandleError):
    def __init__(self, clauses):
        self.clauses = list(clauses)
        super().__init__("audit failed: " + ", ".join(self.clauses))
