"""Engine exception hierarchy. Every error carries a machine-readable code
that the HTTP layer maps onto 4xx responses."""


class SayReaError(Exception):
    code = "ENGINE_ERROR"
    http_status = 400

    def __init__(self, message=""):
        super().__init__(message or self.__class__.__name__)


class RangeError(SayReaError):
    code = "VALUE_OUT_OF_RANGE"


class UnknownCategoryError(SayReaError):
    code = "UNKNOWN_CATEGORY"


class UnknownAttributeError(SayReaError):
    code = "UNKNOWN_ATTRIBUTE"


class UnknownFeatureError(SayReaError):
    code = "UNKNOWN_FEATURE"


class DuplicateServiceError(SayReaError):
    code = "DUPLICATE_SERVICE"


class CatalogValidationError(SayReaError):
    code = "CATALOG_INVALID"


class EmptyReasonError(SayReaError):
    code = "EMPTY_REASON"


class BackendUnavailableError(SayReaError):
    code = "BACKEND_UNAVAILABLE"
    http_status = 503


class NoAttributesIdentifiedError(SayReaError):
    code = "NO_ATTRIBUTES_IDENTIFIED"
    http_status = 422


class UndefinedAccuracyError(SayReaError):
    code = "UNDEFINED_ACCURACY"


class NotRecommendedError(SayReaError):
    code = "NOT_RECOMMENDED"
    http_status = 404


class RequestNotPendingError(SayReaError):
    code = "REQUEST_NOT_PENDING"
    http_status = 409


class RequestNotFoundError(SayReaError):
    code = "REQUEST_NOT_FOUND"
    http_status = 404


class RuleNotFoundError(SayReaError):
    code = "RULE_NOT_FOUND"
    http_status = 404


class ServiceNotFoundError(SayReaError):
    code = "SERVICE_NOT_FOUND"
    http_status = 404


class TraceParseError(SayReaError):
    code = "TRACE_PARSE_ERROR"

    def __init__(self, message, line_no=None):
        super().__init__(message if line_no is None else f"line {line_no}: {message}")
        self.line_no = line_no


class TraceOrderError(SayReaError):
    code = "TRACE_ORDER_ERROR"
