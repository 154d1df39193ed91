"""Error model shared by every layer.

Wire-visible failures map onto JSON-RPC error codes: the reserved
[-32700, -32600] band carries transport/parse faults, the -32000..-32099
band carries application errors. Errors that never cross the wire
(harness-local, registry-local) carry no code.
"""

from __future__ import annotations

from typing import Any

# Transport / protocol band (JSON-RPC reserved).
PARSE_ERROR = -32700
INVALID_REQUEST = -32600
METHOD_NOT_FOUND = -32601
INVALID_PARAMS = -32602
INTERNAL_ERROR = -32603

# Application band.
TASK_NOT_FOUND = -32000
TASK_TERMINATED = -32001
RESOURCE_EXHAUSTED = -32002
TOOL_CONFIG_INVALID = -32003
SEED_REQUIRED = -32004
NOT_RESET_YET = -32005
UNKNOWN_RESOURCE = -32010
INVALID_PAGE_TOKEN = -32011


class CubeError(Exception):
    """Base class for all errors raised by this package."""

    code: int | None = None

    def __init__(self, message: str, data: Any = None):
        super().__init__(message)
        self.message = message
        self.data = data


# -- protocol faults ---------------------------------------------------------

class ParseFault(CubeError):
    code = PARSE_ERROR


class InvalidRequestFault(CubeError):
    code = INVALID_REQUEST


class MethodNamespaceFault(CubeError):
    """Method name outside the tools/, resources/, cube/ namespaces."""

    code = METHOD_NOT_FOUND


class MethodNotFound(CubeError):
    code = METHOD_NOT_FOUND


class InvalidParams(CubeError):
    code = INVALID_PARAMS


class InternalFault(CubeError):
    code = INTERNAL_ERROR


class EncodingFault(CubeError):
    """A payload contains a value with no canonical serialization (e.g. NaN)."""


# -- application errors ------------------------------------------------------

class TaskNotFound(CubeError):
    code = TASK_NOT_FOUND


class TaskTerminated(CubeError):
    code = TASK_TERMINATED


class ResourceExhausted(CubeError):
    code = RESOURCE_EXHAUSTED


class ToolConfigInvalid(CubeError):
    code = TOOL_CONFIG_INVALID


class SeedRequired(CubeError):
    code = SEED_REQUIRED


class NotResetYet(CubeError):
    code = NOT_RESET_YET


class UnknownResource(CubeError):
    code = UNKNOWN_RESOURCE


class InvalidPageToken(CubeError):
    code = INVALID_PAGE_TOKEN


# -- tool-level validation verdicts (surface as is_error=true, never as RPC
#    errors when raised inside tools/call) ----------------------------------

class UnknownToolFault(CubeError):
    """Action names a tool absent from the declared tool list."""


class ArgumentSchemaFault(CubeError):
    """Action arguments do not conform to the tool's input schema."""


# -- benchmark-kit local errors ----------------------------------------------

class PortExhausted(CubeError):
    pass


class SetupFailed(CubeError):
    pass


class BackendUnsupported(CubeError):
    pass


# -- harness local errors ----------------------------------------------------

class ConnectFailed(CubeError):
    pass


class ProtocolMismatch(CubeError):
    pass


class EpisodeTimeout(CubeError):
    pass


# -- conformance local errors -------------------------------------------------

class TargetUnreachable(CubeError):
    pass


# -- registry local errors ----------------------------------------------------

class DuplicateVersion(CubeError):
    pass


class ValidationFailed(CubeError):
    pass


class NotFound(CubeError):
    pass


_WIRE_ERRORS = {
    cls.code: cls
    for cls in (
        ParseFault,
        InvalidRequestFault,
        MethodNotFound,
        InvalidParams,
        InternalFault,
        TaskNotFound,
        TaskTerminated,
        ResourceExhausted,
        ToolConfigInvalid,
        SeedRequired,
        NotResetYet,
        UnknownResource,
        InvalidPageToken,
    )
}


def error_from_code(code: int, message: str, data: Any = None) -> CubeError:
    """Rebuild the typed error a server reported, falling back to CubeError."""
    cls = _WIRE_ERRORS.get(code)
    if cls is None:
        err = CubeError(message, data)
        err.code = code
        return err
    return cls(message, data)
