"""Wire-visible domain types, the RPC envelope, and action validation.

The envelope is a JSON-RPC 2.0 carrier restricted to three method
namespaces (``tools/``, ``resources/``, ``cube/``). Task endpoints serve
``TASK_METHODS``, benchmark endpoints serve ``BENCHMARK_METHODS``, and no
server in this repo accepts anything outside their union.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from . import canonical
from .errors import (
    ArgumentSchemaFault,
    InvalidRequestFault,
    MethodNamespaceFault,
    UnknownToolFault,
)

PROTOCOL_VERSION = "2.0"

NAMESPACES = ("tools/", "resources/", "cube/")

TASK_METHODS = frozenset(
    {
        "tools/list",
        "tools/call",
        "resources/list",
        "resources/read",
        "cube/evaluate",
        "cube/reset",
        "cube/step",
        "cube/close",
        "cube/privileged_info",
    }
)

BENCHMARK_METHODS = frozenset(
    {
        "cube/info",
        "cube/tasks",
        "cube/spawn",
        "cube/status",
        "cube/shutdown",
    }
)

ALL_METHODS = TASK_METHODS | BENCHMARK_METHODS

DESCRIPTION_URI = "cube://task/description"
OBSERVATION_URI = "cube://task/observation"

# Sentinel distinguishing "no result field" from a null result.
_ABSENT = object()


@dataclass(frozen=True)
class RpcError:
    code: int
    message: str
    data: Any = None

    def to_wire(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.data is not None:
            doc["data"] = self.data
        return doc


@dataclass(frozen=True)
class RpcEnvelope:
    """One JSON-RPC message: a request iff ``method`` is set, else a response."""

    id: int | str
    method: str | None = None
    params: Any = None
    result: Any = _ABSENT
    error: RpcError | None = None

    @property
    def is_request(self) -> bool:
        return self.method is not None

    @property
    def has_result(self) -> bool:
        return self.result is not _ABSENT

    @staticmethod
    def request(id: int | str, method: str, params: dict[str, Any] | None = None) -> "RpcEnvelope":
        return RpcEnvelope(id=id, method=method, params=params if params is not None else {})

    @staticmethod
    def response(id: int | str, result: Any) -> "RpcEnvelope":
        return RpcEnvelope(id=id, result=result)

    @staticmethod
    def failure(id: int | str, error: RpcError) -> "RpcEnvelope":
        return RpcEnvelope(id=id, error=error)


def method_in_namespace(method: str) -> bool:
    return any(
        method.startswith(ns) and len(method) > len(ns) for ns in NAMESPACES
    )


def encode_envelope(env: RpcEnvelope) -> bytes:
    """Canonical UTF-8 bytes of one envelope.

    Raises InvalidRequestFault when the envelope violates its own
    invariants, EncodingFault when a payload cannot be serialized.
    """
    if not isinstance(env.id, (int, str)) or isinstance(env.id, bool):
        raise InvalidRequestFault("envelope id must be an integer or string")
    doc: dict[str, Any] = {"jsonrpc": PROTOCOL_VERSION, "id": env.id}
    if env.is_request:
        if env.has_result or env.error is not None:
            raise InvalidRequestFault("a request carries neither result nor error")
        if not method_in_namespace(env.method or ""):
            raise MethodNamespaceFault(f"method outside known namespaces: {env.method!r}")
        if not isinstance(env.params, dict):
            raise InvalidRequestFault("params must be a structured document")
        doc["method"] = env.method
        doc["params"] = env.params
    else:
        if env.has_result == (env.error is not None):
            raise InvalidRequestFault("a response carries exactly one of result or error")
        if env.error is not None:
            doc["error"] = env.error.to_wire()
        else:
            doc["result"] = env.result
    return canonical.dump_bytes(doc)


def decode_envelope(data: bytes | str) -> RpcEnvelope:
    """Parse one envelope, accepting non-canonical but well-formed input."""
    doc = canonical.loads(data)
    if isinstance(doc, list):
        raise InvalidRequestFault("batch requests are not accepted")
    if not isinstance(doc, dict):
        raise InvalidRequestFault("envelope must be a JSON object")
    if doc.get("jsonrpc") != PROTOCOL_VERSION:
        raise InvalidRequestFault('missing or unsupported "jsonrpc" version')
    if "id" not in doc:
        raise InvalidRequestFault("missing envelope id")
    env_id = doc["id"]
    if not isinstance(env_id, (int, str)) or isinstance(env_id, bool):
        raise InvalidRequestFault("envelope id must be an integer or string")

    unknown = set(doc) - {"jsonrpc", "id", "method", "params", "result", "error"}
    if unknown:
        raise InvalidRequestFault(f"unknown envelope fields: {sorted(unknown)}")

    if "method" in doc:
        if "result" in doc or "error" in doc:
            raise InvalidRequestFault("a request carries neither result nor error")
        method = doc["method"]
        if not isinstance(method, str):
            raise InvalidRequestFault("method must be a string")
        if not method_in_namespace(method):
            raise MethodNamespaceFault(f"method outside known namespaces: {method!r}")
        params = doc.get("params", {})
        if not isinstance(params, dict):
            raise InvalidRequestFault("params must be a structured document")
        return RpcEnvelope(id=env_id, method=method, params=params)

    if ("result" in doc) == ("error" in doc):
        raise InvalidRequestFault("a response carries exactly one of result or error")
    if "error" in doc:
        err = doc["error"]
        if (
            not isinstance(err, dict)
            or not isinstance(err.get("code"), int)
            or isinstance(err.get("code"), bool)
            or not isinstance(err.get("message"), str)
        ):
            raise InvalidRequestFault("error must carry an integer code and a message")
        return RpcEnvelope(
            id=env_id,
            error=RpcError(code=err["code"], message=err["message"], data=err.get("data")),
        )
    return RpcEnvelope(id=env_id, result=doc["result"])


# -- task-level value types ----------------------------------------------------


@dataclass(frozen=True)
class Tool:
    name: str
    description: str
    input_schema: dict[str, Any]

    def to_wire(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "description": self.description,
            "input_schema": self.input_schema,
        }

    @staticmethod
    def from_wire(doc: dict[str, Any]) -> "Tool":
        return Tool(
            name=doc["name"],
            description=doc["description"],
            input_schema=doc["input_schema"],
        )


@dataclass(frozen=True)
class ContentBlock:
    kind: str  # "text" | "json"
    payload: Any

    def to_wire(self) -> dict[str, Any]:
        return {"kind": self.kind, "payload": self.payload}

    @staticmethod
    def from_wire(doc: dict[str, Any]) -> "ContentBlock":
        return ContentBlock(kind=doc["kind"], payload=doc["payload"])


@dataclass(frozen=True)
class ToolCallResult:
    content: tuple[ContentBlock, ...]
    is_error: bool = False

    def to_wire(self) -> dict[str, Any]:
        return {
            "content": [block.to_wire() for block in self.content],
            "is_error": self.is_error,
        }

    @staticmethod
    def from_wire(doc: dict[str, Any]) -> "ToolCallResult":
        return ToolCallResult(
            content=tuple(ContentBlock.from_wire(b) for b in doc["content"]),
            is_error=doc["is_error"],
        )

    @staticmethod
    def text(message: str, is_error: bool = False) -> "ToolCallResult":
        return ToolCallResult(
            content=(ContentBlock(kind="text", payload=message),), is_error=is_error
        )


@dataclass(frozen=True)
class ResourceDescriptor:
    uri: str
    name: str
    mime_type: str

    def to_wire(self) -> dict[str, Any]:
        return {"uri": self.uri, "name": self.name, "mime_type": self.mime_type}

    @staticmethod
    def from_wire(doc: dict[str, Any]) -> "ResourceDescriptor":
        return ResourceDescriptor(
            uri=doc["uri"], name=doc["name"], mime_type=doc["mime_type"]
        )


@dataclass(frozen=True)
class StepResult:
    obs: dict[str, Any]
    reward: float
    terminated: bool
    truncated: bool
    info: dict[str, Any] = field(default_factory=dict)

    def to_wire(self) -> dict[str, Any]:
        return {
            "obs": self.obs,
            "reward": self.reward,
            "terminated": self.terminated,
            "truncated": self.truncated,
            "info": self.info,
        }

    @staticmethod
    def from_wire(doc: dict[str, Any]) -> "StepResult":
        return StepResult(
            obs=doc["obs"],
            reward=doc["reward"],
            terminated=doc["terminated"],
            truncated=doc["truncated"],
            info=doc["info"],
        )


@dataclass(frozen=True)
class ResetResult:
    obs: dict[str, Any]
    info: dict[str, Any] = field(default_factory=dict)

    def to_wire(self) -> dict[str, Any]:
        return {"obs": self.obs, "info": self.info}

    @staticmethod
    def from_wire(doc: dict[str, Any]) -> "ResetResult":
        return ResetResult(obs=doc["obs"], info=doc["info"])


@dataclass(frozen=True)
class ActionRequest:
    name: str
    args: dict[str, Any] = field(default_factory=dict)

    def to_wire(self) -> dict[str, Any]:
        return {"name": self.name, "args": self.args}

    @staticmethod
    def from_wire(doc: dict[str, Any]) -> "ActionRequest":
        return ActionRequest(name=doc["name"], args=doc.get("args", {}))


_SCHEMA_TYPES = {
    "string": str,
    "integer": int,
    "number": (int, float),
    "boolean": bool,
    "object": dict,
    "array": list,
}


def _type_matches(expected: str, value: Any) -> bool:
    py_type = _SCHEMA_TYPES.get(expected)
    if py_type is None:
        return True
    if isinstance(value, bool) and expected in ("integer", "number"):
        return False
    return isinstance(value, py_type)


def validate_action(action: ActionRequest, tools: list[Tool] | tuple[Tool, ...]) -> None:
    """Accept iff the action names a declared tool and its args fit the schema.

    Raises UnknownToolFault or ArgumentSchemaFault naming the offending key.
    """
    tool = next((t for t in tools if t.name == action.name), None)
    if tool is None:
        raise UnknownToolFault(f"unknown tool: {action.name!r}")

    schema = tool.input_schema
    properties = schema.get("properties", {})
    required = schema.get("required", [])

    for key in required:
        if key not in action.args:
            raise ArgumentSchemaFault(f"missing required argument: {key!r}")
    for key, value in action.args.items():
        if key not in properties:
            raise ArgumentSchemaFault(f"unknown argument: {key!r}")
        spec = properties[key]
        declared = spec.get("type")
        if declared is not None and not _type_matches(declared, value):
            raise ArgumentSchemaFault(
                f"argument {key!r} must be of type {declared}"
            )
        allowed = spec.get("enum")
        if allowed is not None and value not in allowed:
            raise ArgumentSchemaFault(
                f"argument {key!r} must be one of {allowed}"
            )
