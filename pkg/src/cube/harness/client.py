"""Consumer-side sessions over either transport.

``connect`` accepts a served endpoint URL or an in-process benchmark handle
and returns the same session API either way; switching modes is a
connection change and nothing else.
"""

from __future__ import annotations

import threading
from typing import Any

import requests

from ..canonical import loads
from ..errors import (
    ConnectFailed,
    CubeError,
    ProtocolMismatch,
    error_from_code,
)
from ..protocol import (
    ActionRequest,
    ContentBlock,
    ResetResult,
    ResourceDescriptor,
    RpcEnvelope,
    StepResult,
    Tool,
    ToolCallResult,
    decode_envelope,
    encode_envelope,
)
from ..kit.core import (
    BenchmarkInfo,
    SpawnTicket,
    TaskDescriptor,
    TaskFilter,
    TaskList,
    TaskStatus,
)
from ..kit.runtime import BenchmarkHandle

DEFAULT_HTTP_TIMEOUT_S = 30.0


class LocalTransport:
    """Zero-copy dispatch into an in-process endpoint."""

    mode = "local"

    def __init__(self, dispatcher: Any):
        self._dispatcher = dispatcher

    def call(self, method: str, params: dict[str, Any]) -> Any:
        return self._dispatcher.dispatch(method, params)


class HttpTransport:
    """JSON-RPC over HTTP POST to a single /rpc path."""

    mode = "rpc"

    def __init__(self, url: str, timeout_s: float = DEFAULT_HTTP_TIMEOUT_S):
        self.url = url
        self.timeout_s = timeout_s
        self._lock = threading.Lock()
        self._next_id = 0

    def _take_id(self) -> int:
        with self._lock:
            self._next_id += 1
            return self._next_id

    def call(self, method: str, params: dict[str, Any]) -> Any:
        request_id = self._take_id()
        payload = encode_envelope(RpcEnvelope.request(request_id, method, params))
        try:
            http_response = requests.post(
                self.url,
                data=payload,
                headers={"Content-Type": "application/json"},
                timeout=self.timeout_s,
            )
        except requests.RequestException as exc:
            raise ConnectFailed(f"cannot reach {self.url}: {exc}") from exc
        try:
            env = decode_envelope(http_response.content)
        except CubeError:
            # Error responses to undecodable requests may carry a null id;
            # surface whatever the server reported.
            try:
                doc = loads(http_response.content)
            except CubeError:
                doc = None
            if (
                isinstance(doc, dict)
                and isinstance(doc.get("error"), dict)
                and isinstance(doc["error"].get("code"), int)
            ):
                err = doc["error"]
                raise error_from_code(err["code"], err.get("message", ""))
            raise ProtocolMismatch(f"unparseable response from {self.url}")
        if env.is_request:
            raise ProtocolMismatch("server answered with a request")
        if env.id != request_id:
            raise ProtocolMismatch(
                f"response id {env.id!r} does not match request id {request_id!r}"
            )
        if env.error is not None:
            raise error_from_code(env.error.code, env.error.message, env.error.data)
        return env.result


class TaskClient:
    """Task-level session surface over one spawned instance."""

    def __init__(self, transport: Any, ticket: SpawnTicket):
        self._transport = transport
        self.ticket = ticket

    @property
    def session_id(self) -> str:
        return self.ticket.session_id

    def raw(self, method: str, params: dict[str, Any] | None = None) -> Any:
        return self._transport.call(method, params or {})

    def tools_list(self) -> tuple[Tool, ...]:
        return tuple(Tool.from_wire(doc) for doc in self.raw("tools/list"))

    def tools_call(self, action: ActionRequest) -> ToolCallResult:
        return ToolCallResult.from_wire(
            self.raw("tools/call", {"name": action.name, "args": action.args})
        )

    def resources_list(self) -> tuple[ResourceDescriptor, ...]:
        return tuple(ResourceDescriptor.from_wire(doc) for doc in self.raw("resources/list"))

    def resources_read(self, uri: str) -> tuple[ContentBlock, ...]:
        doc = self.raw("resources/read", {"uri": uri})
        return tuple(ContentBlock.from_wire(b) for b in doc["contents"])

    def evaluate(self) -> StepResult:
        return StepResult.from_wire(self.raw("cube/evaluate"))

    def reset(self, seed: int | None = None) -> ResetResult:
        params: dict[str, Any] = {}
        if seed is not None:
            params["seed"] = seed
        return ResetResult.from_wire(self.raw("cube/reset", params))

    def step(self, action: ActionRequest) -> StepResult:
        return StepResult.from_wire(
            self.raw("cube/step", {"action": {"name": action.name, "args": action.args}})
        )

    def close(self) -> None:
        self.raw("cube/close")

    def privileged_info(self) -> str:
        return self.raw("cube/privileged_info")


class BenchmarkSession:
    """Benchmark-level session surface, identical across transports."""

    def __init__(self, transport: Any, handle: BenchmarkHandle | None = None):
        self._transport = transport
        self._handle = handle
        self.mode = transport.mode
        self._info: BenchmarkInfo | None = None

    def raw(self, method: str, params: dict[str, Any] | None = None) -> Any:
        return self._transport.call(method, params or {})

    def info(self) -> BenchmarkInfo:
        if self._info is None:
            doc = self.raw("cube/info")
            try:
                self._info = BenchmarkInfo.from_wire(doc)
            except (KeyError, TypeError) as exc:
                raise ProtocolMismatch(f"malformed cube/info result: {exc}") from exc
        return self._info

    def tasks(self, task_filter: TaskFilter | None = None) -> TaskList:
        params: dict[str, Any] = {}
        if task_filter is not None:
            params["filter"] = task_filter.to_wire()
        return TaskList.from_wire(self.raw("cube/tasks", params))

    def all_tasks(self) -> tuple[TaskDescriptor, ...]:
        items: list[TaskDescriptor] = []
        token: str | None = None
        while True:
            page = self.tasks(TaskFilter(page_token=token))
            items.extend(page.items)
            token = page.next_page_token
            if token is None:
                return tuple(items)

    def find_task(self, task_id: str) -> TaskDescriptor | None:
        page = self.tasks(TaskFilter(id_prefix=task_id))
        for descriptor in page.items:
            if descriptor.task_id == task_id:
                return descriptor
        return None

    def spawn(self, task_id: str, seed: int | None = None) -> TaskClient:
        params: dict[str, Any] = {"task_id": task_id}
        if seed is not None:
            params["seed"] = seed
        doc = self.raw("cube/spawn", params)
        ticket = SpawnTicket(
            session_id=doc["session_id"],
            endpoint=doc["endpoint"],
            task_id=doc["task_id"],
            seed=doc["seed"],
        )
        if self.mode == "rpc":
            transport: Any = HttpTransport(ticket.endpoint)
        else:
            runtime = self._handle.runtime  # type: ignore[union-attr]
            from ..kit.server import TaskDispatcher

            session = runtime.get_session(ticket.session_id)
            transport = LocalTransport(TaskDispatcher(session, runtime))
        return TaskClient(transport, ticket)

    def status(self) -> list[TaskStatus]:
        return [TaskStatus.from_wire(doc) for doc in self.raw("cube/status")]

    def shutdown(self, session_id: str | None = None) -> None:
        params: dict[str, Any] = {}
        if session_id is not None:
            params["session_id"] = session_id
        self.raw("cube/shutdown", params)


def connect(target: str | BenchmarkHandle) -> BenchmarkSession:
    """Open a benchmark session against a URL or an in-process handle."""
    if isinstance(target, BenchmarkHandle):
        session = BenchmarkSession(LocalTransport(target.dispatcher()), handle=target)
    elif isinstance(target, str):
        session = BenchmarkSession(HttpTransport(target))
    else:
        raise ConnectFailed(f"cannot connect to {type(target).__name__}")
    session.info()
    return session
