"""Method dispatch tables and the HTTP JSON-RPC endpoint.

The same dispatchers back both execution modes: a local handle calls
``dispatch`` in-process, the HTTP server feeds it decoded envelopes. This is
what makes the two modes expose identical methods by construction.
"""

from __future__ import annotations

import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any, Callable

from .. import canonical
from ..errors import (
    INTERNAL_ERROR,
    CubeError,
    InvalidParams,
    InvalidRequestFault,
    MethodNotFound,
)
from ..protocol import (
    BENCHMARK_METHODS,
    TASK_METHODS,
    ActionRequest,
    RpcEnvelope,
    RpcError,
    decode_envelope,
    encode_envelope,
)
from .core import TaskFilter
from .runtime import BenchmarkRuntime, TaskSession


def _opt(params: dict[str, Any], key: str, types: tuple[type, ...], label: str) -> Any:
    value = params.get(key)
    if value is None:
        return None
    if isinstance(value, bool) and bool not in types:
        raise InvalidParams(f"{key} must be {label}")
    if not isinstance(value, types):
        raise InvalidParams(f"{key} must be {label}")
    return value


def _require(params: dict[str, Any], key: str, types: tuple[type, ...], label: str) -> Any:
    if key not in params:
        raise InvalidParams(f"missing parameter: {key!r}")
    value = _opt(params, key, types, label)
    if value is None:
        raise InvalidParams(f"missing parameter: {key!r}")
    return value


def _reject_unknown(params: dict[str, Any], allowed: tuple[str, ...]) -> None:
    unknown = set(params) - set(allowed)
    if unknown:
        raise InvalidParams(f"unknown parameters: {sorted(unknown)}")


def _parse_action(doc: Any) -> ActionRequest:
    if not isinstance(doc, dict):
        raise InvalidParams("action must be an object with name and args")
    _reject_unknown(doc, ("name", "args"))
    name = _require(doc, "name", (str,), "a string")
    args = doc.get("args", {})
    if not isinstance(args, dict):
        raise InvalidParams("args must be a structured document")
    return ActionRequest(name=name, args=args)


class BenchmarkDispatcher:
    """Serves the benchmark-level method set over one runtime."""

    methods = BENCHMARK_METHODS

    def __init__(self, runtime: BenchmarkRuntime):
        self.runtime = runtime

    def dispatch(self, method: str, params: dict[str, Any]) -> Any:
        handler = self._handlers().get(method)
        if handler is None:
            raise MethodNotFound(f"method not served by this endpoint: {method!r}")
        return handler(params)

    def _handlers(self) -> dict[str, Callable[[dict[str, Any]], Any]]:
        return {
            "cube/info": self._info,
            "cube/tasks": self._tasks,
            "cube/spawn": self._spawn,
            "cube/status": self._status,
            "cube/shutdown": self._shutdown,
        }

    def _info(self, params: dict[str, Any]) -> Any:
        _reject_unknown(params, ())
        return self.runtime.info().to_wire()

    def _tasks(self, params: dict[str, Any]) -> Any:
        _reject_unknown(params, ("filter",))
        raw = params.get("filter")
        task_filter = None
        if raw is not None:
            if not isinstance(raw, dict):
                raise InvalidParams("filter must be an object")
            _reject_unknown(raw, ("tags_any", "id_prefix", "page_size", "page_token"))
            task_filter = TaskFilter.from_wire(raw)
        return self.runtime.tasks(task_filter).to_wire()

    def _spawn(self, params: dict[str, Any]) -> Any:
        _reject_unknown(params, ("task_id", "seed"))
        task_id = _require(params, "task_id", (str,), "a string")
        seed = _opt(params, "seed", (int,), "an integer")
        return self.runtime.spawn(task_id, seed).to_wire()

    def _status(self, params: dict[str, Any]) -> Any:
        _reject_unknown(params, ())
        return [entry.to_wire() for entry in self.runtime.status()]

    def _shutdown(self, params: dict[str, Any]) -> Any:
        _reject_unknown(params, ("session_id",))
        session_id = _opt(params, "session_id", (str,), "a string")
        self.runtime.shutdown(session_id)
        return None


class TaskDispatcher:
    """Serves the task-level method set over one spawned session."""

    methods = TASK_METHODS

    def __init__(self, session: TaskSession, runtime: BenchmarkRuntime | None = None):
        self.session = session
        self.runtime = runtime

    def dispatch(self, method: str, params: dict[str, Any]) -> Any:
        handler = self._handlers().get(method)
        if handler is None:
            raise MethodNotFound(f"method not served by this endpoint: {method!r}")
        return handler(params)

    def _handlers(self) -> dict[str, Callable[[dict[str, Any]], Any]]:
        return {
            "tools/list": self._tools_list,
            "tools/call": self._tools_call,
            "resources/list": self._resources_list,
            "resources/read": self._resources_read,
            "cube/evaluate": self._evaluate,
            "cube/reset": self._reset,
            "cube/step": self._step,
            "cube/close": self._close,
            "cube/privileged_info": self._privileged_info,
        }

    def _tools_list(self, params: dict[str, Any]) -> Any:
        _reject_unknown(params, ())
        return [tool.to_wire() for tool in self.session.tools_list()]

    def _tools_call(self, params: dict[str, Any]) -> Any:
        _reject_unknown(params, ("name", "args"))
        action = _parse_action(params)
        return self.session.tools_call(action).to_wire()

    def _resources_list(self, params: dict[str, Any]) -> Any:
        _reject_unknown(params, ())
        return [rd.to_wire() for rd in self.session.resources_list()]

    def _resources_read(self, params: dict[str, Any]) -> Any:
        _reject_unknown(params, ("uri",))
        uri = _require(params, "uri", (str,), "a string")
        blocks = self.session.resources_read(uri)
        return {"contents": [block.to_wire() for block in blocks]}

    def _evaluate(self, params: dict[str, Any]) -> Any:
        _reject_unknown(params, ())
        return self.session.evaluate().to_wire()

    def _reset(self, params: dict[str, Any]) -> Any:
        _reject_unknown(params, ("seed",))
        seed = _opt(params, "seed", (int,), "an integer")
        return self.session.reset(seed).to_wire()

    def _step(self, params: dict[str, Any]) -> Any:
        _reject_unknown(params, ("action",))
        if "action" not in params:
            raise InvalidParams("missing parameter: 'action'")
        action = _parse_action(params["action"])
        return self.session.step(action).to_wire()

    def _close(self, params: dict[str, Any]) -> Any:
        _reject_unknown(params, ())
        self.session.close()
        if self.runtime is not None:
            self.runtime.release(self.session.session_id)
        return None

    def _privileged_info(self, params: dict[str, Any]) -> Any:
        _reject_unknown(params, ())
        return self.session.privileged_info()


def _recover_id(data: bytes) -> Any:
    try:
        doc = canonical.loads(data)
    except CubeError:
        return None
    if isinstance(doc, dict):
        candidate = doc.get("id")
        if isinstance(candidate, (int, str)) and not isinstance(candidate, bool):
            return candidate
    return None


def serve_payload(dispatcher: Any, body: bytes) -> bytes:
    """Full request-to-response cycle over raw bytes; never raises."""
    try:
        env = decode_envelope(body)
        if not env.is_request:
            raise InvalidRequestFault("endpoint accepts requests only")
    except CubeError as exc:
        code = exc.code if exc.code is not None else INTERNAL_ERROR
        doc = {
            "jsonrpc": "2.0",
            "id": _recover_id(body),
            "error": RpcError(code=code, message=exc.message).to_wire(),
        }
        return canonical.dump_bytes(doc)

    try:
        result = dispatcher.dispatch(env.method, env.params)
        response = RpcEnvelope.response(env.id, result)
    except CubeError as exc:
        code = exc.code if exc.code is not None else INTERNAL_ERROR
        response = RpcEnvelope.failure(
            env.id, RpcError(code=code, message=exc.message, data=exc.data)
        )
    except Exception as exc:  # author code leaking through; keep serving
        response = RpcEnvelope.failure(
            env.id, RpcError(code=INTERNAL_ERROR, message=f"internal error: {exc}")
        )
    try:
        return encode_envelope(response)
    except CubeError as exc:
        fallback = RpcEnvelope.failure(
            env.id, RpcError(code=INTERNAL_ERROR, message=f"unserializable result: {exc}")
        )
        return encode_envelope(fallback)


class _RpcRequestHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def do_POST(self) -> None:  # noqa: N802 (http.server API)
        if self.path != "/rpc":
            self.send_error(404, "unknown path; POST /rpc")
            return
        length = int(self.headers.get("Content-Length", 0))
        body = self.rfile.read(length)
        payload = serve_payload(self.server.dispatcher, body)  # type: ignore[attr-defined]
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, format: str, *args: Any) -> None:
        pass


class _Server(ThreadingHTTPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address: tuple[str, int], dispatcher: Any):
        super().__init__(address, _RpcRequestHandler)
        self.dispatcher = dispatcher


class RpcHttpServer:
    """One JSON-RPC endpoint on one port, served from a daemon thread."""

    def __init__(self, dispatcher: Any, host: str, port: int):
        self._httpd = _Server((host, port), dispatcher)
        self.host = host
        self.port = port
        self._thread: threading.Thread | None = None

    @property
    def dispatcher(self) -> Any:
        return self._httpd.dispatcher

    @dispatcher.setter
    def dispatcher(self, value: Any) -> None:
        self._httpd.dispatcher = value

    @property
    def url(self) -> str:
        return f"http://{self.host}:{self.port}/rpc"

    def start(self) -> None:
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None
