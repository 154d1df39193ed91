"""HTTP front end for the registry. All payloads are canonical JSON."""

from __future__ import annotations

import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any
from urllib.parse import parse_qs, urlsplit

from .. import canonical
from ..errors import CubeError, DuplicateVersion, NotFound, ParseFault, ValidationFailed
from .core import Registry, RegistryFilter

_STATUS_BY_ERROR = {
    ValidationFailed: 400,
    ParseFault: 400,
    DuplicateVersion: 409,
    NotFound: 404,
}


def filter_from_query(query: dict[str, list[str]]) -> RegistryFilter:
    runtime_any = tuple(query["runtime"]) if "runtime" in query else None
    badge_all = tuple(query["badge"]) if "badge" in query else None
    max_ram_gb = None
    if "max_ram_gb" in query:
        try:
            max_ram_gb = float(query["max_ram_gb"][0])
        except ValueError as exc:
            raise ValidationFailed("max_ram_gb: must be a number") from exc
    requires_gpu = None
    if "requires_gpu" in query:
        flag = query["requires_gpu"][0].lower()
        if flag not in ("true", "false", "1", "0"):
            raise ValidationFailed("requires_gpu: must be true or false")
        requires_gpu = flag in ("true", "1")
    text = query["text"][0] if "text" in query else None
    return RegistryFilter(
        runtime_any=runtime_any,
        max_ram_gb=max_ram_gb,
        requires_gpu=requires_gpu,
        badge_all=badge_all,
        text=text,
    )


def include_pending_from_query(query: dict[str, list[str]]) -> bool:
    if "include_pending" not in query:
        return False
    return query["include_pending"][0].lower() in ("true", "1")


class _RegistryRequestHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    @property
    def registry(self) -> Registry:
        return self.server.registry  # type: ignore[attr-defined]

    def _send(self, status: int, doc: Any) -> None:
        payload = canonical.dump_bytes(doc)
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def _send_error_doc(self, exc: CubeError) -> None:
        status = _STATUS_BY_ERROR.get(type(exc), 500)
        self._send(status, {"error": {"kind": type(exc).__name__, "message": str(exc)}})

    def do_POST(self) -> None:  # noqa: N802
        parts = urlsplit(self.path)
        if parts.path != "/v1/entries":
            self._send(404, {"error": {"kind": "NotFound", "message": "unknown path"}})
            return
        length = int(self.headers.get("Content-Length", 0))
        body = self.rfile.read(length)
        try:
            doc = canonical.loads(body)
            entry = self.registry.register(doc)
        except CubeError as exc:
            self._send_error_doc(exc)
            return
        self._send(200, entry.to_wire())

    def do_GET(self) -> None:  # noqa: N802
        parts = urlsplit(self.path)
        segments = [s for s in parts.path.split("/") if s]
        query = parse_qs(parts.query)
        try:
            if segments[:2] != ["v1", "entries"]:
                raise NotFound("unknown path")
            rest = segments[2:]
            if not rest:
                entries = self.registry.query(
                    filter_from_query(query), include_pending_from_query(query)
                )
                self._send(200, {"entries": [e.to_wire() for e in entries]})
            elif len(rest) == 1:
                entry = self.registry.get(
                    rest[0], include_pending=include_pending_from_query(query)
                )
                self._send(200, entry.to_wire())
            elif len(rest) == 2:
                entry = self.registry.get(
                    rest[0], rest[1], include_pending=include_pending_from_query(query)
                )
                self._send(200, entry.to_wire())
            elif len(rest) == 3 and rest[2] == "report":
                self._send(200, self.registry.get_report(rest[0], rest[1]))
            else:
                raise NotFound("unknown path")
        except CubeError as exc:
            self._send_error_doc(exc)

    def log_message(self, format: str, *args: Any) -> None:
        pass


class _RegistryHttpServer(ThreadingHTTPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address: tuple[str, int], registry: Registry):
        super().__init__(address, _RegistryRequestHandler)
        self.registry = registry


class RegistryServer:
    """Serves one Registry over HTTP from a daemon thread."""

    def __init__(self, registry: Registry, host: str = "127.0.0.1", port: int = 0):
        self._httpd = _RegistryHttpServer((host, port), registry)
        self.host = host
        self.port = self._httpd.server_address[1]
        self._thread: threading.Thread | None = None

    @property
    def url(self) -> str:
        return f"http://{self.host}:{self.port}"

    def start(self) -> None:
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None
