"""Session lifecycle, port allocation, and the framework semantics that turn
an author's ``BenchmarkImpl`` into a running benchmark.

Mutations on one task instance are serialized by a per-session lock; there
is no global lock, so sessions progress independently.
"""

from __future__ import annotations

import threading
import time
import uuid
from collections import deque
from typing import Any, Iterable

from ..errors import (
    ArgumentSchemaFault,
    CubeError,
    InternalFault,
    InvalidPageToken,
    NotResetYet,
    PortExhausted,
    ResourceExhausted,
    SeedRequired,
    SetupFailed,
    TaskNotFound,
    TaskTerminated,
    ToolConfigInvalid,
    UnknownResource,
    UnknownToolFault,
)
from ..protocol import (
    DESCRIPTION_URI,
    OBSERVATION_URI,
    ActionRequest,
    ContentBlock,
    ResetResult,
    ResourceDescriptor,
    StepResult,
    Tool,
    ToolCallResult,
    validate_action,
)
from .core import (
    DEFAULT_MAX_SESSIONS,
    DEFAULT_PAGE_SIZE,
    STATE_FAILED,
    STATE_INITIALIZING,
    STATE_READY,
    STATE_RUNNING,
    STATE_TERMINATED,
    BenchmarkImpl,
    BenchmarkInfo,
    RuntimeContext,
    SpawnTicket,
    TaskDescriptor,
    TaskFilter,
    TaskImpl,
    TaskList,
    TaskStatus,
    ToolConfig,
    state_rank,
)

# How long a closed task endpoint keeps answering TaskNotFound before its
# port is recycled for new spawns, and how long a spawn will wait for a
# port that is still inside that grace window.
_CLOSE_GRACE_S = 0.1
_PORT_WAIT_S = 2.0


class TaskSession:
    """Framework wrapper around one TaskImpl instance."""

    def __init__(
        self,
        session_id: str,
        descriptor: TaskDescriptor,
        impl: TaskImpl,
        seed: int | None,
        order: int,
    ):
        self.session_id = session_id
        self.descriptor = descriptor
        self.impl = impl
        self.order = order
        self._lock = threading.RLock()
        self._state = STATE_INITIALIZING
        self._steps = 0
        self._was_reset = False
        self._episode_over = False
        self._closed = False
        self._last_seed = seed
        self._last_activity = time.time()
        self.endpoint_url: str | None = None

    # -- lifecycle ------------------------------------------------------------

    @property
    def state(self) -> str:
        return self._state

    @property
    def steps_taken(self) -> int:
        return self._steps

    @property
    def last_activity(self) -> float:
        return self._last_activity

    @property
    def closed(self) -> bool:
        return self._closed

    def _advance(self, new_state: str) -> None:
        if state_rank(new_state) > state_rank(self._state):
            self._state = new_state

    def mark_ready(self) -> None:
        self._advance(STATE_READY)

    def _touch(self) -> None:
        self._last_activity = time.time()

    def _require_open(self) -> None:
        if self._closed:
            raise TaskNotFound(f"session {self.session_id} is closed")

    def _require_reset(self) -> None:
        if not self._was_reset:
            raise NotResetYet("call cube/reset before interacting with the task")

    # -- task-level surface -----------------------------------------------------

    def tools_list(self) -> tuple[Tool, ...]:
        self._require_open()
        return tuple(self.impl.tools())

    def tools_call(self, action: ActionRequest) -> ToolCallResult:
        with self._lock:
            self._require_open()
            self._require_reset()
            if self._episode_over:
                raise TaskTerminated("episode already ended; reset to continue")
            result = self._apply(action)
            self._touch()
            return result

    def _apply(self, action: ActionRequest) -> ToolCallResult:
        try:
            validate_action(action, self.impl.acceptable_tools())
        except (UnknownToolFault, ArgumentSchemaFault) as exc:
            # Rejected actions never reach the tool and consume no step.
            return ToolCallResult.text(str(exc), is_error=True)
        try:
            result = self.impl.apply_tool(action)
            self._steps += 1
            ev = self.impl.evaluate()
        except CubeError:
            raise
        except Exception as exc:
            self._advance(STATE_FAILED)
            raise InternalFault(f"task implementation error: {exc}") from exc
        self._episode_over = ev.terminated or self._steps >= self.descriptor.max_steps
        return result

    def evaluate(self) -> StepResult:
        with self._lock:
            self._require_open()
            self._require_reset()
            return self._evaluate_inner()

    def _evaluate_inner(self) -> StepResult:
        try:
            base = self.impl.evaluate()
        except CubeError:
            raise
        except Exception as exc:
            self._advance(STATE_FAILED)
            raise InternalFault(f"task implementation error: {exc}") from exc
        truncated = base.truncated or self._steps >= self.descriptor.max_steps
        return StepResult(
            obs=base.obs,
            reward=base.reward,
            terminated=base.terminated,
            truncated=truncated,
            info=base.info,
        )

    def step(self, action: ActionRequest) -> StepResult:
        with self._lock:
            self._require_open()
            self._require_reset()
            if self._episode_over:
                raise TaskTerminated("episode already ended; reset to continue")
            self._apply(action)
            result = self._evaluate_inner()
            self._touch()
            return result

    def reset(self, seed: int | None = None) -> ResetResult:
        with self._lock:
            self._require_open()
            effective = seed if seed is not None else self._last_seed
            try:
                result = self.impl.reset(effective)
            except CubeError:
                raise
            except Exception as exc:
                self._advance(STATE_FAILED)
                raise InternalFault(f"task implementation error: {exc}") from exc
            self._last_seed = effective
            self._steps = 0
            self._was_reset = True
            self._episode_over = False
            self._advance(STATE_RUNNING)
            self._touch()
            return result

    def resources_list(self) -> tuple[ResourceDescriptor, ...]:
        self._require_open()
        return (
            ResourceDescriptor(uri=DESCRIPTION_URI, name="description", mime_type="text/plain"),
            ResourceDescriptor(uri=OBSERVATION_URI, name="observation", mime_type="application/json"),
        )

    def resources_read(self, uri: str) -> tuple[ContentBlock, ...]:
        self._require_open()
        if uri == DESCRIPTION_URI:
            return (ContentBlock(kind="text", payload=self.impl.description()),)
        if uri == OBSERVATION_URI:
            with self._lock:
                self._require_reset()
                return (ContentBlock(kind="json", payload=self.impl.observation()),)
        raise UnknownResource(f"unknown resource uri: {uri!r}")

    def privileged_info(self) -> str:
        self._require_open()
        return self.impl.privileged_info()

    def close(self) -> None:
        with self._lock:
            self._require_open()
            try:
                self.impl.close()
            finally:
                self._closed = True
                self._advance(STATE_TERMINATED)


class _PortPool:
    def __init__(self, ports: Iterable[int]):
        self._free: deque[int] = deque(ports)
        self._lock = threading.Lock()

    def acquire(self) -> int | None:
        with self._lock:
            if not self._free:
                return None
            return self._free.popleft()

    def release(self, port: int) -> None:
        with self._lock:
            self._free.append(port)


class BenchmarkRuntime:
    """Serves the benchmark-level API over an author's BenchmarkImpl."""

    def __init__(
        self,
        impl: BenchmarkImpl,
        ctx: RuntimeContext,
        mode: str,
        host: str = "127.0.0.1",
        ports: Iterable[int] = (),
        max_sessions: int = DEFAULT_MAX_SESSIONS,
    ):
        self.impl = impl
        self.ctx = ctx
        self.mode = mode
        self.host = host
        self.max_sessions = max_sessions
        self._ports = _PortPool(ports)
        self._sessions: dict[str, TaskSession] = {}
        self._task_servers: dict[str, Any] = {}
        self._lock = threading.Lock()
        self._spawn_counter = 0
        self._shut_down = False
        self._descriptors = {d.task_id: d for d in impl.tasks()}

    # -- discovery -------------------------------------------------------------

    def info(self) -> BenchmarkInfo:
        return BenchmarkInfo(
            name=self.impl.name,
            version=self.impl.version,
            description=self.impl.description,
            resource_requirements=self.impl.resource_config(),
            task_count=len(self._descriptors),
        )

    def tasks(self, task_filter: TaskFilter | None = None) -> TaskList:
        f = task_filter or TaskFilter()
        selected = sorted(self._descriptors.values(), key=lambda d: d.task_id)
        if f.tags_any is not None:
            wanted = set(f.tags_any)
            selected = [d for d in selected if wanted & set(d.tags)]
        if f.id_prefix is not None:
            selected = [d for d in selected if d.task_id.startswith(f.id_prefix)]

        offset = 0
        if f.page_token is not None:
            if not isinstance(f.page_token, str) or not f.page_token.isdigit():
                raise InvalidPageToken(f"malformed page token: {f.page_token!r}")
            offset = int(f.page_token)
            if offset > len(selected):
                raise InvalidPageToken(f"page token out of range: {f.page_token!r}")
        page_size = f.page_size if f.page_size is not None else DEFAULT_PAGE_SIZE
        if page_size < 1:
            raise InvalidPageToken(f"page size must be positive: {page_size}")

        page = selected[offset : offset + page_size]
        next_token = None
        if offset + page_size < len(selected):
            next_token = str(offset + page_size)
        return TaskList(items=tuple(page), next_page_token=next_token)

    # -- lifecycle --------------------------------------------------------------

    def spawn(self, task_id: str, seed: int | None = None) -> SpawnTicket:
        descriptor = self._descriptors.get(task_id)
        if descriptor is None:
            raise TaskNotFound(f"unknown task: {task_id!r}")
        if descriptor.stochastic and seed is None:
            raise SeedRequired(f"task {task_id!r} is stochastic; spawn requires a seed")

        with self._lock:
            if self._shut_down:
                raise ResourceExhausted("benchmark has been shut down")
            if len(self._sessions) >= self.max_sessions:
                raise ResourceExhausted(
                    f"session limit reached ({self.max_sessions} concurrent)"
                )
            self._spawn_counter += 1
            order = self._spawn_counter
        session_id = f"s{order:04d}-{uuid.uuid4().hex[:8]}"

        try:
            impl = self.impl.create_task(descriptor, self.ctx, seed, session_id)
        except CubeError:
            raise
        except Exception as exc:
            raise InternalFault(f"task construction failed: {exc}") from exc
        session = TaskSession(session_id, descriptor, impl, seed, order)

        if self.mode == "rpc":
            server = self._serve_task(session)
            if server is None:
                raise ResourceExhausted("rpc ports exhausted")
            session.endpoint_url = server.url
            with self._lock:
                self._task_servers[session_id] = server

        session.mark_ready()
        with self._lock:
            self._sessions[session_id] = session
        endpoint: Any = session.endpoint_url if self.mode == "rpc" else session
        return SpawnTicket(
            session_id=session_id, endpoint=endpoint, task_id=task_id, seed=seed
        )

    def _serve_task(self, session: TaskSession):
        from .server import RpcHttpServer, TaskDispatcher

        dispatcher = TaskDispatcher(session, self)
        deadline = time.monotonic() + _PORT_WAIT_S
        while True:
            port = self._ports.acquire()
            if port is None:
                # Recently closed sessions hold their port for a short
                # grace window; wait it out before declaring exhaustion.
                if time.monotonic() >= deadline:
                    return None
                time.sleep(0.02)
                continue
            try:
                server = RpcHttpServer(dispatcher, self.host, port)
            except OSError:
                # Port externally occupied: drop it and try the next one.
                continue
            server.start()
            return server

    def get_session(self, session_id: str) -> TaskSession:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise TaskNotFound(f"unknown session: {session_id!r}")
        return session

    def status(self) -> list[TaskStatus]:
        with self._lock:
            sessions = sorted(self._sessions.values(), key=lambda s: s.order)
            open_count = len(sessions)
        ram_mb = self.impl.task_ram_mb()
        return [
            TaskStatus(
                session_id=s.session_id,
                task_id=s.descriptor.task_id,
                state=s.state,
                steps_taken=s.steps_taken,
                resource_usage={
                    "ram_mb_estimate": ram_mb,
                    "open_sessions": open_count,
                },
                last_activity=s.last_activity,
            )
            for s in sessions
        ]

    def release(self, session_id: str) -> None:
        """Drop a closed session from status and recycle its port."""
        with self._lock:
            self._sessions.pop(session_id, None)
            server = self._task_servers.pop(session_id, None)
        if server is not None:
            self._retire_task_server(server)

    def _retire_task_server(self, server: Any) -> None:
        def _stop() -> None:
            time.sleep(_CLOSE_GRACE_S)
            port = server.port
            server.stop()
            self._ports.release(port)

        threading.Thread(target=_stop, daemon=True).start()

    def close_session(self, session_id: str) -> None:
        session = self.get_session(session_id)
        session.close()
        self.release(session_id)

    def shutdown(self, session_id: str | None = None) -> None:
        if session_id is not None:
            self.close_session(session_id)
            return
        with self._lock:
            sessions = list(self._sessions.values())
        for session in sessions:
            if not session.closed:
                try:
                    session.close()
                except TaskNotFound:
                    pass
            self.release(session.session_id)
        with self._lock:
            already = self._shut_down
            self._shut_down = True
        if not already:
            self.impl.teardown(self.ctx)


class BenchmarkHandle:
    """What start() returns: the endpoint plus enough context to restart."""

    def __init__(
        self,
        runtime: BenchmarkRuntime,
        endpoint: str | None,
        server: Any,
        tool_config: ToolConfig,
        available_ports: tuple[int, ...],
    ):
        self.runtime = runtime
        self.endpoint = endpoint
        self.mode = runtime.mode
        self.tool_config = tool_config
        self.available_ports = available_ports
        self._server = server

    @property
    def impl(self) -> BenchmarkImpl:
        return self.runtime.impl

    def dispatcher(self):
        from .server import BenchmarkDispatcher

        return BenchmarkDispatcher(self.runtime)

    def stop(self) -> None:
        self.runtime.shutdown(None)
        with self.runtime._lock:
            servers = list(self.runtime._task_servers.values())
            self.runtime._task_servers.clear()
        for server in servers:
            server.stop()
        if self._server is not None:
            self._server.stop()
            self._server = None


def start(
    impl: BenchmarkImpl,
    available_ports: Iterable[int] = (),
    tool_config: ToolConfig | None = None,
    mode: str = "local",
    max_sessions: int = DEFAULT_MAX_SESSIONS,
    host: str = "127.0.0.1",
) -> BenchmarkHandle:
    """Initialize shared resources and expose the benchmark-level API.

    In rpc mode the benchmark endpoint binds the first free port from
    available_ports; the remainder is reserved for task spawns.
    """
    if mode not in ("local", "rpc"):
        raise ValueError(f"mode must be 'local' or 'rpc', got {mode!r}")
    tool_config = tool_config or ToolConfig()
    if tool_config.toolset not in impl.toolsets():
        raise ToolConfigInvalid(
            f"toolset {tool_config.toolset!r} is not registered by {impl.benchmark_id or impl.name!r}"
        )
    impl.resource_config().require_provisionable()

    ports = [int(p) for p in available_ports]
    if mode == "rpc" and not ports:
        raise PortExhausted("rpc mode requires at least one available port")

    ctx = RuntimeContext(tool_config=tool_config)
    try:
        impl.setup(ctx)
    except Exception as exc:
        raise SetupFailed(f"benchmark setup hook failed: {exc}") from exc

    server = None
    endpoint = None
    remaining: list[int] = []
    if mode == "rpc":
        from .server import RpcHttpServer

        bound_index = None
        for i, port in enumerate(ports):
            try:
                server = RpcHttpServer(None, host, port)
            except OSError:
                continue
            bound_index = i
            break
        if server is None or bound_index is None:
            impl.teardown(ctx)
            raise PortExhausted(f"no listed port can bind: {ports}")
        remaining = ports[:bound_index] + ports[bound_index + 1 :]
        endpoint = server.url

    runtime = BenchmarkRuntime(
        impl,
        ctx,
        mode=mode,
        host=host,
        ports=remaining,
        max_sessions=max_sessions,
    )
    if server is not None:
        from .server import BenchmarkDispatcher

        server.dispatcher = BenchmarkDispatcher(runtime)
        server.start()
    return BenchmarkHandle(
        runtime=runtime,
        endpoint=endpoint,
        server=server,
        tool_config=tool_config,
        available_ports=tuple(ports),
    )
