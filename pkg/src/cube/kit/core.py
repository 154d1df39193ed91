"""Author-facing contracts: implement ``BenchmarkImpl`` and ``TaskImpl`` and
the framework serves the full task- and benchmark-level API in both
in-process and RPC modes.

Authors never touch transports, sessions, ports, or locking. The framework
guarantees at most one mutating call at a time per task instance; anything
placed in ``RuntimeContext.shared`` must itself be safe for concurrent use
across instances.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable

from ..errors import BackendUnsupported
from ..protocol import ActionRequest, ResetResult, StepResult, Tool, ToolCallResult

KIND_CONTAINER = "container"
KIND_VM = "vm"
KIND_LOCAL_PROCESS = "local_process"
RESOURCE_KINDS = (KIND_CONTAINER, KIND_VM, KIND_LOCAL_PROCESS)

STATE_INITIALIZING = "initializing"
STATE_READY = "ready"
STATE_RUNNING = "running"
STATE_TERMINATED = "terminated"
STATE_FAILED = "failed"

# Forward-only lifecycle; equal ranks may not regress either.
_STATE_RANK = {
    STATE_INITIALIZING: 0,
    STATE_READY: 1,
    STATE_RUNNING: 2,
    STATE_TERMINATED: 3,
    STATE_FAILED: 3,
}

DEFAULT_MAX_SESSIONS = 64
DEFAULT_PAGE_SIZE = 100


@dataclass(frozen=True)
class ResourceConfig:
    """What a benchmark needs; how it is provisioned is the backend's concern.

    The bundled backend only provisions local_process. Other kinds remain
    declarable for registry filtering but raise BackendUnsupported here.
    """

    kind: str = KIND_LOCAL_PROCESS
    ram_gb: float = 0.5
    disk_gb: float = 0.1
    gpu: bool = False
    notes: str | None = None

    def require_provisionable(self) -> None:
        if self.kind != KIND_LOCAL_PROCESS:
            raise BackendUnsupported(
                f"bundled backend cannot provision kind={self.kind!r}"
            )

    def to_wire(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "kind": self.kind,
            "ram_gb": self.ram_gb,
            "disk_gb": self.disk_gb,
            "gpu": self.gpu,
        }
        if self.notes is not None:
            doc["notes"] = self.notes
        return doc

    @staticmethod
    def from_wire(doc: dict[str, Any]) -> "ResourceConfig":
        return ResourceConfig(
            kind=doc["kind"],
            ram_gb=doc["ram_gb"],
            disk_gb=doc["disk_gb"],
            gpu=doc["gpu"],
            notes=doc.get("notes"),
        )


@dataclass(frozen=True)
class ToolConfig:
    """Selects one of the benchmark's registered tool variants at start time."""

    toolset: str = "standard"
    overrides: dict[str, Any] = field(default_factory=dict)


@dataclass
class RuntimeContext:
    """Populated once by benchmark setup, handed read-only to every task."""

    shared: dict[str, Any] = field(default_factory=dict)
    base_seed: int | None = None
    tool_config: ToolConfig = field(default_factory=ToolConfig)


@dataclass(frozen=True)
class BenchmarkInfo:
    name: str
    version: str
    description: str
    resource_requirements: ResourceConfig
    task_count: int

    def to_wire(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "version": self.version,
            "description": self.description,
            "resource_requirements": self.resource_requirements.to_wire(),
            "task_count": self.task_count,
        }

    @staticmethod
    def from_wire(doc: dict[str, Any]) -> "BenchmarkInfo":
        return BenchmarkInfo(
            name=doc["name"],
            version=doc["version"],
            description=doc["description"],
            resource_requirements=ResourceConfig.from_wire(doc["resource_requirements"]),
            task_count=doc["task_count"],
        )


@dataclass(frozen=True)
class TaskDescriptor:
    task_id: str
    title: str
    tags: tuple[str, ...]
    stochastic: bool
    max_steps: int

    def to_wire(self) -> dict[str, Any]:
        return {
            "task_id": self.task_id,
            "title": self.title,
            "tags": list(self.tags),
            "stochastic": self.stochastic,
            "max_steps": self.max_steps,
        }

    @staticmethod
    def from_wire(doc: dict[str, Any]) -> "TaskDescriptor":
        return TaskDescriptor(
            task_id=doc["task_id"],
            title=doc["title"],
            tags=tuple(doc["tags"]),
            stochastic=doc["stochastic"],
            max_steps=doc["max_steps"],
        )


@dataclass(frozen=True)
class TaskFilter:
    tags_any: tuple[str, ...] | None = None
    id_prefix: str | None = None
    page_size: int | None = None
    page_token: str | None = None

    @staticmethod
    def from_wire(doc: dict[str, Any]) -> "TaskFilter":
        tags_any = doc.get("tags_any")
        return TaskFilter(
            tags_any=tuple(tags_any) if tags_any is not None else None,
            id_prefix=doc.get("id_prefix"),
            page_size=doc.get("page_size"),
            page_token=doc.get("page_token"),
        )

    def to_wire(self) -> dict[str, Any]:
        doc: dict[str, Any] = {}
        if self.tags_any is not None:
            doc["tags_any"] = list(self.tags_any)
        if self.id_prefix is not None:
            doc["id_prefix"] = self.id_prefix
        if self.page_size is not None:
            doc["page_size"] = self.page_size
        if self.page_token is not None:
            doc["page_token"] = self.page_token
        return doc


@dataclass(frozen=True)
class TaskList:
    items: tuple[TaskDescriptor, ...]
    next_page_token: str | None = None

    def to_wire(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"items": [d.to_wire() for d in self.items]}
        if self.next_page_token is not None:
            doc["next_page_token"] = self.next_page_token
        return doc

    @staticmethod
    def from_wire(doc: dict[str, Any]) -> "TaskList":
        return TaskList(
            items=tuple(TaskDescriptor.from_wire(d) for d in doc["items"]),
            next_page_token=doc.get("next_page_token"),
        )


@dataclass(frozen=True)
class SpawnTicket:
    session_id: str
    endpoint: Any  # URL string in rpc mode, in-process task handle locally
    task_id: str
    seed: int | None = None

    def to_wire(self) -> dict[str, Any]:
        endpoint = self.endpoint if isinstance(self.endpoint, str) else None
        return {
            "session_id": self.session_id,
            "endpoint": endpoint,
            "task_id": self.task_id,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class TaskStatus:
    session_id: str
    task_id: str
    state: str
    steps_taken: int
    resource_usage: dict[str, Any]
    last_activity: float

    def to_wire(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "task_id": self.task_id,
            "state": self.state,
            "steps_taken": self.steps_taken,
            "resource_usage": self.resource_usage,
            "last_activity": self.last_activity,
        }

    @staticmethod
    def from_wire(doc: dict[str, Any]) -> "TaskStatus":
        return TaskStatus(
            session_id=doc["session_id"],
            task_id=doc["task_id"],
            state=doc["state"],
            steps_taken=doc["steps_taken"],
            resource_usage=doc["resource_usage"],
            last_activity=doc["last_activity"],
        )


@dataclass(frozen=True)
class DebugTaskConfig:
    """A task configuration the matching scripted agent is guaranteed to solve."""

    task_id: str
    seed: int | None
    max_steps: int
    expected_final_reward: float = 1.0

    def to_wire(self) -> dict[str, Any]:
        return {
            "task_id": self.task_id,
            "seed": self.seed,
            "expected_final_reward": self.expected_final_reward,
            "max_steps": self.max_steps,
        }

    @staticmethod
    def from_wire(doc: dict[str, Any]) -> "DebugTaskConfig":
        return DebugTaskConfig(
            task_id=doc["task_id"],
            seed=doc["seed"],
            max_steps=doc["max_steps"],
            expected_final_reward=doc["expected_final_reward"],
        )


# An agent is any callable (obs, tools, last_result) -> ActionRequest | None,
# where None is the voluntary stop signal.
Agent = Callable[[dict[str, Any], tuple[Tool, ...], StepResult | None], ActionRequest | None]


class TaskImpl(ABC):
    """One episodic task instance. Single-threaded: the framework never runs
    two mutating calls concurrently on the same instance."""

    @abstractmethod
    def tools(self) -> tuple[Tool, ...]:
        """Declared tool list for the active toolset."""

    def acceptable_tools(self) -> tuple[Tool, ...]:
        """Validation basis for incoming calls; equals tools() for any
        well-behaved task."""
        return self.tools()

    @abstractmethod
    def description(self) -> str:
        """Task goal text, served as the description resource."""

    @abstractmethod
    def reset(self, seed: int | None) -> ResetResult:
        pass

    @abstractmethod
    def apply_tool(self, action: ActionRequest) -> ToolCallResult:
        pass

    @abstractmethod
    def evaluate(self) -> StepResult:
        """Pure read of the current state. Truncation is overlaid by the
        framework from its own step count; return truncated=False."""

    @abstractmethod
    def observation(self) -> dict[str, Any]:
        pass

    @abstractmethod
    def privileged_info(self) -> str:
        pass

    def close(self) -> None:
        pass


class BenchmarkImpl(ABC):
    """A collection of tasks plus optional shared infrastructure."""

    benchmark_id: str = ""
    name: str = ""
    version: str = "0.0.0"
    description: str = ""

    def resource_config(self) -> ResourceConfig:
        return ResourceConfig()

    def task_ram_mb(self) -> float:
        """Logical per-session RAM estimate reported through status()."""
        return 16.0

    @abstractmethod
    def toolsets(self) -> tuple[str, ...]:
        pass

    @abstractmethod
    def tasks(self) -> tuple[TaskDescriptor, ...]:
        pass

    def setup(self, ctx: RuntimeContext) -> None:
        """Initialize shared resources, exactly once, before any spawn."""

    def teardown(self, ctx: RuntimeContext) -> None:
        """Release shared resources; runs after every task is closed."""

    @abstractmethod
    def create_task(
        self,
        descriptor: TaskDescriptor,
        ctx: RuntimeContext,
        seed: int | None,
        session_id: str,
    ) -> TaskImpl:
        """Build a fresh instance. The spawn seed and session identity are
        available here so per-instance resources can be keyed immediately."""

    @abstractmethod
    def get_debug_task_configs(self) -> tuple[DebugTaskConfig, ...]:
        pass

    @abstractmethod
    def make_debug_agent(self, task_id: str) -> Agent:
        pass


def state_rank(state: str) -> int:
    return _STATE_RANK[state]
