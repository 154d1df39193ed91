"""Author-facing framework: implement two classes, get the full API surface."""

from .core import (
    Agent,
    BenchmarkImpl,
    BenchmarkInfo,
    DebugTaskConfig,
    ResourceConfig,
    RuntimeContext,
    SpawnTicket,
    TaskDescriptor,
    TaskFilter,
    TaskImpl,
    TaskList,
    TaskStatus,
    ToolConfig,
)
from .runtime import BenchmarkHandle, BenchmarkRuntime, TaskSession, start

__all__ = [
    "Agent",
    "BenchmarkHandle",
    "BenchmarkImpl",
    "BenchmarkInfo",
    "BenchmarkRuntime",
    "DebugTaskConfig",
    "ResourceConfig",
    "RuntimeContext",
    "SpawnTicket",
    "TaskDescriptor",
    "TaskFilter",
    "TaskImpl",
    "TaskList",
    "TaskSession",
    "TaskStatus",
    "ToolConfig",
    "start",
]
