"""Key vault: stochastic secret-retrieval tasks backed by one shared service.

Benchmark setup creates a single in-memory vault shared by every task
instance; each spawn writes its secret fragments under its own session
namespace. The secret is a pure function of the seed, so an independent
implementation can recompute it and prove generator parity.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from ..errors import TaskNotFound
from ..protocol import ActionRequest, ResetResult, StepResult, Tool, ToolCallResult
from ..rng import secret_hex
from ..kit.core import (
    Agent,
    BenchmarkImpl,
    DebugTaskConfig,
    ResourceConfig,
    RuntimeContext,
    TaskDescriptor,
    TaskImpl,
)

# Fragment boundaries for the 16-hex-char secret when split across keys.
_SPLITS = {1: (16,), 3: (6, 11, 16)}

VAULT_TASKS = {
    "vault-easy": {"keys": ("k0",), "max_steps": 8},
    "vault-hard": {"keys": ("k0", "k1", "k2"), "max_steps": 12},
}


def secret_fragments(seed: int, keys: tuple[str, ...]) -> dict[str, str]:
    secret = secret_hex(seed)
    bounds = _SPLITS[len(keys)]
    fragments = {}
    start = 0
    for key, end in zip(keys, bounds):
        fragments[key] = secret[start:end]
        start = end
    return fragments


class VaultService:
    """Shared fragment store; safe for concurrent use across sessions."""

    def __init__(self):
        self._store: dict[tuple[str, str], str] = {}
        self._lock = threading.Lock()

    def write(self, namespace: str, key: str, fragment: str) -> None:
        with self._lock:
            self._store[(namespace, key)] = fragment

    def read(self, namespace: str, key: str) -> str | None:
        with self._lock:
            return self._store.get((namespace, key))

    def clear_namespace(self, namespace: str) -> None:
        with self._lock:
            for pair in [p for p in self._store if p[0] == namespace]:
                del self._store[pair]

    def namespace_count(self) -> int:
        with self._lock:
            return len({ns for ns, _ in self._store})


@dataclass
class VaultState:
    namespace: str
    keys: tuple[str, ...]
    secret: str
    submitted: str | None = None
    steps_taken: int = 0


def _query_tool(keys: tuple[str, ...], toolset: str) -> Tool:
    if toolset == "compact":
        description = "Read the fragment stored under a key."
    else:
        description = (
            f"Read the fragment stored under a key. Available keys: {', '.join(keys)}."
        )
    return Tool(
        name="query",
        description=description,
        input_schema={
            "type": "object",
            "properties": {"key": {"type": "string"}},
            "required": ["key"],
        },
    )


def _submit_tool() -> Tool:
    return Tool(
        name="submit",
        description="Submit the assembled secret for verification.",
        input_schema={
            "type": "object",
            "properties": {"answer": {"type": "string"}},
            "required": ["answer"],
        },
    )


class VaultTask(TaskImpl):
    def __init__(
        self,
        task_id: str,
        keys: tuple[str, ...],
        vault: VaultService,
        toolset: str,
        seed: int | None,
        namespace: str,
    ):
        self.task_id = task_id
        self.keys = keys
        self.vault = vault
        self.toolset = toolset
        self.namespace = namespace
        self._last: str | None = None
        seed_value = seed if seed is not None else 0
        self.state = VaultState(
            namespace=namespace, keys=keys, secret=secret_hex(seed_value)
        )
        self._write_fragments(seed_value)

    def _write_fragments(self, seed: int) -> None:
        self.vault.clear_namespace(self.namespace)
        for key, fragment in secret_fragments(seed, self.keys).items():
            self.vault.write(self.namespace, key, fragment)

    def tools(self) -> tuple[Tool, ...]:
        return (_query_tool(self.keys, self.toolset), _submit_tool())

    def description(self) -> str:
        return (
            "Recover the secret hidden in the vault. Query each of the keys "
            f"({', '.join(self.keys)}), assemble the fragments in key order, "
            "and submit the result."
        )

    def reset(self, seed: int | None) -> ResetResult:
        seed_value = seed if seed is not None else 0
        self.state.secret = secret_hex(seed_value)
        self.state.submitted = None
        self.state.steps_taken = 0
        self._last = None
        self._write_fragments(seed_value)
        return ResetResult(obs=self.observation(), info={})

    def apply_tool(self, action: ActionRequest) -> ToolCallResult:
        self.state.steps_taken += 1
        if action.name == "query":
            fragment = self.vault.read(self.namespace, action.args["key"])
            if fragment is None:
                self._last = f"no such key: {action.args['key']}"
                return ToolCallResult.text(self._last, is_error=True)
            self._last = fragment
            return ToolCallResult.text(fragment)
        answer = action.args["answer"]
        self.state.submitted = answer
        if answer == self.state.secret:
            self._last = "accepted"
            return ToolCallResult.text("accepted")
        self._last = "rejected"
        return ToolCallResult.text("rejected")

    def evaluate(self) -> StepResult:
        solved = self.state.submitted == self.state.secret
        return StepResult(
            obs=self.observation(),
            reward=1.0 if solved else 0.0,
            terminated=solved,
            truncated=False,
            info={},
        )

    def observation(self) -> dict:
        return {
            "keys": list(self.keys),
            "last": self._last,
            "solved": self.state.submitted == self.state.secret,
        }

    def privileged_info(self) -> str:
        return f"secret: {self.state.secret}"

    def close(self) -> None:
        self.vault.clear_namespace(self.namespace)


def make_vault_debug_agent(keys: tuple[str, ...]) -> Agent:
    """Queries every key in order, then submits the assembled fragments."""
    state = {"queried": 0, "fragments": []}

    def agent(obs, tools, last_result):
        if obs.get("solved"):
            return None
        if state["queried"] > len(state["fragments"]):
            state["fragments"].append(obs["last"])
        if state["queried"] < len(keys):
            key = keys[state["queried"]]
            state["queried"] += 1
            return ActionRequest(name="query", args={"key": key})
        return ActionRequest(name="submit", args={"answer": "".join(state["fragments"])})

    return agent


class KeyVaultBenchmark(BenchmarkImpl):
    benchmark_id = "key-vault"
    name = "key-vault"
    version = "0.1.0"
    description = "Secret retrieval against a shared in-memory vault service."

    def resource_config(self) -> ResourceConfig:
        return ResourceConfig(kind="local_process", ram_gb=0.5, disk_gb=0.1, gpu=False)

    def toolsets(self) -> tuple[str, ...]:
        return ("standard", "compact")

    def tasks(self) -> tuple[TaskDescriptor, ...]:
        out = []
        for task_id, cfg in VAULT_TASKS.items():
            out.append(
                TaskDescriptor(
                    task_id=task_id,
                    title=f"Recover the secret behind {len(cfg['keys'])} key(s)",
                    tags=("vault", "secret"),
                    stochastic=True,
                    max_steps=cfg["max_steps"],
                )
            )
        return tuple(sorted(out, key=lambda d: d.task_id))

    def setup(self, ctx: RuntimeContext) -> None:
        ctx.shared["vault"] = VaultService()

    def teardown(self, ctx: RuntimeContext) -> None:
        ctx.shared.pop("vault", None)

    def create_task(
        self,
        descriptor: TaskDescriptor,
        ctx: RuntimeContext,
        seed: int | None,
        session_id: str,
    ) -> TaskImpl:
        return VaultTask(
            task_id=descriptor.task_id,
            keys=VAULT_TASKS[descriptor.task_id]["keys"],
            vault=ctx.shared["vault"],
            toolset=ctx.tool_config.toolset,
            seed=seed,
            namespace=session_id,
        )

    def get_debug_task_configs(self) -> tuple[DebugTaskConfig, ...]:
        return (
            DebugTaskConfig(task_id="vault-easy", seed=0, max_steps=8),
            DebugTaskConfig(task_id="vault-hard", seed=11, max_steps=12),
        )

    def make_debug_agent(self, task_id: str) -> Agent:
        if task_id not in VAULT_TASKS:
            raise TaskNotFound(f"no debug agent for task {task_id!r}")
        return make_vault_debug_agent(VAULT_TASKS[task_id]["keys"])

    def task_ram_mb(self) -> float:
        return 16.0
