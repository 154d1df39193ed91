"""Deliberately defective benchmarks for exercising the conformance suite.

Each fixture violates exactly one compliance property and is otherwise
well behaved, so the suite's per-check soundness can be asserted:

  * broken-reset     second and later resets ignore the seed (wall-clock)
  * broken-isolation all sessions of a task share one mutable state
  * broken-schema    a callable tool is missing from tools/list
"""

from __future__ import annotations

import time

from ..errors import TaskNotFound
from ..protocol import ActionRequest, ResetResult, Tool, ToolCallResult
from ..kit.core import (
    Agent,
    BenchmarkImpl,
    DebugTaskConfig,
    ResourceConfig,
    RuntimeContext,
    TaskDescriptor,
    TaskImpl,
)
from .grid import (
    GRID_SPECS,
    GridSpec,
    GridTask,
    _look_tool,
    _move_tool,
    make_grid_debug_agent,
    render_grid,
    seeded_start_position,
)


class _GridFixtureBenchmark(BenchmarkImpl):
    """Shared plumbing for the single-task grid fixtures."""

    task_id = ""
    task_seed: int | None = None
    stochastic = False

    def resource_config(self) -> ResourceConfig:
        return ResourceConfig(kind="local_process", ram_gb=0.5, disk_gb=0.1, gpu=False)

    def toolsets(self) -> tuple[str, ...]:
        return ("standard", "compact")

    def tasks(self) -> tuple[TaskDescriptor, ...]:
        return (
            TaskDescriptor(
                task_id=self.task_id,
                title="Treasure hunt on a 3x3 grid",
                tags=("grid", "fixture"),
                stochastic=self.stochastic,
                max_steps=12,
            ),
        )

    def get_debug_task_configs(self) -> tuple[DebugTaskConfig, ...]:
        return (
            DebugTaskConfig(task_id=self.task_id, seed=self.task_seed, max_steps=12),
        )

    def make_debug_agent(self, task_id: str) -> Agent:
        if task_id != self.task_id:
            raise TaskNotFound(f"no debug agent for task {task_id!r}")
        return make_grid_debug_agent(self._spec())

    def _spec(self) -> GridSpec:
        return GRID_SPECS["grid-3x3"]


class _FlakyResetTask(GridTask):
    """First reset honors the seed; later resets draw wall-clock entropy."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._reset_count = 0
        self._first_start: tuple[int, int] | None = None

    def reset(self, seed: int | None) -> ResetResult:
        if self._reset_count == 0:
            result = super().reset(seed)
            self._first_start = self.state.agent_pos
        else:
            start = seeded_start_position(self.spec, time.time_ns())
            while start == self._first_start:
                start = seeded_start_position(self.spec, time.time_ns())
            self.state.agent_pos = start
            self.state.steps_taken = 0
            result = ResetResult(obs=self.observation(), info={})
        self._reset_count += 1
        return result


class BrokenResetBenchmark(_GridFixtureBenchmark):
    benchmark_id = "broken-reset"
    name = "broken-reset"
    version = "0.1.0"
    description = "Fixture whose repeated resets are not reproducible."
    task_id = "flaky-3x3"
    task_seed = 7
    stochastic = True

    def _spec(self) -> GridSpec:
        return GRID_SPECS["grid-3x3-seeded"]

    def create_task(self, descriptor, ctx, seed, session_id) -> TaskImpl:
        return _FlakyResetTask(
            task_id=descriptor.task_id,
            spec=self._spec(),
            toolset=ctx.tool_config.toolset,
            seed=seed,
        )


class _StateHolder:
    def __init__(self):
        self.state = None


class _SharedStateTask(GridTask):
    def __init__(self, holder: _StateHolder, **kwargs):
        super().__init__(**kwargs)
        if holder.state is None:
            holder.state = self.state
        else:
            self.state = holder.state


class BrokenIsolationBenchmark(_GridFixtureBenchmark):
    benchmark_id = "broken-isolation"
    name = "broken-isolation"
    version = "0.1.0"
    description = "Fixture whose task instances share one mutable grid state."
    task_id = "shared-3x3"

    def setup(self, ctx: RuntimeContext) -> None:
        ctx.shared["holder"] = _StateHolder()

    def create_task(self, descriptor, ctx, seed, session_id) -> TaskImpl:
        return _SharedStateTask(
            ctx.shared["holder"],
            task_id=descriptor.task_id,
            spec=self._spec(),
            toolset=ctx.tool_config.toolset,
            seed=seed,
        )


def _peek_tool() -> Tool:
    return Tool(
        name="peek",
        description="Render the grid as text.",
        input_schema={"type": "object", "properties": {}, "required": []},
    )


class _HiddenToolTask(GridTask):
    """Accepts a tool that tools/list never declares."""

    def tools(self) -> tuple[Tool, ...]:
        return (_move_tool(), _look_tool(self.toolset))

    def acceptable_tools(self) -> tuple[Tool, ...]:
        return self.tools() + (_peek_tool(),)

    def apply_tool(self, action: ActionRequest) -> ToolCallResult:
        if action.name == "peek":
            self.state.steps_taken += 1
            return ToolCallResult.text(render_grid(self.spec, self.state.agent_pos))
        return super().apply_tool(action)


class BrokenSchemaBenchmark(_GridFixtureBenchmark):
    benchmark_id = "broken-schema"
    name = "broken-schema"
    version = "0.1.0"
    description = "Fixture whose declared tool list omits a callable tool."
    task_id = "hidden-3x3"

    def create_task(self, descriptor, ctx, seed, session_id) -> TaskImpl:
        return _HiddenToolTask(
            task_id=descriptor.task_id,
            spec=self._spec(),
            toolset=ctx.tool_config.toolset,
            seed=seed,
        )

    def make_debug_agent(self, task_id: str) -> Agent:
        if task_id != self.task_id:
            raise TaskNotFound(f"no debug agent for task {task_id!r}")
        spec = self._spec()
        pathfinder = make_grid_debug_agent(spec)
        state = {"peeked": False}

        def agent(obs, tools, last_result):
            if not state["peeked"]:
                state["peeked"] = True
                return ActionRequest(name="peek", args={})
            return pathfinder(obs, tools, last_result)

        return agent


def broken_fixtures() -> list[BenchmarkImpl]:
    return [BrokenResetBenchmark(), BrokenIsolationBenchmark(), BrokenSchemaBenchmark()]
