"""Treasure grid: a family of deterministic and seeded gridworld tasks.

The agent starts somewhere on a rectangular grid and must reach the
treasure. Walls block movement; bumping one wastes the step. Rewards are
sparse: 1.0 on the treasure square, 0.0 anywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import TaskNotFound
from ..protocol import ActionRequest, ResetResult, StepResult, Tool, ToolCallResult
from ..rng import Splitmix64
from ..kit.core import (
    Agent,
    BenchmarkImpl,
    DebugTaskConfig,
    ResourceConfig,
    RuntimeContext,
    TaskDescriptor,
    TaskImpl,
)

DIRECTIONS = {
    "north": (-1, 0),
    "south": (1, 0),
    "east": (0, 1),
    "west": (0, -1),
}

# Neighbor expansion order for pathfinding. Fixed so that every
# implementation of the scripted solver walks the identical route.
DIRECTION_ORDER = ("east", "south", "west", "north")

LEGEND = "legend: A=agent T=treasure #=wall .=empty"

# grid-7x7-walls layout: three wall rows force a snake path of 24 moves.
WALLS_7X7 = frozenset(
    [(1, c) for c in range(0, 6)]
    + [(3, c) for c in range(1, 7)]
    + [(5, c) for c in range(0, 6)]
)


@dataclass(frozen=True)
class GridSpec:
    width: int
    height: int
    start: tuple[int, int]
    goal: tuple[int, int]
    walls: frozenset[tuple[int, int]] = frozenset()
    seeded_start: bool = False


@dataclass
class GridState:
    width: int
    height: int
    agent_pos: tuple[int, int]
    goal_pos: tuple[int, int]
    steps_taken: int = 0


GRID_SPECS: dict[str, GridSpec] = {
    "grid-3x3": GridSpec(width=3, height=3, start=(0, 0), goal=(2, 2)),
    "grid-3x3-seeded": GridSpec(
        width=3, height=3, start=(0, 0), goal=(2, 2), seeded_start=True
    ),
    "grid-5x5": GridSpec(width=5, height=5, start=(0, 0), goal=(4, 4)),
    "grid-7x7-walls": GridSpec(
        width=7, height=7, start=(0, 0), goal=(6, 6), walls=WALLS_7X7
    ),
}

GRID_MAX_STEPS = {
    "grid-3x3": 12,
    "grid-3x3-seeded": 12,
    "grid-5x5": 24,
    "grid-7x7-walls": 48,
}


def seeded_start_position(spec: GridSpec, seed: int) -> tuple[int, int]:
    """Row-major cell from the seeded stream, rerolled while it hits the goal."""
    gen = Splitmix64(seed)
    cells = spec.width * spec.height
    goal_index = spec.goal[0] * spec.width + spec.goal[1]
    index = gen.next_below(cells)
    while index == goal_index:
        index = gen.next_below(cells)
    return (index // spec.width, index % spec.width)


def bfs_path(spec: GridSpec, start: tuple[int, int]) -> list[str] | None:
    """Shortest move sequence from start to the goal, or None if unreachable."""
    if start == spec.goal:
        return []
    parents: dict[tuple[int, int], tuple[tuple[int, int], str]] = {}
    frontier = [start]
    seen = {start}
    while frontier:
        nxt: list[tuple[int, int]] = []
        for pos in frontier:
            for direction in DIRECTION_ORDER:
                dr, dc = DIRECTIONS[direction]
                cand = (pos[0] + dr, pos[1] + dc)
                if not (0 <= cand[0] < spec.height and 0 <= cand[1] < spec.width):
                    continue
                if cand in spec.walls or cand in seen:
                    continue
                seen.add(cand)
                parents[cand] = (pos, direction)
                if cand == spec.goal:
                    moves: list[str] = []
                    cur = cand
                    while cur != start:
                        prev, mv = parents[cur]
                        moves.append(mv)
                        cur = prev
                    moves.reverse()
                    return moves
                nxt.append(cand)
        frontier = nxt
    return None


def render_grid(spec: GridSpec, agent: tuple[int, int]) -> str:
    rows = []
    for r in range(spec.height):
        row = []
        for c in range(spec.width):
            if (r, c) == agent:
                row.append("A")
            elif (r, c) == spec.goal:
                row.append("T")
            elif (r, c) in spec.walls:
                row.append("#")
            else:
                row.append(".")
        rows.append("".join(row))
    return "\n".join(rows)


def _move_tool() -> Tool:
    return Tool(
        name="move",
        description="Move the agent one cell in the given compass direction.",
        input_schema={
            "type": "object",
            "properties": {
                "direction": {
                    "type": "string",
                    "enum": ["north", "south", "east", "west"],
                }
            },
            "required": ["direction"],
        },
    )


def _look_tool(toolset: str) -> Tool:
    if toolset == "compact":
        description = "Render the grid as text."
    else:
        description = f"Render the grid as text, followed by a {LEGEND}."
    return Tool(
        name="look",
        description=description,
        input_schema={"type": "object", "properties": {}, "required": []},
    )


class GridTask(TaskImpl):
    def __init__(self, task_id: str, spec: GridSpec, toolset: str, seed: int | None):
        self.task_id = task_id
        self.spec = spec
        self.toolset = toolset
        self._seed = seed
        self.state = GridState(
            width=spec.width,
            height=spec.height,
            agent_pos=self._start_for(seed),
            goal_pos=spec.goal,
        )

    def _start_for(self, seed: int | None) -> tuple[int, int]:
        if self.spec.seeded_start and seed is not None:
            return seeded_start_position(self.spec, seed)
        return self.spec.start

    def tools(self) -> tuple[Tool, ...]:
        return (_move_tool(), _look_tool(self.toolset))

    def description(self) -> str:
        return (
            f"Find the treasure on a {self.spec.width}x{self.spec.height} grid. "
            "Use move to walk north/south/east/west and look to see the board. "
            "The episode ends when you stand on the treasure."
        )

    def reset(self, seed: int | None) -> ResetResult:
        self.state.agent_pos = self._start_for(seed)
        self.state.steps_taken = 0
        return ResetResult(obs=self.observation(), info={})

    def apply_tool(self, action: ActionRequest) -> ToolCallResult:
        self.state.steps_taken += 1
        if action.name == "look":
            rendering = render_grid(self.spec, self.state.agent_pos)
            if self.toolset != "compact":
                rendering = f"{rendering}\n{LEGEND}"
            return ToolCallResult.text(rendering)
        dr, dc = DIRECTIONS[action.args["direction"]]
        r, c = self.state.agent_pos
        cand = (r + dr, c + dc)
        blocked = (
            not (0 <= cand[0] < self.spec.height and 0 <= cand[1] < self.spec.width)
            or cand in self.spec.walls
        )
        if blocked:
            return ToolCallResult.text(
                f"bumped into a wall going {action.args['direction']}", is_error=True
            )
        self.state.agent_pos = cand
        return ToolCallResult.text(f"moved {action.args['direction']}")

    def evaluate(self) -> StepResult:
        terminated = self.state.agent_pos == self.spec.goal
        return StepResult(
            obs=self.observation(),
            reward=1.0 if terminated else 0.0,
            terminated=terminated,
            truncated=False,
            info={},
        )

    def observation(self) -> dict:
        return {"position": list(self.state.agent_pos)}

    def privileged_info(self) -> str:
        start = self._start_for(self._seed)
        path = bfs_path(self.spec, start)
        length = len(path) if path is not None else -1
        r, c = self.spec.goal
        return f"goal at ({r},{c}); shortest path from start: {length} moves"


def make_grid_debug_agent(spec: GridSpec) -> Agent:
    """Recomputes the shortest path from the observed position every step."""

    def agent(obs, tools, last_result):
        pos = (obs["position"][0], obs["position"][1])
        if pos == spec.goal:
            return None
        path = bfs_path(spec, pos)
        if not path:
            return None
        return ActionRequest(name="move", args={"direction": path[0]})

    return agent


class TreasureGridBenchmark(BenchmarkImpl):
    benchmark_id = "treasure-grid"
    name = "treasure-grid"
    version = "0.1.0"
    description = "Gridworld treasure hunts with walls and seeded variants."

    def resource_config(self) -> ResourceConfig:
        return ResourceConfig(kind="local_process", ram_gb=0.5, disk_gb=0.1, gpu=False)

    def toolsets(self) -> tuple[str, ...]:
        return ("standard", "compact")

    def tasks(self) -> tuple[TaskDescriptor, ...]:
        out = []
        for task_id, spec in GRID_SPECS.items():
            tags = ["grid"]
            if spec.walls:
                tags.append("walls")
            if spec.seeded_start:
                tags.append("seeded")
            out.append(
                TaskDescriptor(
                    task_id=task_id,
                    title=f"Treasure hunt on a {spec.width}x{spec.height} grid",
                    tags=tuple(tags),
                    stochastic=spec.seeded_start,
                    max_steps=GRID_MAX_STEPS[task_id],
                )
            )
        return tuple(sorted(out, key=lambda d: d.task_id))

    def create_task(
        self,
        descriptor: TaskDescriptor,
        ctx: RuntimeContext,
        seed: int | None,
        session_id: str,
    ) -> TaskImpl:
        return GridTask(
            task_id=descriptor.task_id,
            spec=GRID_SPECS[descriptor.task_id],
            toolset=ctx.tool_config.toolset,
            seed=seed,
        )

    def get_debug_task_configs(self) -> tuple[DebugTaskConfig, ...]:
        return (
            DebugTaskConfig(task_id="grid-3x3", seed=None, max_steps=12),
            DebugTaskConfig(task_id="grid-3x3-seeded", seed=7, max_steps=12),
            DebugTaskConfig(task_id="grid-7x7-walls", seed=None, max_steps=48),
        )

    def make_debug_agent(self, task_id: str) -> Agent:
        if task_id not in {cfg.task_id for cfg in self.get_debug_task_configs()}:
            raise TaskNotFound(f"no debug agent for task {task_id!r}")
        return make_grid_debug_agent(GRID_SPECS[task_id])

    def task_ram_mb(self) -> float:
        return 16.0
