"""Episode execution, trajectory recording, and parallel rollout.

A trajectory's canonical form excludes wall time and transport so that the
same episode produces the same bytes no matter where or how it ran.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

from .. import canonical
from ..errors import CubeError, EpisodeTimeout, TaskNotFound
from ..protocol import ActionRequest, StepResult
from ..kit.core import Agent
from .client import BenchmarkSession, TaskClient

DEFAULT_EPISODE_TIMEOUT_S = 60.0


@dataclass(frozen=True)
class TrajectoryStep:
    action: ActionRequest
    result: StepResult

    def to_doc(self) -> dict[str, Any]:
        return {"action": self.action.to_wire(), "result": self.result.to_wire()}


@dataclass
class Trajectory:
    benchmark_id: str
    task_id: str
    seed: int | None
    steps: list[TrajectoryStep]
    final: StepResult
    transport: str
    wall_time_ms: float

    def canonical_doc(self) -> dict[str, Any]:
        """Parity form: everything except wall_time_ms and transport."""
        return {
            "benchmark_id": self.benchmark_id,
            "task_id": self.task_id,
            "seed": self.seed,
            "steps": [step.to_doc() for step in self.steps],
            "final": self.final.to_wire(),
        }

    def canonical(self) -> str:
        return canonical.dumps(self.canonical_doc())


@dataclass(frozen=True)
class RolloutJob:
    task_id: str
    seed: int | None
    make_agent: Callable[[], Agent]


@dataclass(frozen=True)
class RolloutPlan:
    jobs: tuple[RolloutJob, ...]
    parallelism: int = 1
    per_episode_timeout_s: float = DEFAULT_EPISODE_TIMEOUT_S

    def __post_init__(self) -> None:
        if not self.jobs:
            raise ValueError("plan must contain at least one job")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        if self.per_episode_timeout_s <= 0:
            raise ValueError("per_episode_timeout_s must be positive")


@dataclass
class RolloutResult:
    job: RolloutJob
    trajectory: Trajectory | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def run_episode(
    session: BenchmarkSession,
    task_id: str,
    seed: int | None,
    agent: Agent,
    max_steps_override: int | None = None,
    timeout_s: float = DEFAULT_EPISODE_TIMEOUT_S,
    use_split_path: bool = False,
) -> Trajectory:
    """spawn -> reset -> agent/step loop -> close, faithfully recorded.

    Episodes normally advance through cube/step; use_split_path switches to
    tools/call followed by cube/evaluate, which must be indistinguishable.
    """
    descriptor = session.find_task(task_id)
    if descriptor is None:
        raise TaskNotFound(f"unknown task: {task_id!r}")
    max_steps = max_steps_override if max_steps_override is not None else descriptor.max_steps

    benchmark_id = session.info().name
    started = time.monotonic()
    task = session.spawn(task_id, seed)
    try:
        reset = task.reset(seed)
        tools = task.tools_list()
        obs = reset.obs
        last_result: StepResult | None = None
        steps: list[TrajectoryStep] = []
        while True:
            if time.monotonic() - started > timeout_s:
                raise EpisodeTimeout(
                    f"episode on {task_id!r} exceeded {timeout_s} s"
                )
            action = agent(obs, tools, last_result)
            if action is None:
                break
            if use_split_path:
                task.tools_call(action)
                result = task.evaluate()
            else:
                result = task.step(action)
            steps.append(TrajectoryStep(action=action, result=result))
            obs = result.obs
            last_result = result
            if result.terminated or result.truncated or len(steps) >= max_steps:
                break
        final = steps[-1].result if steps else task.evaluate()
    finally:
        _close_quietly(task)
    wall_ms = (time.monotonic() - started) * 1000.0
    return Trajectory(
        benchmark_id=benchmark_id,
        task_id=task_id,
        seed=seed,
        steps=steps,
        final=final,
        transport=session.mode,
        wall_time_ms=wall_ms,
    )


def _close_quietly(task: TaskClient) -> None:
    try:
        task.close()
    except CubeError:
        pass


def run_parallel(session: BenchmarkSession, plan: RolloutPlan) -> list[RolloutResult]:
    """At most plan.parallelism episodes in flight; results in job order."""

    def _one(job: RolloutJob) -> RolloutResult:
        try:
            trajectory = run_episode(
                session,
                job.task_id,
                job.seed,
                job.make_agent(),
                timeout_s=plan.per_episode_timeout_s,
            )
            return RolloutResult(job=job, trajectory=trajectory)
        except Exception as exc:
            return RolloutResult(job=job, error=f"{type(exc).__name__}: {exc}")

    with ThreadPoolExecutor(max_workers=plan.parallelism) as pool:
        futures = [pool.submit(_one, job) for job in plan.jobs]
        return [future.result() for future in futures]


def write_trajectories(trajectories: list[Trajectory], path: str | Path) -> None:
    """One canonical JSON document per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for trajectory in trajectories:
            fh.write(trajectory.canonical())
            fh.write("\n")


def read_trajectories(path: str | Path) -> list[dict[str, Any]]:
    docs = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                docs.append(canonical.loads(line))
    return docs
