"""Consumer side: connect, run episodes, orchestrate rollouts."""

from .client import BenchmarkSession, HttpTransport, LocalTransport, TaskClient, connect
from .episode import (
    RolloutJob,
    RolloutPlan,
    RolloutResult,
    Trajectory,
    TrajectoryStep,
    read_trajectories,
    run_episode,
    run_parallel,
    write_trajectories,
)

__all__ = [
    "BenchmarkSession",
    "HttpTransport",
    "LocalTransport",
    "RolloutJob",
    "RolloutPlan",
    "RolloutResult",
    "TaskClient",
    "Trajectory",
    "TrajectoryStep",
    "connect",
    "read_trajectories",
    "run_episode",
    "run_parallel",
    "write_trajectories",
]
