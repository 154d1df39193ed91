"""cube-run: drive episodes against a target and write trajectory JSONL."""

from __future__ import annotations

import argparse
import json
import sys

from ..errors import CubeError, NotFound
from ..kit.core import Agent
from ..kit.runtime import BenchmarkHandle, start
from .client import BenchmarkSession, connect
from .episode import (
    DEFAULT_EPISODE_TIMEOUT_S,
    RolloutJob,
    RolloutPlan,
    run_parallel,
    write_trajectories,
)


def _resolve_target(target: str) -> tuple[str | BenchmarkHandle, BenchmarkHandle | None]:
    if target.startswith("local:"):
        from ..benchmarks import create_benchmark

        handle = start(create_benchmark(target[len("local:") :]), mode="local")
        return handle, handle
    return target, None


def _debug_agent_factory(session: BenchmarkSession, task_id: str):
    from ..benchmarks import create_benchmark

    impl = create_benchmark(session.info().name)

    def make() -> Agent:
        return impl.make_debug_agent(task_id)

    return make


def _load_jobs_file(path: str, session: BenchmarkSession) -> list[RolloutJob]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    jobs = []
    for job in doc["jobs"]:
        if job.get("agent", "debug") != "debug":
            raise ValueError(f"unsupported agent spec: {job.get('agent')!r}")
        jobs.append(
            RolloutJob(
                task_id=job["task_id"],
                seed=job.get("seed"),
                make_agent=_debug_agent_factory(session, job["task_id"]),
            )
        )
    return jobs


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="cube-run")
    parser.add_argument("--target", required=True, help="endpoint URL or local:<benchmark-id>")
    parser.add_argument("--task", help="task id for a single episode")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--agent", default="debug", choices=["debug"])
    parser.add_argument("--parallel", type=int, default=1)
    parser.add_argument("--jobs-file", help="JSON rollout plan with a jobs list")
    parser.add_argument("--timeout", type=float, default=DEFAULT_EPISODE_TIMEOUT_S)
    parser.add_argument("--out", required=True, help="trajectory JSONL output path")
    args = parser.parse_args(argv)

    if not args.task and not args.jobs_file:
        parser.error("one of --task or --jobs-file is required")

    target, handle = _resolve_target(args.target)
    try:
        session = connect(target)
        if args.jobs_file:
            jobs = _load_jobs_file(args.jobs_file, session)
        else:
            jobs = [
                RolloutJob(
                    task_id=args.task,
                    seed=args.seed,
                    make_agent=_debug_agent_factory(session, args.task),
                )
            ]
        plan = RolloutPlan(
            jobs=tuple(jobs),
            parallelism=args.parallel,
            per_episode_timeout_s=args.timeout,
        )
        results = run_parallel(session, plan)
    except (CubeError, NotFound, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if handle is not None:
            handle.stop()
        return 1

    failures = [r for r in results if not r.ok]
    write_trajectories([r.trajectory for r in results if r.trajectory is not None], args.out)
    for result in results:
        if result.ok and result.trajectory is not None:
            t = result.trajectory
            print(
                f"{t.task_id} seed={t.seed} reward={t.final.reward} steps={len(t.steps)}"
            )
        else:
            print(f"{result.job.task_id} seed={result.job.seed} error={result.error}")
    if handle is not None:
        handle.stop()
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
