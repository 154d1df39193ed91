"""Black-box compliance and stress checks against any benchmark target.

Checks run in a fixed order and never abort the suite; failures are data.
Badges derive purely from which checks passed, so a registry can trust a
badge without re-reading the transcript.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Any, Callable

from .. import canonical
from ..errors import (
    ConnectFailed,
    CubeError,
    METHOD_NOT_FOUND,
    NotFound,
    ProtocolMismatch,
    TargetUnreachable,
)
from ..protocol import (
    ALL_METHODS,
    DESCRIPTION_URI,
    OBSERVATION_URI,
    ActionRequest,
    method_in_namespace,
    validate_action,
)
from ..rng import Splitmix64
from ..kit.core import BenchmarkImpl, DebugTaskConfig, ToolConfig
from ..kit.runtime import BenchmarkHandle, start
from ..harness.client import BenchmarkSession, TaskClient, connect
from ..harness.episode import run_episode

BASIC_LEVEL = "basic"
STRESS_LEVEL = "stress"

ISOLATION_SESSIONS = 16
RESOURCE_CHECK_SESSIONS = 8

# Badge name -> the checks that must all pass for it to be granted.
BADGE_TABLE: dict[str, tuple[str, ...]] = {
    "task-isolated": ("task-isolated",),
    "reset-idempotent": ("reset-idempotent",),
    "debug-solvable": ("debug-solve",),
}


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    level: str
    passed: bool
    detail: str

    def to_wire(self) -> dict[str, Any]:
        return {
            "check_id": self.check_id,
            "level": self.level,
            "passed": self.passed,
            "detail": self.detail,
        }

    @staticmethod
    def from_wire(doc: dict[str, Any]) -> "CheckResult":
        return CheckResult(
            check_id=doc["check_id"],
            level=doc["level"],
            passed=doc["passed"],
            detail=doc["detail"],
        )


@dataclass
class ComplianceReport:
    benchmark_id: str
    version: str
    checks: list[CheckResult]
    badges: list[str]
    started: float
    finished: float

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def check(self, check_id: str) -> CheckResult | None:
        return next((c for c in self.checks if c.check_id == check_id), None)

    def to_wire(self) -> dict[str, Any]:
        return {
            "benchmark_id": self.benchmark_id,
            "version": self.version,
            "checks": [check.to_wire() for check in self.checks],
            "badges": list(self.badges),
            "started": self.started,
            "finished": self.finished,
        }

    @staticmethod
    def from_wire(doc: dict[str, Any]) -> "ComplianceReport":
        return ComplianceReport(
            benchmark_id=doc["benchmark_id"],
            version=doc["version"],
            checks=[CheckResult.from_wire(c) for c in doc["checks"]],
            badges=list(doc["badges"]),
            started=doc["started"],
            finished=doc["finished"],
        )

    def canonical(self) -> str:
        return canonical.dumps(self.to_wire())


def derive_badges(checks: list[CheckResult]) -> list[str]:
    """A badge appears iff every one of its constituent checks ran and passed."""
    by_id = {check.check_id: check for check in checks}
    badges = []
    for badge, needed in BADGE_TABLE.items():
        if all(c in by_id and by_id[c].passed for c in needed):
            badges.append(badge)
    return badges


def _failures_detail(failures: list[str]) -> str:
    if not failures:
        return "ok"
    shown = "; ".join(failures[:5])
    if len(failures) > 5:
        shown += f"; and {len(failures) - 5} more"
    return shown


def _close_quietly(task: TaskClient) -> None:
    try:
        task.close()
    except CubeError:
        pass


def _record_actions(
    session: BenchmarkSession, impl: BenchmarkImpl, cfg: DebugTaskConfig
) -> list[ActionRequest]:
    """The debug agent's action sequence on a fresh instance of cfg."""
    agent = impl.make_debug_agent(cfg.task_id)
    task = session.spawn(cfg.task_id, cfg.seed)
    actions: list[ActionRequest] = []
    try:
        reset = task.reset(cfg.seed)
        tools = task.tools_list()
        obs = reset.obs
        last = None
        while len(actions) < cfg.max_steps:
            action = agent(obs, tools, last)
            if action is None:
                break
            actions.append(action)
            result = task.step(action)
            obs = result.obs
            last = result
            if result.terminated or result.truncated:
                break
    finally:
        _close_quietly(task)
    return actions


def _replay(task: TaskClient, seed: int | None, actions: list[ActionRequest]) -> dict[str, Any]:
    """Blind reset-and-replay transcript of a fixed action list."""
    reset = task.reset(seed)
    steps: list[Any] = []
    for action in actions:
        try:
            result = task.step(action)
        except CubeError as exc:
            steps.append({"error": f"{type(exc).__name__}: {exc}"})
            break
        steps.append({"action": action.to_wire(), "result": result.to_wire()})
    return {"reset": reset.to_wire(), "steps": steps}


# -- individual checks ---------------------------------------------------------


def _check_protocol_shape(
    session: BenchmarkSession, impl: BenchmarkImpl | None
) -> tuple[bool, str]:
    failures: list[str] = []

    for method in sorted(ALL_METHODS):
        if not method_in_namespace(method):
            failures.append(f"method {method} violates the namespace partition")

    info_doc = session.raw("cube/info")
    expected_info = {"name", "version", "description", "resource_requirements", "task_count"}
    if not isinstance(info_doc, dict) or set(info_doc) != expected_info:
        failures.append(f"cube/info keys: {sorted(info_doc)}")

    tasks_doc = session.raw("cube/tasks")
    if not isinstance(tasks_doc, dict) or "items" not in tasks_doc:
        failures.append("cube/tasks must return an items list")
    else:
        descriptor_keys = {"task_id", "title", "tags", "stochastic", "max_steps"}
        for item in tasks_doc["items"]:
            if set(item) != descriptor_keys:
                failures.append(f"task descriptor keys: {sorted(item)}")
                break

    if not isinstance(session.raw("cube/status"), list):
        failures.append("cube/status must return a list")

    try:
        session.raw("cube/shutdown", {"session_id": "conformance-no-such-session"})
        failures.append("cube/shutdown accepted an unknown session id")
    except CubeError as exc:
        if exc.code == METHOD_NOT_FOUND:
            failures.append("cube/shutdown is not served")

    for absent in ("cube/does_not_exist", "tools/list", "gym/step"):
        try:
            session.raw(absent)
            failures.append(f"benchmark endpoint accepted {absent}")
        except CubeError as exc:
            if exc.code != METHOD_NOT_FOUND:
                failures.append(f"{absent} should be method-not-found, got {exc.code}")

    if impl is None:
        failures.append("package hooks unavailable; task-level shape not probed")
        return not failures, _failures_detail(failures)

    cfgs = impl.get_debug_task_configs()
    cfg = cfgs[0]
    agent = impl.make_debug_agent(cfg.task_id)
    task = session.spawn(cfg.task_id, cfg.seed)
    try:
        tools_doc = task.raw("tools/list")
        tool_keys = {"name", "description", "input_schema"}
        names = []
        for tool in tools_doc:
            if set(tool) != tool_keys:
                failures.append(f"tool keys: {sorted(tool)}")
            names.append(tool.get("name"))
        if len(names) != len(set(names)):
            failures.append("duplicate tool names in tools/list")

        resources_doc = task.raw("resources/list")
        uris = [r.get("uri") for r in resources_doc]
        if len(uris) != len(set(uris)):
            failures.append("duplicate resource uris")
        for required_uri in (DESCRIPTION_URI, OBSERVATION_URI):
            if required_uri not in uris:
                failures.append(f"missing canonical resource {required_uri}")

        if not isinstance(task.raw("cube/privileged_info"), str):
            failures.append("cube/privileged_info must return a string")

        reset_doc = task.raw("cube/reset", {} if cfg.seed is None else {"seed": cfg.seed})
        if set(reset_doc) != {"obs", "info"}:
            failures.append(f"cube/reset keys: {sorted(reset_doc)}")

        obs_read = task.raw("resources/read", {"uri": OBSERVATION_URI})
        if obs_read["contents"][0]["payload"] != reset_doc["obs"]:
            failures.append("observation resource disagrees with reset obs")

        desc_read = task.raw("resources/read", {"uri": DESCRIPTION_URI})
        if not desc_read.get("contents"):
            failures.append("description resource returned no content")

        try:
            task.raw("resources/read", {"uri": "cube://task/no-such-resource"})
            failures.append("resources/read accepted an unknown uri")
        except CubeError as exc:
            if exc.code == METHOD_NOT_FOUND:
                failures.append("resources/read is not served")

        five = {"obs", "reward", "terminated", "truncated", "info"}
        eval_doc = task.raw("cube/evaluate")
        if set(eval_doc) != five:
            failures.append(f"cube/evaluate keys: {sorted(eval_doc)}")
        else:
            if not isinstance(eval_doc["reward"], (int, float)):
                failures.append("reward must be a number")
            if not isinstance(eval_doc["terminated"], bool) or not isinstance(
                eval_doc["truncated"], bool
            ):
                failures.append("terminated/truncated must be booleans")

        first_action = agent(reset_doc["obs"], task.tools_list(), None)
        if first_action is not None:
            call_doc = task.raw(
                "tools/call", {"name": first_action.name, "args": first_action.args}
            )
            if set(call_doc) != {"content", "is_error"}:
                failures.append(f"tools/call keys: {sorted(call_doc)}")
            step_doc = task.raw(
                "cube/step",
                {"action": {"name": first_action.name, "args": first_action.args}},
            )
            if set(step_doc) != five:
                failures.append(f"cube/step keys: {sorted(step_doc)}")

        for absent in ("cube/spawn", "tools/destroy"):
            try:
                task.raw(absent)
                failures.append(f"task endpoint accepted {absent}")
            except CubeError as exc:
                if exc.code != METHOD_NOT_FOUND:
                    failures.append(f"{absent} should be method-not-found, got {exc.code}")
    finally:
        _close_quietly(task)

    # Every action the benchmark's own scripted agent takes must validate
    # against the declared tool list.
    replay_task = session.spawn(cfg.task_id, cfg.seed)
    try:
        reset = replay_task.reset(cfg.seed)
        declared = replay_task.tools_list()
        agent = impl.make_debug_agent(cfg.task_id)
        obs = reset.obs
        last = None
        for _ in range(cfg.max_steps):
            action = agent(obs, declared, last)
            if action is None:
                break
            try:
                validate_action(action, declared)
            except CubeError as exc:
                failures.append(f"undeclared or ill-typed action {action.name!r}: {exc}")
                break
            result = replay_task.step(action)
            obs = result.obs
            last = result
            if result.terminated or result.truncated:
                break
    finally:
        _close_quietly(replay_task)

    return not failures, _failures_detail(failures)


def _check_debug_solve(
    session: BenchmarkSession, impl: BenchmarkImpl | None
) -> tuple[bool, str]:
    if impl is None:
        return False, "package hooks unavailable"
    failures = []
    for cfg in impl.get_debug_task_configs():
        agent = impl.make_debug_agent(cfg.task_id)
        trajectory = run_episode(
            session, cfg.task_id, cfg.seed, agent, max_steps_override=cfg.max_steps
        )
        if trajectory.final.reward != cfg.expected_final_reward:
            failures.append(
                f"{cfg.task_id}: reward {trajectory.final.reward} != {cfg.expected_final_reward}"
            )
        elif not trajectory.final.terminated:
            failures.append(f"{cfg.task_id}: episode did not terminate")
    return not failures, _failures_detail(failures)


def _check_reset_idempotent(
    session: BenchmarkSession, impl: BenchmarkImpl | None
) -> tuple[bool, str]:
    if impl is None:
        return False, "package hooks unavailable"
    failures = []
    for cfg in impl.get_debug_task_configs():
        actions = _record_actions(session, impl, cfg)
        task = session.spawn(cfg.task_id, cfg.seed)
        try:
            first = canonical.dumps(_replay(task, cfg.seed, actions))
            second = canonical.dumps(_replay(task, cfg.seed, actions))
        finally:
            _close_quietly(task)
        if first != second:
            failures.append(f"{cfg.task_id}: repeated reset+replay diverged")
    return not failures, _failures_detail(failures)


def _check_task_isolated(
    session: BenchmarkSession, impl: BenchmarkImpl | None
) -> tuple[bool, str]:
    if impl is None:
        return False, "package hooks unavailable"
    cfg = impl.get_debug_task_configs()[0]
    actions = _record_actions(session, impl, cfg)

    solo_task = session.spawn(cfg.task_id, cfg.seed)
    try:
        solo = canonical.dumps(_replay(solo_task, cfg.seed, actions))
    finally:
        _close_quietly(solo_task)

    tasks = [session.spawn(cfg.task_id, cfg.seed) for _ in range(ISOLATION_SESSIONS)]
    failures = []
    try:
        transcripts: list[dict[str, Any]] = []
        remaining: list[list[ActionRequest]] = []
        for task in tasks:
            reset = task.reset(cfg.seed)
            transcripts.append({"reset": reset.to_wire(), "steps": []})
            remaining.append(list(actions))

        # Fixed interleaving schedule so that any failure reproduces exactly.
        schedule = Splitmix64(1)
        while any(remaining):
            pick = schedule.next_below(ISOLATION_SESSIONS)
            while not remaining[pick]:
                pick = (pick + 1) % ISOLATION_SESSIONS
            action = remaining[pick].pop(0)
            try:
                result = tasks[pick].step(action)
                transcripts[pick]["steps"].append(
                    {"action": action.to_wire(), "result": result.to_wire()}
                )
            except CubeError as exc:
                transcripts[pick]["steps"].append(
                    {"error": f"{type(exc).__name__}: {exc}"}
                )
                remaining[pick] = []

        for i, transcript in enumerate(transcripts):
            if canonical.dumps(transcript) != solo:
                failures.append(f"session {i} diverged from its solo run")
    finally:
        for task in tasks:
            _close_quietly(task)
    return not failures, _failures_detail(failures)


def _check_resource_bounded(
    session: BenchmarkSession, impl: BenchmarkImpl | None
) -> tuple[bool, str]:
    if impl is None:
        return False, "package hooks unavailable"
    cfg = impl.get_debug_task_configs()[0]
    info = session.info()
    ram_budget_mb = info.resource_requirements.ram_gb * 1024.0
    failures = []
    tasks = [session.spawn(cfg.task_id, cfg.seed) for _ in range(RESOURCE_CHECK_SESSIONS)]
    spawned_ids = {task.session_id for task in tasks}
    try:
        entries = session.status()
        seen = {e.session_id for e in entries}
        if not spawned_ids <= seen:
            failures.append("status is missing live sessions")
        for entry in entries:
            usage = entry.resource_usage
            open_sessions = usage.get("open_sessions", 0)
            ram_estimate = usage.get("ram_mb_estimate", 0.0)
            if open_sessions * ram_estimate > ram_budget_mb:
                failures.append(
                    f"estimated ram {open_sessions * ram_estimate} MB exceeds "
                    f"declared budget {ram_budget_mb} MB"
                )
                break
    finally:
        for task in tasks:
            _close_quietly(task)
    after = {e.session_id for e in session.status()}
    if after & spawned_ids:
        failures.append("closed sessions still visible in status")
    return not failures, _failures_detail(failures)


def _check_toolconfig_swap(
    session: BenchmarkSession,
    impl: BenchmarkImpl | None,
    handle: BenchmarkHandle | None,
) -> tuple[bool, str]:
    if impl is None:
        return False, "package hooks unavailable"
    if handle is None:
        return True, "skipped: remote target cannot be restarted by the checker"
    toolsets = impl.toolsets()
    active = handle.tool_config.toolset
    alternates = [t for t in toolsets if t != active]
    if not alternates:
        return True, "single toolset registered; nothing to swap"

    cfg = impl.get_debug_task_configs()[0]
    task = session.spawn(cfg.task_id, cfg.seed)
    try:
        active_tools = canonical.dumps([t.to_wire() for t in task.tools_list()])
    finally:
        _close_quietly(task)

    alternate_handle = start(
        type(impl)(), mode="local", tool_config=ToolConfig(toolset=alternates[0])
    )
    try:
        alternate_session = connect(alternate_handle)
        alternate_task = alternate_session.spawn(cfg.task_id, cfg.seed)
        try:
            swapped_tools = canonical.dumps(
                [t.to_wire() for t in alternate_task.tools_list()]
            )
        finally:
            _close_quietly(alternate_task)
    finally:
        alternate_handle.stop()

    if swapped_tools == active_tools:
        return False, (
            f"tools/list identical under toolsets {active!r} and {alternates[0]!r}"
        )
    return True, "ok"


def run_suite(target: str | BenchmarkHandle, level: str = BASIC_LEVEL) -> ComplianceReport:
    """Execute the compliance checks, in order, against a reachable target."""
    if level not in (BASIC_LEVEL, STRESS_LEVEL):
        raise ValueError(f"level must be 'basic' or 'stress', got {level!r}")
    started = time.time()
    try:
        session = connect(target)
        info = session.info()
    except (ConnectFailed, ProtocolMismatch) as exc:
        raise TargetUnreachable(f"cannot verify {target!r}: {exc}") from exc

    handle = target if isinstance(target, BenchmarkHandle) else None
    if handle is not None:
        impl: BenchmarkImpl | None = handle.impl
    else:
        from ..benchmarks import create_benchmark

        try:
            impl = create_benchmark(info.name)
        except NotFound:
            impl = None

    def guarded(check_id: str, check_level: str, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
        try:
            passed, detail = fn()
        except Exception as exc:
            passed, detail = False, f"check crashed: {type(exc).__name__}: {exc}"
        return CheckResult(check_id=check_id, level=check_level, passed=passed, detail=detail)

    checks = [
        guarded("protocol-shape", BASIC_LEVEL, lambda: _check_protocol_shape(session, impl)),
        guarded("debug-solve", BASIC_LEVEL, lambda: _check_debug_solve(session, impl)),
        guarded(
            "reset-idempotent", BASIC_LEVEL, lambda: _check_reset_idempotent(session, impl)
        ),
    ]
    if level == STRESS_LEVEL:
        checks.extend(
            [
                guarded(
                    "task-isolated", STRESS_LEVEL, lambda: _check_task_isolated(session, impl)
                ),
                guarded(
                    "resource-bounded",
                    STRESS_LEVEL,
                    lambda: _check_resource_bounded(session, impl),
                ),
                guarded(
                    "toolconfig-swap",
                    STRESS_LEVEL,
                    lambda: _check_toolconfig_swap(session, impl, handle),
                ),
            ]
        )

    return ComplianceReport(
        benchmark_id=info.name,
        version=info.version,
        checks=checks,
        badges=derive_badges(checks),
        started=started,
        finished=time.time(),
    )
