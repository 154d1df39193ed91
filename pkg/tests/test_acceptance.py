"""Acceptance gate: every criterion at its stated tolerance.

Each test prints one ACCEPTANCE line so a transcript shows the full
pass/fail vector. Byte-equality criteria use canonical serialization with
zero tolerance.
"""

from __future__ import annotations

import functools
import time

import pytest

from cube import canonical
from cube.benchmarks import REFERENCE_IDS, create_benchmark
from cube.conformance.cli import main as verify_main
from cube.conformance.suite import _check_task_isolated
from cube.harness import (
    RolloutJob,
    RolloutPlan,
    connect,
    run_episode,
    run_parallel,
)
from cube.kit import start
from cube.protocol import (
    BENCHMARK_METHODS,
    TASK_METHODS,
    ActionRequest,
)
from cube.registry import Registry, RegistryFilter, local_verification_hook
from cube.rng import Splitmix64

from conftest import free_ports


def criterion(name: str):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"ACCEPTANCE {name}: FAIL")
                raise
            print(f"ACCEPTANCE {name}: PASS")

        return wrapper

    return decorate


@pytest.fixture(scope="module")
def stacks():
    """Local and RPC handles for both reference benchmarks."""
    built = {}
    for benchmark_id in REFERENCE_IDS:
        local = start(create_benchmark(benchmark_id), mode="local")
        rpc = start(
            create_benchmark(benchmark_id),
            available_ports=free_ports(30),
            mode="rpc",
        )
        built[benchmark_id] = {"local": local, "rpc": rpc}
    yield built
    for stack in built.values():
        stack["local"].stop()
        stack["rpc"].stop()


def debug_runs(stacks, transport: str):
    for benchmark_id in REFERENCE_IDS:
        impl = create_benchmark(benchmark_id)
        handle = stacks[benchmark_id][transport]
        target = handle if transport == "local" else handle.endpoint
        session = connect(target)
        for cfg in impl.get_debug_task_configs():
            agent = impl.make_debug_agent(cfg.task_id)
            yield cfg, run_episode(
                session, cfg.task_id, cfg.seed, agent, max_steps_override=cfg.max_steps
            )


@criterion("debug-solve")
def test_debug_solve_both_transports_under_10s(stacks):
    started = time.monotonic()
    episodes = 0
    for transport in ("local", "rpc"):
        for cfg, trajectory in debug_runs(stacks, transport):
            assert trajectory.final.reward == 1.0, (transport, cfg.task_id)
            assert trajectory.final.terminated, (transport, cfg.task_id)
            episodes += 1
    elapsed = time.monotonic() - started
    assert episodes == 10
    assert elapsed < 10.0, f"debug solve took {elapsed:.2f}s"


@criterion("transport-parity")
def test_transport_parity_byte_equality(stacks):
    local = {
        (t.benchmark_id, cfg.task_id): t.canonical().encode()
        for cfg, t in debug_runs(stacks, "local")
    }
    rpc = {
        (t.benchmark_id, cfg.task_id): t.canonical().encode()
        for cfg, t in debug_runs(stacks, "rpc")
    }
    assert set(local) == set(rpc) and len(local) == 5
    for key in local:
        assert local[key] == rpc[key], key


def _grid_action(gen: Splitmix64) -> ActionRequest:
    pick = gen.next_below(5)
    if pick == 4:
        return ActionRequest("look", {})
    direction = ("north", "south", "east", "west")[pick]
    return ActionRequest("move", {"direction": direction})


def _vault_action(gen: Splitmix64) -> ActionRequest:
    pick = gen.next_below(4)
    if pick == 0:
        return ActionRequest("query", {"key": "k0"})
    if pick == 1:
        return ActionRequest("query", {"key": f"k{gen.next_below(9)}"})
    if pick == 2:
        return ActionRequest("submit", {"answer": "deadbeef"})
    return ActionRequest("submit", {"answer": f"{gen.next():016x}"})


def _replay_transcript(task, seed, actions):
    transcript = [task.reset(seed).to_wire()]
    for action in actions:
        result = task.step(action)
        transcript.append({"action": action.to_wire(), "result": result.to_wire()})
        if result.terminated or result.truncated:
            break
    return canonical.dumps(transcript)


@criterion("reset-idempotence")
def test_reset_idempotence_20x20(stacks):
    cases = [
        ("treasure-grid", "grid-3x3-seeded", _grid_action),
        ("key-vault", "vault-easy", _vault_action),
    ]
    gen = Splitmix64(777)
    for benchmark_id, task_id, make_action in cases:
        session = connect(stacks[benchmark_id]["local"])
        seeds = [gen.next_below(100000) for _ in range(20)]
        task = session.spawn(task_id, seeds[0])
        try:
            for seed in seeds:
                for _ in range(20):
                    actions = [make_action(gen) for _ in range(6)]
                    first = _replay_transcript(task, seed, actions)
                    second = _replay_transcript(task, seed, actions)
                    assert first == second, (task_id, seed)
        finally:
            task.close()


@criterion("isolation-stress")
def test_isolation_stress_16_sessions(stacks):
    started = time.monotonic()
    for benchmark_id in REFERENCE_IDS:
        session = connect(stacks[benchmark_id]["local"])
        impl = create_benchmark(benchmark_id)
        passed, detail = _check_task_isolated(session, impl)
        assert passed, f"{benchmark_id}: {detail}"
    elapsed = time.monotonic() - started
    assert elapsed < 60.0, f"isolation stress took {elapsed:.2f}s"


@criterion("conformance-soundness")
def test_conformance_soundness_via_cli(tmp_path):
    for benchmark_id in REFERENCE_IDS:
        report_path = tmp_path / f"{benchmark_id}.json"
        code = verify_main(
            [
                "--target",
                f"local:{benchmark_id}",
                "--level",
                "stress",
                "--report",
                str(report_path),
            ]
        )
        assert code == 0, benchmark_id
        report = canonical.loads(report_path.read_text())
        assert all(check["passed"] for check in report["checks"])

    targeted = {
        "broken-reset": "reset-idempotent",
        "broken-isolation": "task-isolated",
        "broken-schema": "protocol-shape",
    }
    for benchmark_id, expected_check in targeted.items():
        report_path = tmp_path / f"{benchmark_id}.json"
        code = verify_main(
            [
                "--target",
                f"local:{benchmark_id}",
                "--level",
                "stress",
                "--report",
                str(report_path),
            ]
        )
        assert code == 1, benchmark_id
        report = canonical.loads(report_path.read_text())
        failed = [c["check_id"] for c in report["checks"] if not c["passed"]]
        assert failed == [expected_check], (benchmark_id, failed)


@criterion("step-evaluate-coherence")
def test_step_evaluate_coherence_200_actions(stacks):
    session = connect(stacks["treasure-grid"]["local"])
    gen = Splitmix64(888)
    seed = gen.next_below(100000)
    stepped = session.spawn("grid-3x3-seeded", seed)
    split = session.spawn("grid-3x3-seeded", seed)
    try:
        stepped.reset(seed)
        split.reset(seed)
        compared = 0
        while compared < 200:
            action = _grid_action(gen)
            via_step = stepped.step(action)
            split.tools_call(action)
            via_split = split.evaluate()
            assert canonical.dumps(via_step.to_wire()) == canonical.dumps(
                via_split.to_wire()
            ), f"diverged at action {compared}"
            compared += 1
            if via_step.terminated or via_step.truncated:
                seed = gen.next_below(100000)
                stepped.reset(seed)
                split.reset(seed)
        assert compared == 200
    finally:
        stepped.close()
        split.close()


@criterion("registry-end-to-end")
def test_registry_end_to_end(tmp_path):
    store = tmp_path / "store.jsonl"
    registry = Registry(store)
    registry.set_verification_hook(local_verification_hook(level="stress"))
    entry = registry.register(
        {
            "id": "treasure-grid",
            "name": "treasure-grid",
            "version": "0.1.0",
            "authors": ["cube maintainers"],
            "package": "cube",
            "benchmark_license": "Apache-2.0",
            "runtime": "docker",
            "hardware": {"ram_gb": 0.5, "gpu": False, "disk_gb": 0.1},
            "task_count": 4,
        }
    )
    assert entry.verification_state == "verified"
    assert "task-isolated" in entry.compliance

    visible = registry.query(RegistryFilter(max_ram_gb=0.25))
    assert entry.key not in {e.key for e in visible}
    assert entry.key in {e.key for e in registry.query(RegistryFilter(max_ram_gb=1.0))}

    restarted = Registry(store)
    restored = restarted.get("treasure-grid", "0.1.0")
    assert canonical.dumps(restored.to_wire()) == canonical.dumps(entry.to_wire())
    assert restarted.get_report("treasure-grid", "0.1.0")["badges"] == [
        "task-isolated",
        "reset-idempotent",
        "debug-solvable",
    ]


GOLDEN_TASK_METHODS = frozenset(
    {
        "tools/list",
        "tools/call",
        "resources/list",
        "resources/read",
        "cube/evaluate",
        "cube/reset",
        "cube/step",
        "cube/close",
        "cube/privileged_info",
    }
)
GOLDEN_BENCHMARK_METHODS = frozenset(
    {"cube/info", "cube/tasks", "cube/spawn", "cube/status", "cube/shutdown"}
)


def _probe(raw, method, params):
    try:
        return "ok", raw(method, params)
    except Exception as exc:
        return "error", getattr(exc, "code", None)


@criterion("protocol-shape")
def test_protocol_shape_golden_wire(stacks):
    assert TASK_METHODS == GOLDEN_TASK_METHODS
    assert BENCHMARK_METHODS == GOLDEN_BENCHMARK_METHODS
    assert not GOLDEN_TASK_METHODS & GOLDEN_BENCHMARK_METHODS

    session = connect(stacks["treasure-grid"]["rpc"].endpoint)

    benchmark_probes = {
        "cube/info": {},
        "cube/tasks": {},
        "cube/status": {},
        "cube/spawn": {"task_id": "grid-3x3"},
        "cube/shutdown": {"session_id": "acceptance-bogus"},
    }
    for method in sorted(GOLDEN_BENCHMARK_METHODS):
        outcome, value = _probe(session.raw, method, benchmark_probes[method])
        assert outcome == "ok" or value != -32601, f"{method} missing"
    for method in sorted(GOLDEN_TASK_METHODS | {"cube/restart", "cube/spawn_all"}):
        outcome, value = _probe(session.raw, method, {})
        assert outcome == "error" and value == -32601, f"{method} leaked"

    task = session.spawn("grid-3x3")
    try:
        reset_doc = task.raw("cube/reset", {})
        assert set(reset_doc) == {"obs", "info"}
        five = {"obs", "reward", "terminated", "truncated", "info"}
        assert set(task.raw("cube/evaluate")) == five
        step_doc = task.raw("cube/step", {"action": {"name": "look", "args": {}}})
        assert set(step_doc) == five
        call_doc = task.raw("tools/call", {"name": "look", "args": {}})
        assert set(call_doc) == {"content", "is_error"}
        task_probes = {
            "tools/list": {},
            "tools/call": {"name": "look", "args": {}},
            "resources/list": {},
            "resources/read": {"uri": "cube://task/description"},
            "cube/evaluate": {},
            "cube/reset": {},
            "cube/step": {"action": {"name": "look", "args": {}}},
            "cube/privileged_info": {},
        }
        for method in sorted(GOLDEN_TASK_METHODS - {"cube/close"}):
            outcome, value = _probe(task.raw, method, task_probes[method])
            assert outcome == "ok" or value != -32601, f"{method} missing"
        for method in sorted(GOLDEN_BENCHMARK_METHODS | {"resources/write"}):
            outcome, value = _probe(task.raw, method, {})
            assert outcome == "error" and value == -32601, f"{method} leaked"
    finally:
        assert task.raw("cube/close") is None


@criterion("parallel-determinism")
def test_parallel_determinism_1_4_8(stacks):
    impl = create_benchmark("treasure-grid")
    session = connect(stacks["treasure-grid"]["local"])

    def debug_factory(task_id):
        def make():
            return impl.make_debug_agent(task_id)

        return make

    jobs = tuple(
        RolloutJob(task_id, seed, debug_factory(task_id))
        for task_id, seed in (
            ("grid-3x3", None),
            ("grid-3x3-seeded", 1),
            ("grid-3x3-seeded", 2),
            ("grid-7x7-walls", None),
            ("grid-3x3-seeded", 3),
            ("grid-3x3", None),
            ("grid-3x3-seeded", 4),
            ("grid-7x7-walls", None),
        )
    )
    outputs = []
    for parallelism in (1, 4, 8):
        results = run_parallel(session, RolloutPlan(jobs=jobs, parallelism=parallelism))
        assert all(r.ok for r in results)
        outputs.append([r.trajectory.canonical() for r in results])
    assert outputs[0] == outputs[1] == outputs[2]
