"""Conformance suite soundness on compliant and broken targets."""

from __future__ import annotations

import pytest

from cube import canonical
from cube.benchmarks import broken_fixtures, create_benchmark
from cube.conformance import (
    BASIC_LEVEL,
    STRESS_LEVEL,
    CheckResult,
    ComplianceReport,
    derive_badges,
    run_suite,
)
from cube.errors import TargetUnreachable
from cube.kit import start

from conftest import free_ports

STRESS_CHECK_IDS = [
    "protocol-shape",
    "debug-solve",
    "reset-idempotent",
    "task-isolated",
    "resource-bounded",
    "toolconfig-swap",
]


def passed_vector(report: ComplianceReport) -> list[tuple[str, bool]]:
    return [(c.check_id, c.passed) for c in report.checks]


@pytest.mark.parametrize("benchmark_id", ["treasure-grid", "key-vault"])
def test_reference_benchmarks_pass_stress(benchmark_id):
    handle = start(create_benchmark(benchmark_id), mode="local")
    try:
        report = run_suite(handle, level=STRESS_LEVEL)
    finally:
        handle.stop()
    assert report.all_passed, passed_vector(report)
    assert [c.check_id for c in report.checks] == STRESS_CHECK_IDS
    assert report.badges == ["task-isolated", "reset-idempotent", "debug-solvable"]
    assert report.benchmark_id == benchmark_id


def test_basic_level_runs_three_checks():
    handle = start(create_benchmark("treasure-grid"), mode="local")
    try:
        report = run_suite(handle, level=BASIC_LEVEL)
    finally:
        handle.stop()
    assert [c.check_id for c in report.checks] == STRESS_CHECK_IDS[:3]
    assert report.all_passed
    # task-isolated did not run, so its badge cannot appear.
    assert report.badges == ["reset-idempotent", "debug-solvable"]


def test_suite_against_rpc_url():
    handle = start(
        create_benchmark("treasure-grid"), available_ports=free_ports(24), mode="rpc"
    )
    try:
        report = run_suite(handle.endpoint, level=STRESS_LEVEL)
    finally:
        handle.stop()
    assert report.all_passed, passed_vector(report)
    swap = report.check("toolconfig-swap")
    assert "skipped" in swap.detail


@pytest.mark.parametrize(
    "benchmark_id,target_check",
    [
        ("broken-reset", "reset-idempotent"),
        ("broken-isolation", "task-isolated"),
        ("broken-schema", "protocol-shape"),
    ],
)
def test_broken_fixture_fails_exactly_its_check(benchmark_id, target_check):
    handle = start(create_benchmark(benchmark_id), mode="local")
    try:
        report = run_suite(handle, level=STRESS_LEVEL)
    finally:
        handle.stop()
    failed = [c.check_id for c in report.checks if not c.passed]
    assert failed == [target_check], passed_vector(report)


def test_broken_fixture_factory_returns_all_three():
    assert [impl.benchmark_id for impl in broken_fixtures()] == [
        "broken-reset",
        "broken-isolation",
        "broken-schema",
    ]


def test_suite_is_deterministic_pass_fail():
    handle = start(create_benchmark("key-vault"), mode="local")
    try:
        first = run_suite(handle, level=STRESS_LEVEL)
        second = run_suite(handle, level=STRESS_LEVEL)
    finally:
        handle.stop()
    assert passed_vector(first) == passed_vector(second)


def test_unreachable_target():
    port = free_ports(1)[0]
    with pytest.raises(TargetUnreachable):
        run_suite(f"http://127.0.0.1:{port}/rpc", level=BASIC_LEVEL)


def test_suite_never_aborts_early():
    handle = start(create_benchmark("broken-schema"), mode="local")
    try:
        report = run_suite(handle, level=STRESS_LEVEL)
    finally:
        handle.stop()
    # The first check fails yet all six are present.
    assert len(report.checks) == 6


def test_report_canonical_roundtrip():
    handle = start(create_benchmark("treasure-grid"), mode="local")
    try:
        report = run_suite(handle, level=BASIC_LEVEL)
    finally:
        handle.stop()
    doc = canonical.loads(report.canonical())
    assert ComplianceReport.from_wire(doc).canonical() == report.canonical()


# -- badge derivation ---------------------------------------------------------------


def check(check_id: str, passed: bool, level: str = "basic") -> CheckResult:
    return CheckResult(check_id=check_id, level=level, passed=passed, detail="x")


def test_all_pass_gives_three_badges():
    checks = [check(c, True) for c in STRESS_CHECK_IDS]
    assert derive_badges(checks) == ["task-isolated", "reset-idempotent", "debug-solvable"]


def test_empty_checks_give_no_badges():
    assert derive_badges([]) == []


def test_failing_isolation_removes_only_that_badge():
    checks = [check(c, c != "task-isolated") for c in STRESS_CHECK_IDS]
    assert derive_badges(checks) == ["reset-idempotent", "debug-solvable"]


def test_badges_monotone_under_added_passes():
    base = [check("debug-solve", True)]
    more = base + [check("task-isolated", True)]
    assert set(derive_badges(base)) <= set(derive_badges(more))
