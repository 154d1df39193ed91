"""Command-line surfaces: output contracts and exit codes."""

from __future__ import annotations

import json
import subprocess
import sys
import time

import pytest
import requests

from cube import canonical
from cube.conformance.cli import main as verify_main
from cube.harness.cli import main as run_main
from cube.kit.cli import main as bench_main, parse_ports

from conftest import free_ports


def test_parse_ports_ranges_and_lists():
    assert parse_ports("9000-9003") == [9000, 9001, 9002, 9003]
    assert parse_ports("9000,9005") == [9000, 9005]
    assert parse_ports("9000-9001,9005") == [9000, 9001, 9005]
    with pytest.raises(ValueError):
        parse_ports("")


def test_bench_debug_configs_prints_canonical_lines(capsys):
    assert bench_main(["debug-configs", "--benchmark", "key-vault"]) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert len(lines) == 2
    for line in lines:
        doc = canonical.loads(line)
        assert canonical.dumps(doc) == line
        assert set(doc) == {"task_id", "seed", "expected_final_reward", "max_steps"}


def test_bench_serve_bad_toolset_exit_2():
    ports = free_ports(2)
    code = bench_main(
        [
            "serve",
            "--benchmark",
            "treasure-grid",
            "--ports",
            ",".join(str(p) for p in ports),
            "--toolset",
            "nonexistent",
        ]
    )
    assert code == 2


def test_bench_serve_port_exhausted_exit_3():
    import socket

    port = free_ports(1)[0]
    blocker = socket.socket()
    blocker.bind(("127.0.0.1", port))
    blocker.listen(1)
    try:
        code = bench_main(
            ["serve", "--benchmark", "treasure-grid", "--ports", str(port)]
        )
        assert code == 3
    finally:
        blocker.close()


def test_bench_serve_subprocess_prints_endpoint_first_line():
    ports = free_ports(10)
    proc = subprocess.Popen(
        [
            sys.executable,
            "-m",
            "cube.kit.cli",
            "serve",
            "--benchmark",
            "treasure-grid",
            "--ports",
            ",".join(str(p) for p in ports),
        ],
        stdout=subprocess.PIPE,
        text=True,
    )
    try:
        endpoint = proc.stdout.readline().strip()
        assert endpoint.startswith("http://127.0.0.1:") and endpoint.endswith("/rpc")
        for _ in range(50):
            try:
                doc = requests.post(
                    endpoint,
                    data=canonical.dump_bytes(
                        {"jsonrpc": "2.0", "id": 1, "method": "cube/info", "params": {}}
                    ),
                    timeout=5,
                ).json()
                break
            except requests.RequestException:
                time.sleep(0.1)
        assert doc["result"]["name"] == "treasure-grid"
    finally:
        proc.terminate()
        assert proc.wait(timeout=10) == 0


def test_cube_run_single_task(tmp_path, capsys):
    out = tmp_path / "traj.jsonl"
    code = run_main(
        [
            "--target",
            "local:treasure-grid",
            "--task",
            "grid-3x3",
            "--agent",
            "debug",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    lines = out.read_text().strip().split("\n")
    assert len(lines) == 1
    doc = canonical.loads(lines[0])
    assert doc["final"]["reward"] == 1


def test_cube_run_jobs_file(tmp_path):
    plan_path = tmp_path / "plan.json"
    plan_path.write_text(
        json.dumps(
            {
                "jobs": [
                    {"task_id": "grid-3x3", "agent": "debug"},
                    {"task_id": "grid-3x3-seeded", "seed": 5, "agent": "debug"},
                ]
            }
        )
    )
    out = tmp_path / "traj.jsonl"
    code = run_main(
        [
            "--target",
            "local:treasure-grid",
            "--jobs-file",
            str(plan_path),
            "--parallel",
            "2",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    docs = [canonical.loads(line) for line in out.read_text().strip().split("\n")]
    assert [d["task_id"] for d in docs] == ["grid-3x3", "grid-3x3-seeded"]


def test_cube_run_unknown_task_exit_1(tmp_path):
    code = run_main(
        [
            "--target",
            "local:treasure-grid",
            "--task",
            "grid-9x9",
            "--out",
            str(tmp_path / "t.jsonl"),
        ]
    )
    assert code == 1


def test_cube_verify_exit_codes(tmp_path):
    report_path = tmp_path / "report.json"
    assert (
        verify_main(
            [
                "--target",
                "local:key-vault",
                "--level",
                "stress",
                "--report",
                str(report_path),
            ]
        )
        == 0
    )
    report = canonical.loads(report_path.read_text())
    assert report["badges"] == ["task-isolated", "reset-idempotent", "debug-solvable"]

    assert verify_main(["--target", "local:broken-schema", "--level", "basic"]) == 1

    dead = free_ports(1)[0]
    assert verify_main(["--target", f"http://127.0.0.1:{dead}/rpc"]) == 4


def test_cube_registry_serve_and_search(tmp_path):
    store = tmp_path / "store.jsonl"
    proc = subprocess.Popen(
        [
            sys.executable,
            "-m",
            "cube.registry.cli",
            "serve",
            "--store",
            str(store),
            "--local-verifier",
        ],
        stdout=subprocess.PIPE,
        text=True,
    )
    try:
        url = proc.stdout.readline().strip()
        doc = {
            "id": "key-vault",
            "name": "key-vault",
            "version": "0.1.0",
            "authors": ["cube maintainers"],
            "package": "cube",
            "benchmark_license": "Apache-2.0",
            "runtime": "docker",
            "hardware": {"ram_gb": 0.5, "gpu": False, "disk_gb": 0.1},
            "task_count": 2,
        }
        response = requests.post(
            f"{url}/v1/entries", data=canonical.dump_bytes(doc), timeout=60
        )
        assert canonical.loads(response.content)["verification_state"] == "verified"
    finally:
        proc.terminate()
        proc.wait(timeout=10)

    result = subprocess.run(
        [
            sys.executable,
            "-m",
            "cube.registry.cli",
            "search",
            "--store",
            str(store),
            "--runtime",
            "docker",
            "--max-ram",
            "8",
        ],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert result.returncode == 0
    entries = [canonical.loads(line) for line in result.stdout.strip().split("\n")]
    assert [e["id"] for e in entries] == ["key-vault"]
