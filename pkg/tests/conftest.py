from __future__ import annotations

import socket

import pytest

from cube.benchmarks import create_benchmark
from cube.kit import ToolConfig, start


def free_ports(count: int) -> list[int]:
    """Reserve currently-free TCP ports by briefly binding them."""
    sockets = []
    for _ in range(count):
        sock = socket.socket()
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        sock.bind(("127.0.0.1", 0))
        sockets.append(sock)
    ports = [sock.getsockname()[1] for sock in sockets]
    for sock in sockets:
        sock.close()
    return ports


@pytest.fixture
def port_block() -> list[int]:
    return free_ports(24)


@pytest.fixture
def grid_local():
    handle = start(create_benchmark("treasure-grid"), mode="local")
    yield handle
    handle.stop()


@pytest.fixture
def grid_rpc():
    handle = start(
        create_benchmark("treasure-grid"),
        available_ports=free_ports(24),
        mode="rpc",
    )
    yield handle
    handle.stop()


@pytest.fixture
def vault_local():
    handle = start(create_benchmark("key-vault"), mode="local")
    yield handle
    handle.stop()


@pytest.fixture
def vault_rpc():
    handle = start(
        create_benchmark("key-vault"),
        available_ports=free_ports(24),
        mode="rpc",
    )
    yield handle
    handle.stop()


@pytest.fixture
def compact_grid_local():
    handle = start(
        create_benchmark("treasure-grid"),
        mode="local",
        tool_config=ToolConfig(toolset="compact"),
    )
    yield handle
    handle.stop()
