"""Bundled benchmarks: two compliant references plus broken fixtures."""

from __future__ import annotations

from ..errors import NotFound
from ..kit.core import BenchmarkImpl
from .broken import (
    BrokenIsolationBenchmark,
    BrokenResetBenchmark,
    BrokenSchemaBenchmark,
    broken_fixtures,
)
from .grid import TreasureGridBenchmark
from .vault import KeyVaultBenchmark

REFERENCE_IDS = ("treasure-grid", "key-vault")
BROKEN_IDS = ("broken-reset", "broken-isolation", "broken-schema")

_FACTORIES = {
    "treasure-grid": TreasureGridBenchmark,
    "key-vault": KeyVaultBenchmark,
    "broken-reset": BrokenResetBenchmark,
    "broken-isolation": BrokenIsolationBenchmark,
    "broken-schema": BrokenSchemaBenchmark,
}


def benchmark_ids() -> tuple[str, ...]:
    return tuple(_FACTORIES)


def create_benchmark(benchmark_id: str) -> BenchmarkImpl:
    factory = _FACTORIES.get(benchmark_id)
    if factory is None:
        raise NotFound(f"unknown benchmark id: {benchmark_id!r}")
    return factory()


def treasure_grid_benchmark() -> BenchmarkImpl:
    return TreasureGridBenchmark()


def key_vault_benchmark() -> BenchmarkImpl:
    return KeyVaultBenchmark()


__all__ = [
    "BROKEN_IDS",
    "REFERENCE_IDS",
    "benchmark_ids",
    "broken_fixtures",
    "create_benchmark",
    "key_vault_benchmark",
    "treasure_grid_benchmark",
    "KeyVaultBenchmark",
    "TreasureGridBenchmark",
]
