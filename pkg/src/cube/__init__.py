"""CUBE: wrap an agentic benchmark once, consume it from any harness.

Four layers: task (tools/resources + evaluate/reset/step), benchmark
(discovery, spawn, status, shutdown), package (start hook, debug tasks,
conformance), and registry (metadata catalog). Every layer is reachable
in-process and over JSON-RPC with identical methods.
"""

from . import canonical, errors, protocol, rng

__all__ = ["canonical", "errors", "protocol", "rng"]

__version__ = "0.1.0"
