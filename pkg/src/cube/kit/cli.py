"""cube-bench: serve a bundled benchmark over RPC, dump its debug configs."""

from __future__ import annotations

import argparse
import signal
import sys
import threading

from .. import canonical
from ..errors import NotFound, PortExhausted, ToolConfigInvalid
from .core import DEFAULT_MAX_SESSIONS, ToolConfig
from .runtime import start

EXIT_OK = 0
EXIT_TOOL_CONFIG = 2
EXIT_PORT_EXHAUSTED = 3


def parse_ports(spec: str) -> list[int]:
    """Accepts 'lo-hi' ranges and comma-separated port lists."""
    ports: list[int] = []
    for chunk in spec.split(","):
        chunk = chunk.strip()
        if "-" in chunk:
            lo, hi = chunk.split("-", 1)
            ports.extend(range(int(lo), int(hi) + 1))
        elif chunk:
            ports.append(int(chunk))
    if not ports:
        raise ValueError(f"no ports in {spec!r}")
    return ports


def _cmd_serve(args: argparse.Namespace) -> int:
    from ..benchmarks import create_benchmark

    try:
        impl = create_benchmark(args.benchmark)
    except NotFound as exc:
        print(str(exc), file=sys.stderr)
        return 1
    try:
        handle = start(
            impl,
            available_ports=parse_ports(args.ports),
            tool_config=ToolConfig(toolset=args.toolset),
            mode="rpc",
            max_sessions=args.max_sessions,
            host=args.host,
        )
    except ToolConfigInvalid as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_TOOL_CONFIG
    except PortExhausted as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PORT_EXHAUSTED

    print(handle.endpoint, flush=True)
    stop = threading.Event()
    signal.signal(signal.SIGTERM, lambda *_: stop.set())
    signal.signal(signal.SIGINT, lambda *_: stop.set())
    stop.wait()
    handle.stop()
    return EXIT_OK


def _cmd_debug_configs(args: argparse.Namespace) -> int:
    from ..benchmarks import create_benchmark

    try:
        impl = create_benchmark(args.benchmark)
    except NotFound as exc:
        print(str(exc), file=sys.stderr)
        return 1
    for cfg in impl.get_debug_task_configs():
        print(canonical.dumps(cfg.to_wire()))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="cube-bench")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="serve a benchmark endpoint over RPC")
    serve.add_argument("--benchmark", required=True)
    serve.add_argument("--ports", required=True, help="port range lo-hi")
    serve.add_argument("--toolset", default="standard")
    serve.add_argument("--max-sessions", type=int, default=DEFAULT_MAX_SESSIONS)
    serve.add_argument("--host", default="127.0.0.1")
    serve.set_defaults(func=_cmd_serve)

    debug = sub.add_parser("debug-configs", help="print debug task configs as JSON lines")
    debug.add_argument("--benchmark", required=True)
    debug.set_defaults(func=_cmd_debug_configs)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
