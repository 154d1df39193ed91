"""cube-registry: serve the catalog over HTTP or search it directly."""

from __future__ import annotations

import argparse
import signal
import sys
import threading

import requests

from .. import canonical
from ..errors import CubeError
from .core import Registry, RegistryFilter, local_verification_hook
from .service import RegistryServer


def _cmd_serve(args: argparse.Namespace) -> int:
    registry = Registry(args.store)
    if args.local_verifier:
        registry.set_verification_hook(local_verification_hook())
    server = RegistryServer(registry, host=args.host, port=args.port)
    server.start()
    print(server.url, flush=True)
    stop = threading.Event()
    signal.signal(signal.SIGTERM, lambda *_: stop.set())
    signal.signal(signal.SIGINT, lambda *_: stop.set())
    stop.wait()
    server.stop()
    return 0


def _build_filter(args: argparse.Namespace) -> RegistryFilter:
    requires_gpu = None
    if args.gpu is not None:
        requires_gpu = args.gpu == "true"
    return RegistryFilter(
        runtime_any=tuple(args.runtime) if args.runtime else None,
        max_ram_gb=args.max_ram,
        requires_gpu=requires_gpu,
        badge_all=tuple(args.badge) if args.badge else None,
        text=args.text,
    )


def _cmd_search(args: argparse.Namespace) -> int:
    if not args.store and not args.url:
        print("one of --store or --url is required", file=sys.stderr)
        return 1
    if args.url:
        params: list[tuple[str, str]] = []
        for runtime in args.runtime or []:
            params.append(("runtime", runtime))
        for badge in args.badge or []:
            params.append(("badge", badge))
        if args.max_ram is not None:
            params.append(("max_ram_gb", str(args.max_ram)))
        if args.gpu is not None:
            params.append(("requires_gpu", args.gpu))
        if args.text is not None:
            params.append(("text", args.text))
        if args.include_pending:
            params.append(("include_pending", "1"))
        response = requests.get(f"{args.url}/v1/entries", params=params, timeout=30)
        doc = canonical.loads(response.content)
        if response.status_code != 200:
            print(canonical.dumps(doc), file=sys.stderr)
            return 1
        entries = doc["entries"]
    else:
        registry = Registry(args.store)
        try:
            entries = [
                e.to_wire()
                for e in registry.query(_build_filter(args), args.include_pending)
            ]
        except CubeError as exc:
            print(str(exc), file=sys.stderr)
            return 1
    for entry in entries:
        print(canonical.dumps(entry))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="cube-registry")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="serve the registry HTTP API")
    serve.add_argument("--store", required=True, help="JSONL store path")
    serve.add_argument("--port", type=int, default=0)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument(
        "--local-verifier",
        action="store_true",
        help="verify registrations against the bundled benchmarks",
    )
    serve.set_defaults(func=_cmd_serve)

    search = sub.add_parser("search", help="query entries from a store or server")
    search.add_argument("--store", help="JSONL store path")
    search.add_argument("--url", help="registry server base URL")
    search.add_argument("--runtime", action="append")
    search.add_argument("--max-ram", type=float)
    search.add_argument("--gpu", choices=["true", "false"])
    search.add_argument("--badge", action="append")
    search.add_argument("--text")
    search.add_argument("--include-pending", action="store_true")
    search.set_defaults(func=_cmd_search)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
