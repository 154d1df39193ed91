"""cube-verify: run the compliance suite and write the report."""

from __future__ import annotations

import argparse
import sys

from ..errors import NotFound, TargetUnreachable
from .suite import run_suite

EXIT_ALL_PASSED = 0
EXIT_SOME_FAILED = 1
EXIT_UNREACHABLE = 4


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="cube-verify")
    parser.add_argument("--target", required=True, help="endpoint URL or local:<benchmark-id>")
    parser.add_argument("--level", default="basic", choices=["basic", "stress"])
    parser.add_argument("--report", help="path for the canonical report JSON")
    args = parser.parse_args(argv)

    handle = None
    target: object = args.target
    if args.target.startswith("local:"):
        from ..benchmarks import create_benchmark
        from ..kit.runtime import start

        try:
            handle = start(create_benchmark(args.target[len("local:") :]), mode="local")
        except NotFound as exc:
            print(str(exc), file=sys.stderr)
            return EXIT_UNREACHABLE
        target = handle

    try:
        report = run_suite(target, level=args.level)
    except TargetUnreachable as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_UNREACHABLE
    finally:
        if handle is not None:
            handle.stop()

    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {check.check_id} [{check.level}] {check.detail}")
    print(f"badges: {', '.join(report.badges) if report.badges else '(none)'}")

    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report.canonical())
            fh.write("\n")

    return EXIT_ALL_PASSED if report.all_passed else EXIT_SOME_FAILED


if __name__ == "__main__":
    sys.exit(main())
