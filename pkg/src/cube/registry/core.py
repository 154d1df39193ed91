"""Metadata catalog: registration, verification gating, discovery, persistence.

The registry stores pointers and metadata, never benchmark code or data.
Entries enter as pending, pass through the verification hook, and only
verified entries are discoverable by default. Persistence is a single
append-safe file of canonical JSON lines, compacted at startup.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable

from .. import canonical
from ..conformance.suite import ComplianceReport
from ..errors import DuplicateVersion, NotFound, ValidationFailed

RUNTIMES = ("docker", "apptainer", "vm", "docker-root", "docker-in-docker", "live")

# Runtimes whose declared deployment model does not require root privileges;
# the verification hook grants no-docker-root to these on a passing report.
_ROOTLESS_RUNTIMES = ("docker", "apptainer", "vm", "live")

STATE_PENDING = "pending"
STATE_VERIFIED = "verified"
STATE_FAILED = "failed"

_SEMVER_RE = re.compile(r"^\d+\.\d+\.\d+$")

VerificationHook = Callable[["RegistryEntry"], ComplianceReport]


@dataclass(frozen=True)
class Hardware:
    ram_gb: float
    gpu: bool
    disk_gb: float

    def to_wire(self) -> dict[str, Any]:
        return {"ram_gb": self.ram_gb, "gpu": self.gpu, "disk_gb": self.disk_gb}

    @staticmethod
    def from_wire(doc: dict[str, Any]) -> "Hardware":
        return Hardware(ram_gb=doc["ram_gb"], gpu=doc["gpu"], disk_gb=doc["disk_gb"])


@dataclass(frozen=True)
class RegistryEntry:
    id: str
    name: str
    version: str
    authors: tuple[str, ...]
    package: str
    benchmark_license: str
    runtime: str
    hardware: Hardware
    task_count: int
    paper: str | None = None
    package_license: str | None = None
    content_notice: str | None = None
    compliance: tuple[str, ...] = ()
    verification_state: str = STATE_PENDING
    verification_detail: str | None = None

    @property
    def key(self) -> tuple[str, str]:
        return (self.id, self.version)

    def to_wire(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "id": self.id,
            "name": self.name,
            "version": self.version,
            "authors": list(self.authors),
            "package": self.package,
            "benchmark_license": self.benchmark_license,
            "runtime": self.runtime,
            "hardware": self.hardware.to_wire(),
            "task_count": self.task_count,
            "compliance": list(self.compliance),
            "verification_state": self.verification_state,
        }
        if self.paper is not None:
            doc["paper"] = self.paper
        if self.package_license is not None:
            doc["package_license"] = self.package_license
        if self.content_notice is not None:
            doc["content_notice"] = self.content_notice
        if self.verification_detail is not None:
            doc["verification_detail"] = self.verification_detail
        return doc

    @staticmethod
    def from_wire(doc: dict[str, Any]) -> "RegistryEntry":
        return RegistryEntry(
            id=doc["id"],
            name=doc["name"],
            version=doc["version"],
            authors=tuple(doc["authors"]),
            package=doc["package"],
            benchmark_license=doc["benchmark_license"],
            runtime=doc["runtime"],
            hardware=Hardware.from_wire(doc["hardware"]),
            task_count=doc["task_count"],
            paper=doc.get("paper"),
            package_license=doc.get("package_license"),
            content_notice=doc.get("content_notice"),
            compliance=tuple(doc.get("compliance", ())),
            verification_state=doc.get("verification_state", STATE_PENDING),
            verification_detail=doc.get("verification_detail"),
        )


@dataclass(frozen=True)
class RegistryFilter:
    runtime_any: tuple[str, ...] | None = None
    max_ram_gb: float | None = None
    requires_gpu: bool | None = None
    badge_all: tuple[str, ...] | None = None
    text: str | None = None

    def matches(self, entry: RegistryEntry) -> bool:
        if self.runtime_any is not None and entry.runtime not in self.runtime_any:
            return False
        if self.max_ram_gb is not None and entry.hardware.ram_gb > self.max_ram_gb:
            return False
        if self.requires_gpu is not None and entry.hardware.gpu != self.requires_gpu:
            return False
        if self.badge_all is not None and not set(self.badge_all) <= set(entry.compliance):
            return False
        if self.text is not None:
            needle = self.text.lower()
            if needle not in entry.name.lower() and needle not in entry.id.lower():
                return False
        return True


def semver_key(version: str) -> tuple[int, int, int]:
    major, minor, patch = version.split(".")
    return (int(major), int(minor), int(patch))


_REGISTRANT_FIELDS = {
    "id",
    "name",
    "version",
    "authors",
    "package",
    "benchmark_license",
    "runtime",
    "hardware",
    "task_count",
    "paper",
    "package_license",
    "content_notice",
}


def validate_registration(doc: dict[str, Any]) -> RegistryEntry:
    """Check a registration document field by field; first offense wins."""
    if not isinstance(doc, dict):
        raise ValidationFailed("registration must be an object")
    for owned in ("compliance", "verification_state", "verification_detail"):
        if owned in doc:
            raise ValidationFailed(f"{owned}: writable only by the verification hook")
    unknown = set(doc) - _REGISTRANT_FIELDS
    if unknown:
        raise ValidationFailed(f"{sorted(unknown)[0]}: unknown field")

    def need_str(key: str) -> str:
        value = doc.get(key)
        if not isinstance(value, str) or not value:
            raise ValidationFailed(f"{key}: must be a non-empty string")
        return value

    entry_id = need_str("id")
    name = need_str("name")
    version = need_str("version")
    if not _SEMVER_RE.match(version):
        raise ValidationFailed("version: must be a semantic version like 1.2.0")
    authors_raw = doc.get("authors")
    if not isinstance(authors_raw, list) or not all(
        isinstance(a, str) and a for a in authors_raw
    ):
        raise ValidationFailed("authors: must be a list of non-empty strings")
    package = need_str("package")
    benchmark_license = need_str("benchmark_license")
    runtime = need_str("runtime")
    if runtime not in RUNTIMES:
        raise ValidationFailed(f"runtime: must be one of {list(RUNTIMES)}")
    hardware_raw = doc.get("hardware")
    if not isinstance(hardware_raw, dict):
        raise ValidationFailed("hardware: must be an object")
    for numeric in ("ram_gb", "disk_gb"):
        value = hardware_raw.get(numeric)
        if not isinstance(value, (int, float)) or isinstance(value, bool) or value <= 0:
            raise ValidationFailed(f"hardware.{numeric}: must be a positive number")
    if not isinstance(hardware_raw.get("gpu"), bool):
        raise ValidationFailed("hardware.gpu: must be a boolean")
    task_count = doc.get("task_count")
    if not isinstance(task_count, int) or isinstance(task_count, bool) or task_count < 0:
        raise ValidationFailed("task_count: must be a non-negative integer")
    for optional in ("paper", "package_license", "content_notice"):
        value = doc.get(optional)
        if value is not None and (not isinstance(value, str) or not value):
            raise ValidationFailed(f"{optional}: must be a non-empty string when present")

    return RegistryEntry(
        id=entry_id,
        name=name,
        version=version,
        authors=tuple(authors_raw),
        package=package,
        benchmark_license=benchmark_license,
        runtime=runtime,
        hardware=Hardware(
            ram_gb=hardware_raw["ram_gb"],
            gpu=hardware_raw["gpu"],
            disk_gb=hardware_raw["disk_gb"],
        ),
        task_count=task_count,
        paper=doc.get("paper"),
        package_license=doc.get("package_license"),
        content_notice=doc.get("content_notice"),
    )


class Registry:
    """Thread-safe catalog with JSONL persistence and a pluggable verifier."""

    def __init__(self, store_path: str | Path | None = None):
        self._store_path = Path(store_path) if store_path is not None else None
        self._entries: dict[tuple[str, str], RegistryEntry] = {}
        self._reports: dict[tuple[str, str], dict[str, Any]] = {}
        self._lock = threading.Lock()
        self._hook: VerificationHook | None = None
        if self._store_path is not None and self._store_path.exists():
            self._load_and_compact()

    # -- persistence ------------------------------------------------------------

    def _load_and_compact(self) -> None:
        assert self._store_path is not None
        raw_lines = 0
        with open(self._store_path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                raw_lines += 1
                record = canonical.loads(line)
                if record.get("record") == "entry":
                    entry = RegistryEntry.from_wire(record["entry"])
                    self._entries[entry.key] = entry
                elif record.get("record") == "report":
                    self._reports[(record["id"], record["version"])] = record["report"]
        live = len(self._entries) + len(self._reports)
        if raw_lines > live:
            self._rewrite()

    def _rewrite(self) -> None:
        assert self._store_path is not None
        tmp = self._store_path.with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            for entry in sorted(self._entries.values(), key=lambda e: e.key):
                fh.write(canonical.dumps({"record": "entry", "entry": entry.to_wire()}))
                fh.write("\n")
            for (entry_id, version), report in sorted(self._reports.items()):
                fh.write(
                    canonical.dumps(
                        {
                            "record": "report",
                            "id": entry_id,
                            "version": version,
                            "report": report,
                        }
                    )
                )
                fh.write("\n")
        tmp.replace(self._store_path)

    def _append(self, record: dict[str, Any]) -> None:
        if self._store_path is None:
            return
        with open(self._store_path, "a", encoding="utf-8", newline="\n") as fh:
            fh.write(canonical.dumps(record))
            fh.write("\n")
            fh.flush()

    def _persist_entry(self, entry: RegistryEntry) -> None:
        self._append({"record": "entry", "entry": entry.to_wire()})

    def _persist_report(self, key: tuple[str, str], report: dict[str, Any]) -> None:
        self._append(
            {"record": "report", "id": key[0], "version": key[1], "report": report}
        )

    # -- verification -------------------------------------------------------------

    def set_verification_hook(self, hook: VerificationHook | None) -> None:
        self._hook = hook

    def _verify(self, entry: RegistryEntry) -> RegistryEntry:
        if self._hook is None:
            return replace(
                entry,
                verification_state=STATE_FAILED,
                verification_detail="no verifier configured",
            )
        try:
            report = self._hook(entry)
        except Exception as exc:
            return replace(
                entry,
                verification_state=STATE_FAILED,
                verification_detail=f"verification hook raised: {exc}",
            )
        with self._lock:
            self._reports[entry.key] = report.to_wire()
            self._persist_report(entry.key, report.to_wire())
        if report.all_passed:
            badges = list(report.badges)
            if entry.runtime in _ROOTLESS_RUNTIMES and "no-docker-root" not in badges:
                badges.append("no-docker-root")
            return replace(
                entry,
                compliance=tuple(badges),
                verification_state=STATE_VERIFIED,
                verification_detail=None,
            )
        failed = [c.check_id for c in report.checks if not c.passed]
        return replace(
            entry,
            verification_state=STATE_FAILED,
            verification_detail=f"failed checks: {', '.join(failed)}",
        )

    # -- operations ---------------------------------------------------------------

    def register(self, doc: dict[str, Any]) -> RegistryEntry:
        entry = validate_registration(doc)
        with self._lock:
            if entry.key in self._entries:
                raise DuplicateVersion(
                    f"{entry.id} {entry.version} is already registered"
                )
            self._entries[entry.key] = entry
            self._persist_entry(entry)
        final = self._verify(entry)
        with self._lock:
            self._entries[entry.key] = final
            self._persist_entry(final)
        return final

    def query(
        self,
        registry_filter: RegistryFilter | None = None,
        include_pending: bool = False,
    ) -> list[RegistryEntry]:
        f = registry_filter or RegistryFilter()
        with self._lock:
            entries = list(self._entries.values())
        if not include_pending:
            entries = [e for e in entries if e.verification_state == STATE_VERIFIED]
        selected = [e for e in entries if f.matches(e)]
        selected.sort(key=lambda e: (e.id, tuple(-p for p in semver_key(e.version))))
        return selected

    def get(
        self, entry_id: str, version: str | None = None, include_pending: bool = False
    ) -> RegistryEntry:
        with self._lock:
            entries = [e for e in self._entries.values() if e.id == entry_id]
        if not include_pending:
            entries = [e for e in entries if e.verification_state == STATE_VERIFIED]
        if version is not None:
            for entry in entries:
                if entry.version == version:
                    return entry
            raise NotFound(f"no visible entry {entry_id!r} version {version!r}")
        if not entries:
            raise NotFound(f"no visible entry {entry_id!r}")
        return max(entries, key=lambda e: semver_key(e.version))

    def get_report(self, entry_id: str, version: str) -> dict[str, Any]:
        with self._lock:
            report = self._reports.get((entry_id, version))
        if report is None:
            raise NotFound(f"no stored report for {entry_id!r} {version!r}")
        return report


def local_verification_hook(level: str = "stress") -> VerificationHook:
    """Verifier that serves bundled benchmarks in-process and runs the suite.

    Stands in for a hosted verification job: anything not bundled here
    fails verification with an explanatory detail.
    """

    def hook(entry: RegistryEntry) -> ComplianceReport:
        from ..benchmarks import create_benchmark
        from ..conformance.suite import run_suite
        from ..kit.runtime import start

        impl = create_benchmark(entry.id)
        handle = start(impl, mode="local")
        try:
            return run_suite(handle, level=level)
        finally:
            handle.stop()

    return hook
