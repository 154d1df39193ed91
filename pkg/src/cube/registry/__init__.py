"""Centralized metadata catalog; indexes benchmarks, hosts nothing."""

from .core import (
    RUNTIMES,
    Hardware,
    Registry,
    RegistryEntry,
    RegistryFilter,
    local_verification_hook,
    semver_key,
    validate_registration,
)
from .service import RegistryServer, filter_from_query

__all__ = [
    "Hardware",
    "RUNTIMES",
    "Registry",
    "RegistryEntry",
    "RegistryFilter",
    "RegistryServer",
    "filter_from_query",
    "local_verification_hook",
    "semver_key",
    "validate_registration",
]
