"""Compliance and stress suite; badges derive from passed checks."""

from .suite import (
    BADGE_TABLE,
    BASIC_LEVEL,
    STRESS_LEVEL,
    CheckResult,
    ComplianceReport,
    derive_badges,
    run_suite,
)

__all__ = [
    "BADGE_TABLE",
    "BASIC_LEVEL",
    "STRESS_LEVEL",
    "CheckResult",
    "ComplianceReport",
    "derive_badges",
    "run_suite",
]
