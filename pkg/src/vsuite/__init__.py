"""
Verification suite: прогон случаев с эталонным выводом.
"""

from .driver import discover, first_difference, load_case, render_report, run_case, run_suite
from .exceptions import SuiteConfigurationError, SuiteError, SuiteIOError
from .models import CaseManifest, CaseStatus, SuiteReport, Target, TestCase, TestOutcome

__all__ = [
    "discover",
    "first_difference",
    "load_case",
    "render_report",
    "run_case",
    "run_suite",
    "SuiteConfigurationError",
    "SuiteError",
    "SuiteIOError",
    "CaseManifest",
    "CaseStatus",
    "SuiteReport",
    "Target",
    "TestCase",
    "TestOutcome",
]
