"""Shared helpers and the acceptance summary printed after the run."""

from __future__ import annotations

from fractions import Fraction

import pytest

from lop.multidist import MultiDist
from lop.parser import parse
from lop.prelude import builtin

PRELUDE = builtin()

# Filled by the acceptance tests: (criterion label, passed, detail).
ACCEPTANCE: list[tuple[str, bool, str]] = []


def term(text: str, calculus: str = "cbv", **kw):
    return parse(text, calculus, prelude=PRELUDE, **kw)


def md(*entries, calculus: str = "cbv") -> MultiDist:
    """``md(("1/2", "x"), ("1/2", "y"))``."""
    return MultiDist(tuple((Fraction(p), term(t, calculus)) for p, t in entries))


@pytest.fixture
def record_acceptance():
    def record(label: str, passed: bool, detail: str = "") -> None:
        ACCEPTANCE.append((label, passed, detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in ACCEPTANCE:
        line = f"{'PASS' if passed else 'FAIL'}  {label}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
