from __future__ import annotations

import pytest

_ACCEPTANCE: list[str] = []


@pytest.fixture(scope="session")
def acceptance_line():
    """Record one pass/fail line per acceptance criterion and print it."""

    def record(number: int, title: str, ok: bool, detail: str, seconds: float) -> bool:
        line = f"[acceptance {number}] {'PASS' if ok else 'FAIL'} {title}: {detail} ({seconds:.2f} s)"
        _ACCEPTANCE.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
