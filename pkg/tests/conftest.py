from __future__ import annotations

import pytest

_VERDICTS: dict[int, tuple[str, str]] = {}


@pytest.fixture
def verdict():
    """``verdict(k, ok, detail)`` records one acceptance line and echoes it."""

    def record(k: int, ok: bool, detail: str = "") -> bool:
        line = ("PASS" if ok else "FAIL", detail)
        # a criterion split over several tests fails if any part fails
        if _VERDICTS.get(k, ("PASS", ""))[0] == "FAIL":
            return ok
        _VERDICTS[k] = line
        print(f"criterion {k}: {line[0]} {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_VERDICTS):
        status, detail = _VERDICTS[k]
        terminalreporter.write_line(f"criterion {k:2d}: {status}  {detail}")
