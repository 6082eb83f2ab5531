from __future__ import annotations

# filled by test_acceptance.py: (criterion number, passed, seconds, detail)
ACCEPTANCE: list[tuple[int, bool, float, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, secs, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'} ({secs:.2f} s) {detail}")
