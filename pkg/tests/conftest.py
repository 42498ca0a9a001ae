ACCEPTANCE = {}


def record(number, passed, detail):
    """Store one acceptance verdict; ``passed`` is True, False or None (informational)."""
    ACCEPTANCE[number] = (passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        tag = "INFO" if passed is None else ("PASS" if passed else "FAIL")
        terminalreporter.write_line(f"criterion {number}: {tag}  {detail}")
