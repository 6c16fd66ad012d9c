"""Shared pytest plumbing: the acceptance summary table."""

_CRITERIA: "list[tuple[int, str, bool, float, str]]" = []


def record_criterion(number, label, ok, elapsed, detail=""):
    """Collect one acceptance line for the end-of-run summary."""
    _CRITERIA.append((int(number), str(label), bool(ok), float(elapsed),
                      str(detail)))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number, label, ok, elapsed, detail in sorted(_CRITERIA):
        status = "PASS" if ok else "FAIL"
        line = f"criterion {number:2d}: {status} {elapsed:8.2f} s  {label}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
