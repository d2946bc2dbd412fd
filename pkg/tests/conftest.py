from acceptance_report import REPORT


def pytest_terminal_summary(terminalreporter):
    lines = REPORT.lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
