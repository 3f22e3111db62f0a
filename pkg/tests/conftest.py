from hypothesis import HealthCheck, settings

settings.register_profile("repo", suppress_health_check=[HealthCheck.too_slow], derandomize=True)
settings.load_profile("repo")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
