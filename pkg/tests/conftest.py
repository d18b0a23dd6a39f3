from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")

# acceptance outcomes, filled in by test_acceptance.py
CRITERIA: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[n])
