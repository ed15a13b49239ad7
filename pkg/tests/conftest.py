import pytest

# Criterion results are registered here and echoed after the run so the
# acceptance suite yields one PASS/FAIL line per criterion.
ACCEPTANCE_RESULTS: dict[int, tuple[str, bool, str]] = {}


def record_criterion(number: int, name: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE_RESULTS[number] = (name, passed, detail)


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory) -> str:
    """One success-curve cache shared by the whole test session."""
    return str(tmp_path_factory.mktemp("curve-cache"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        name, passed, detail = ACCEPTANCE_RESULTS[number]
        verdict = "PASS" if passed else "FAIL"
        line = f"criterion {number} ({name}): {verdict}"
        if detail:
            line += f" — {detail}"
        terminalreporter.write_line(line)
