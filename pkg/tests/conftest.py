import pytest

from vrmtunnel.harness import canonical_config

_VERDICTS = {}


@pytest.fixture(scope="session")
def exp_config():
    return canonical_config("exponential")


@pytest.fixture(scope="session")
def acceptance_verdicts():
    return _VERDICTS


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        terminalreporter.write_line(_VERDICTS[number].line())
