import pytest

_CRITERIA = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py::test_criterion_" in report.nodeid:
        name = report.nodeid.split("::")[-1].replace("test_", "")
        _CRITERIA[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda s: int(s.split("_")[1])):
        terminalreporter.write_line(f"{name}: {_CRITERIA[name]}")


@pytest.fixture
def sampler():
    from asymdense.qmat import Sampler

    return Sampler(2024)
