import numpy as np
import pytest

_acceptance = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    info = dict(report.user_properties).get("criterion")
    if info is None:
        return
    number, name = info
    detail = dict(report.user_properties).get("detail", "")
    _acceptance[number] = (name, report.passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        name, passed, detail = _acceptance[number]
        verdict = "PASS" if passed else "FAIL"
        line = f"criterion {number} {name}: {verdict}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Tag an acceptance test and attach a one-line measurement summary."""

    def tag(number, name):
        request.node.user_properties.append(("criterion", (number, name)))

        def detail(text):
            request.node.user_properties.append(("detail", text))
            print(f"criterion {number} {name}: {text}")

        return detail

    return tag


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
