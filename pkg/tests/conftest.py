import pytest

from uwbwinding.core import ImageGrid, PulseSpec, SamplingSpec, ScanGeometry

_criteria = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion covered by the test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for mark in report.user_properties:
        if mark[0] == "criterion":
            _criteria.append((mark[1], report.outcome, report.nodeid.split("::")[-1]))


@pytest.fixture(autouse=True)
def _record_criterion(request):
    mark = request.node.get_closest_marker("criterion")
    if mark is not None:
        request.node.user_properties.append(("criterion", f"{mark.args[0]}. {mark.args[1]}"))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for text, outcome, name in _criteria:
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{verdict}] {text}  ({name})")


@pytest.fixture(scope="session")
def pulse():
    return PulseSpec(4.7e9, 3.2e9, 1.0, 0.6e-9)


@pytest.fixture(scope="session")
def sampling():
    return SamplingSpec(20e-12, 600, 0.0)


@pytest.fixture(scope="session")
def geometry():
    return ScanGeometry.uniform(0.0, 20.0, 60)


@pytest.fixture(scope="session")
def grid():
    return ImageGrid(-5.0, 1185.0, 195.0, 805.0, 10.0)
