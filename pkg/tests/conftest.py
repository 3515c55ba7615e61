import numpy as np
import pytest

# criterion text -> outcomes of every test (or parametrization) carrying it
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(text): acceptance criterion covered by the test")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None and rep.when == "call":
        _CRITERIA.setdefault(marker.args[0], []).append(rep.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for text, outcomes in _CRITERIA.items():
        tag = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        cases = f" ({len(outcomes)} cases)" if len(outcomes) > 1 else ""
        terminalreporter.write_line(f"[{tag}] {text}{cases}")
