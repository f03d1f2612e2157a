import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_RESULTS = {}
_DETAILS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion check")


@pytest.fixture
def detail(request):
    """Append a measured value to this criterion's summary line."""
    mark = request.node.get_closest_marker("criterion")

    def add(text):
        if mark is not None:
            _DETAILS.setdefault(mark.args[0], []).append(text)
    return add


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, title = mark.args[0], mark.args[1]
    ok = not (rep.failed or (rep.when == "call" and rep.skipped))
    if rep.when == "call" or not ok:
        prev = _RESULTS.get(num, (title, True))
        _RESULTS[num] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_RESULTS):
        title, ok = _RESULTS[num]
        extra = "; ".join(_DETAILS.get(num, []))
        line = f"{'PASS' if ok else 'FAIL'}  criterion {num:>2}: {title}"
        terminalreporter.write_line(line + (f"  ({extra})" if extra else ""))
