import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k, title): numbered acceptance check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    k, title = mark.args
    detail = dict(item.user_properties).get("detail", "")
    prev = _RESULTS.get(k)
    ok = rep.passed and (prev is None or prev[0])
    _RESULTS[k] = (ok, title, detail if rep.passed else rep.when + " failed")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_RESULTS):
        ok, title, detail = _RESULTS[k]
        line = f"{'PASS' if ok else 'FAIL'} criterion {k:2d}: {title}"
        terminalreporter.write_line(line + (f" ({detail})" if detail else ""))
