import pytest

from contrans import kernels

_acceptance: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    """Run a test once per available evaluation kernel."""
    previous = kernels.BACKEND
    kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(previous)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    if rep.when == "setup" and rep.passed:
        return
    number, title = mark.args
    entry = _acceptance.setdefault(number, {"title": title, "cases": 0, "failed": 0, "skipped": 0, "detail": []})
    entry["cases"] += 1
    entry["failed"] += rep.failed
    entry["skipped"] += rep.skipped
    entry["detail"] += [f"{k}: {v}" for k, v in item.user_properties]


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        e = _acceptance[number]
        status = "FAIL" if e["failed"] else ("SKIP" if e["skipped"] == e["cases"] else "PASS")
        passed = e["cases"] - e["failed"] - e["skipped"]
        terminalreporter.write_line(f"[{status}] {number:2d}. {e['title']}  {passed}/{e['cases']} cases")
        for d in e["detail"]:
            terminalreporter.write_line(f"            {d}")
