import re

_AC = re.compile(r"test_acceptance\.py::test_ac(\d+)_")
_titles: dict[str, str] = {}
_outcomes: dict[str, str] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = _AC.search(item.nodeid)
        if m:
            doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
            _titles[item.nodeid] = f"AC{int(m.group(1)):02d}  {doc}"


def pytest_runtest_logreport(report):
    if report.nodeid not in _titles:
        return
    if report.failed:
        _outcomes[report.nodeid] = "FAIL"
    elif report.when == "call" and report.nodeid not in _outcomes:
        _outcomes[report.nodeid] = "PASS" if report.passed else "SKIP"


def pytest_terminal_summary(terminalreporter):
    if not _titles:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, title in _titles.items():
        terminalreporter.write_line(f"{_outcomes.get(nodeid, 'NOT RUN'):<5} {title}")
