CRITERIA = {
    1: "lambda.K = 0 with chain n(2g-2), -2n(2g-2), n(2g-2)",
    2: "lambda^2 = (n^2(2g-2) - mu2)/2",
    3: "genus closed form and admissibility bound",
    4: "defining pullback equation, even and odd n",
    5: "canonical pullback two ways, g = 2, 3, 4",
    6: "enumeration counts against grid oracle",
    7: "moduli dimension (n^2-1)(g-1)-1",
    8: "transition cocycle, rank2 and affine",
    9: "randomized lattice properties",
}

_outcomes: dict[int, list[bool]] = {}
_criterion_of: dict[str, int] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            _criterion_of[item.nodeid] = mark.args[0]


def pytest_runtest_logreport(report):
    k = _criterion_of.get(report.nodeid)
    if k is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _outcomes.setdefault(k, []).append(report.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        results = _outcomes.get(k)
        if results is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {k}: {status:7s} {CRITERIA[k]}")
