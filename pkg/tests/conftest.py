"""Per-criterion PASS/FAIL summary for the acceptance suite."""

from collections import OrderedDict

CRITERIA = OrderedDict(
    [
        (1, "backward-difference identity"),
        (2, "FFT scheme equals explicit weight convolution"),
        (3, "Euler mesh interval count"),
        (4, "Bernstein ellipse containment"),
        (5, "Euler convergence order"),
        (6, "parsimonious fidelity"),
        (7, "evaluation-count scaling"),
        (8, "BDF2 order and evaluation savings"),
        (9, "sectorial scaling and accuracy"),
        (10, "interpolation error decay"),
        (11, "matrix-valued consistency"),
    ]
)

_outcomes: dict = {}
_notes: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            item.user_properties.append(("criterion", marker.args[0]))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    n = props.get("criterion")
    if n is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _outcomes.setdefault(n, []).append(report.passed)
        if "measured" in props and report.when == "call":
            _notes.setdefault(n, []).append(props["measured"])


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in CRITERIA.items():
        results = _outcomes.get(n)
        if results is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        line = f"criterion {n:2d}: {status:7s} {title}"
        if _notes.get(n):
            line += "  [" + "; ".join(_notes[n]) + "]"
        tr.write_line(line)
