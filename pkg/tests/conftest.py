from fractions import Fraction

import pytest

from qplex.designs import catalog_build, catalog_povm

# (name, params, d, n) for every catalog 2-design
TWO_DESIGNS = [
    ("sic-d2", (), 2, 4),
    ("mub", (2,), 2, 6),
    ("cube", (), 2, 8),
    ("cuboctahedron", (), 2, 12),
    ("icosahedron", (), 2, 12),
    ("sic-d3", (0.0,), 3, 9),
    ("sic-d3", (0.3,), 3, 9),
    ("mub", (3,), 3, 12),
    ("mub", (4,), 4, 20),
    ("mub", (5,), 5, 30),
    ("two-distance-d5", (), 5, 45),
]

MUB_LIKE = [("mub", (2,)), ("mub", (3,)), ("mub", (4,)), ("mub", (5,)), ("two-distance-d5", ())]


def design_id(entry):
    name, params = entry[0], entry[1]
    return name + "".join(f"-{p}" for p in params)


def two_design_alpha(d, n):
    return Fraction(d, n * (d + 1))


@pytest.fixture(params=TWO_DESIGNS, ids=design_id)
def two_design(request):
    name, params, d, n = request.param
    return catalog_build(name, params)


@pytest.fixture(params=[t[:2] for t in TWO_DESIGNS] + [("bipyramid", ())], ids=design_id)
def morphophoric_povm(request):
    return catalog_povm(*request.param)


# --- acceptance reporting ----------------------------------------------------
# Tests marked ``criterion(k, title)`` get one PASS/FAIL line each in the
# terminal summary, whatever the verbosity or capture settings.

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    key, title = mark.args
    failed = report.failed or (report.when == "call" and report.outcome != "passed")
    if report.when == "call" or failed:
        prev = _CRITERIA.get(key, (title, True))[1]
        _CRITERIA[key] = (title, prev and not failed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(_CRITERIA):
        title, ok = _CRITERIA[key]
        tr.write_line(f"AC{key:<3} {'PASS' if ok else 'FAIL'}  {title}")
    passed = sum(ok for _, ok in _CRITERIA.values())
    tr.write_line(f"{passed}/{len(_CRITERIA)} criteria passed")
