"""Per-criterion reporting for the acceptance suite.

Acceptance tests carry ``@pytest.mark.acceptance(number, title)`` and may
attach measurements through ``record_property("measured", text)``. After the
run a block with one PASS/FAIL line per criterion is printed; a criterion
passes only if every test tagged with it passed.
"""

import pytest

_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    number, title = mark.args
    entry = _criteria.setdefault(number, {"title": title, "ok": True, "ran": False, "notes": []})
    if rep.failed:
        entry["ok"] = False
    if rep.when == "call":
        entry["ran"] = True
        entry["notes"] += [v for k, v in item.user_properties if k == "measured"]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        status = "PASS" if e["ok"] and e["ran"] else "FAIL"
        tr.write_line(f"criterion {number}: {status}  {e['title']}")
        for note in e["notes"]:
            tr.write_line(f"    {note}")
