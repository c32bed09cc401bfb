import os

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def tmp_graph(tmp_path):
    """Write a MultiGraph to a temporary graph file and return the path."""
    from unimap.multigraph import write_graph

    def _write(g, name="g.txt"):
        p = tmp_path / name
        write_graph(g, p)
        return str(p)

    return _write


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(tag): acceptance criterion covered by the test")
    config._criteria = {}


@pytest.fixture
def detail(request):
    """Attach a one-line measurement to the acceptance summary."""
    def _note(text):
        request.node.user_properties.append(("detail", text))
    return _note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    if rep.when == "setup" and rep.passed:
        return
    notes = "; ".join(v for k, v in item.user_properties if k == "detail")
    status = "PASS" if rep.passed else "FAIL"
    prev = item.config._criteria.get(mark.args[0])
    if prev is not None:
        # parametrized criteria: any failing case fails the criterion
        status = "FAIL" if "FAIL" in (prev[0], status) else "PASS"
        notes = "; ".join(x for x in (prev[1], notes) if x)
    item.config._criteria[mark.args[0]] = (status, notes)


def pytest_terminal_summary(terminalreporter, config):
    crit = getattr(config, "_criteria", {})
    if not crit:
        return
    terminalreporter.section("acceptance criteria")
    for tag in sorted(crit, key=lambda t: (len(t), t)):
        status, notes = crit[tag]
        terminalreporter.write_line(f"{tag} {status}" + (f"  {notes}" if notes else ""))
