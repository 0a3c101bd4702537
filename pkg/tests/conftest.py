from collections import defaultdict

import pytest

from slitwave import NEUTRON
from slitwave.model import ReducedParams

# criterion number -> list of (sub-label, outcome, detail)
_criteria = defaultdict(list)


@pytest.fixture(scope="session")
def neutron():
    return NEUTRON.reduce()


@pytest.fixture(scope="session")
def single():
    """Same slit width as the neutron set but coincident slits."""
    return ReducedParams(beta_r=1.0, d_r=0.0)


@pytest.fixture
def record(request):
    """Attach a measured value to the acceptance summary line."""

    def _record(text):
        request.node.user_properties.append(("detail", text))

    return _record


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label, text): acceptance criterion reported in the summary")


def pytest_runtest_setup(item):
    m = item.get_closest_marker("criterion")
    if m:
        item.user_properties.append(("criterion", (m.args[0], m.args[1])))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        label, text = props["criterion"]
        details = [v for k, v in report.user_properties if k == "detail"]
        _criteria[_number(label)].append((label, text, report.outcome, "; ".join(details)))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        parts = sorted(_criteria[number])
        ok = all(outcome == "passed" for _, _, outcome, _ in parts)
        if len(parts) == 1:
            _, text, _, detail = parts[0]
            line = f"{text}" + (f" [{detail}]" if detail else "")
        else:
            line = "; ".join(f"{label} {'pass' if o == 'passed' else 'FAIL'}: {text}" + (f" [{d}]" if d else "")
                             for label, text, o, d in parts)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number}: {line}")


def _number(label):
    return int("".join(c for c in label if c.isdigit()))
