import numpy as np
import pytest

from hbsa.emitter import CavityParams, is_physical, success_amplitude

# criterion number -> {"title": str, "passed": [...], "failed": [...], "xfailed": [...]}
_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    slot = _CRITERIA.setdefault(number, {"title": title, "passed": [], "failed": [], "xfailed": []})
    if hasattr(rep, "wasxfail"):
        if rep.when == "call" or rep.skipped:
            slot["xfailed" if rep.skipped else "failed"].append((item.name, rep.wasxfail))
        return
    if rep.when == "call":
        slot["passed" if rep.passed else "failed"].append((item.name, ""))
    elif rep.failed:
        slot["failed"].append((item.name, ""))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        slot = _CRITERIA[number]
        if slot["failed"]:
            status = "FAIL"
            detail = "failing: " + ", ".join(name for name, _ in slot["failed"])
        elif slot["xfailed"]:
            status = "FAIL"
            reasons = "; ".join(reason for _, reason in slot["xfailed"])
            detail = (
                f"{len(slot['passed'])} check(s) pass and the claim holds at gamma = 0; "
                f"the literal any-gamma reading fails as expected ({reasons})"
            )
        else:
            status = "PASS"
            detail = f"{len(slot['passed'])} check(s)"
        terminalreporter.write_line(f"criterion {number} [{status}] {slot['title']} - {detail}")


def random_params(rng: np.random.Generator, *, physical: bool = False) -> CavityParams:
    """Valid parameters with |d| bounded away from zero."""
    while True:
        params = CavityParams(
            g=float(rng.uniform(0.2, 5.0)),
            kappa_s=float(rng.uniform(0.0, 1.0)),
            gamma=float(rng.uniform(0.0, 0.5)),
            p=float(rng.uniform(0.3, 1.0)),
            omega_c=float(rng.uniform(-0.5, 0.5)),
            omega_x=float(rng.uniform(-0.5, 0.5)),
        )
        if abs(success_amplitude(params)) < 0.05:
            continue
        if physical and not is_physical(params):
            continue
        return params


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
