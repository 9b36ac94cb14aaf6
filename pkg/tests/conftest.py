import numpy as np
import pytest

from streamsvdd._backend import BACKENDS

ACCEPTANCE = []


def _status(passed):
    return "SKIP" if passed is None else ("PASS" if passed else "FAIL")


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def record_criterion():
    """Register one pass/fail line for the acceptance summary."""
    def record(number, title, passed, detail=""):
        ACCEPTANCE.append((number, title, passed, detail))
        print(f"[criterion {number}] {_status(passed)} {title}: {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(
            f"{number:>2}. {_status(passed)}  {title} -- {detail}")
