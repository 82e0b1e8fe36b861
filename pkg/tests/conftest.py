import numpy as np
import pytest

_ACCEPTANCE = []

P_ALL = ["1", 1.5, 2, 3, "inf"]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def record():
    """Log one acceptance line; the summary is printed at the end of the run."""

    def _record(number, title, ok, detail=""):
        _ACCEPTANCE.append((number, title, bool(ok), detail))
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        state = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{state}] AC{number:<2} {title}  {detail}")
