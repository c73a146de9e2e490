import numpy as np
import pytest

from vstdeconv import _backend, _kernels_py, dictionary, prox

BACKENDS = ["python"] + (["compiled"] if _backend.COMPILED else [])


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run a test once per available kernel backend."""
    if request.param == "python":
        mod = _kernels_py
    else:
        from vstdeconv import _kernels as mod
    monkeypatch.setattr(dictionary, "kernels", mod)
    monkeypatch.setattr(prox, "kernels", mod)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
