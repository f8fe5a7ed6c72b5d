import pytest

from optilens import _pykernels, kernels

# filled by test_acceptance: criterion number -> (passed, detail)
ACCEPTANCE = {}


@pytest.fixture(params=kernels.available())
def backend(request, monkeypatch):
    """Run the library against each importable kernel backend in turn."""
    mod = kernels.get(request.param)
    monkeypatch.setattr(kernels, "impl", mod)
    return mod


@pytest.fixture
def python_backend(monkeypatch):
    monkeypatch.setattr(kernels, "impl", _pykernels)
    return _pykernels


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
