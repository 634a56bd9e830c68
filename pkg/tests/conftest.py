import pytest

from obstructa import examples

# criterion number -> (title, ok, detail); filled by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def shipped():
    """Every shipped example, built and self-checked once per run."""
    return {n: examples.build(n) for n in examples.NAMES}


@pytest.fixture(scope="session")
def algebras(shipped):
    return {n: e.algebra for n, e in shipped.items()}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 13):
        if n not in ACCEPTANCE:
            terminalreporter.write_line(f"criterion {n:2d} NOT RUN")
            continue
        title, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'} {title}: {detail}")
