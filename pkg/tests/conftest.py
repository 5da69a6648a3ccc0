import numpy as np
import pytest


def random_density(d, rng, rank=None):
    rank = d if rank is None else rank
    Z = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = Z @ Z.conj().T
    return rho / np.trace(rho)


def random_matrix(d, rng):
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one (criterion, passed, detail) entry per acceptance check, printed at the end
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {detail}")
