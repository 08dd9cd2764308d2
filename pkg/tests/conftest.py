import pytest

from hetcache import SystemParams
from hetcache.model import analyze


def tiny_params(**changes):
    """Three contents, one satellite and two terrestrial frequencies, D_max = 1."""
    base = dict(n_contents=3, n_freq_sat=1, n_freq_ter=2, d_max=1, cache_sat_mbit=50.0,
                cache_bs_mbit=25.0, lambda_pu=0.2, lambda_hu=1.5)
    base.update(changes)
    return SystemParams(**base)


@pytest.fixture
def tiny():
    return tiny_params()


@pytest.fixture(scope="session")
def default_fit():
    return analyze(SystemParams())


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
