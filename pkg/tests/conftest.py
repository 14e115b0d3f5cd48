import pytest

from contactwave.model import WaveParams, make_params


def standard(**changes):
    base = dict(R=1.0, gamma=5.0 / 3.0, mu=1.0, kappa=1.0, theta_minus=1.0, theta_plus=2.0, v_plus=2.0)
    base.update(changes)
    return make_params(**base)


@pytest.fixture
def params():
    return standard()


@pytest.fixture
def flat_params():
    return standard(theta_plus=1.0, v_plus=1.0)


@pytest.fixture
def wave():
    return WaveParams(1.0, 0.25)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import SUMMARY
    except ImportError:
        return
    if SUMMARY:
        terminalreporter.section("acceptance criteria")
        for line in SUMMARY:
            terminalreporter.write_line(line)
