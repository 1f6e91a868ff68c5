"""Shared helpers for the test suite.

make_params builds the reference configuration used throughout: detunings
and rates quoted in units of the cavity linewidth, with the drive strength,
detuning ratio and Kerr orientation as the knobs the tests turn.
"""

import pytest

from magnonic import KerrSign, SystemParams


def make_params(omega=0.0, ratio=1.3, sign=KerrSign.POSITIVE, **overrides):
    fields = dict(
        delta_a=3.0,
        delta_m=3.0 * ratio,
        gamma_m=1.0,
        g_m=2.4,
        kappa_a=1.0,
        kerr_sign=sign,
        kerr_magnitude=1.0,
        omega_drive=omega,
    )
    fields.update(overrides)
    return SystemParams(**fields)


@pytest.fixture
def params_factory():
    return make_params


# one line per acceptance criterion, echoed after the test summary so the
# verdicts survive pytest's output capture
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
