from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from tentcode import TentParams, shared_table

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

SLOPES = ["8/5", "81/50", "3/2", "7/4", "11/10", "19/10", "13/8"]


@pytest.fixture(params=SLOPES)
def params(request):
    return TentParams.parse(request.param)


@pytest.fixture
def mu85():
    return TentParams(8, 5)


@pytest.fixture
def mu8150():
    return TentParams(81, 50)


def table_for(p):
    return shared_table(p)


def dyadic(k: int, bits: int) -> Fraction:
    return Fraction(k, 2**bits)


_ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion(capsys):
    """Record one PASS/FAIL line for an acceptance criterion, then assert."""

    def record(number: int, title: str, ok: bool, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {title}"
        if detail:
            line += f" ({detail})"
        _ACCEPTANCE.append(line)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
