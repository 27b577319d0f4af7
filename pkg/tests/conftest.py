import random

import pytest
from hypothesis import HealthCheck, settings

from dvrgroups.localring import make_ring

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_acceptance: dict[int, str] = {}


@pytest.fixture
def rng():
    return random.Random(20240517)


@pytest.fixture(params=[("zero", 2, 16), ("zero", 3, 10), ("zero", 5, 8), ("positive", 3, 8), ("positive", 2, 12)],
                ids=lambda r: f"{r[0]}-{r[1]}^{r[2]}")
def ring(request):
    return make_ring(*request.param)


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    for marker in report.keywords:
        if marker.startswith("criterion_"):
            n = int(marker.split("_")[1])
            _acceptance[n] = "PASS" if report.passed else "FAIL"


def pytest_configure(config):
    for n in range(1, 12):
        config.addinivalue_line("markers", f"criterion_{n}: acceptance criterion {n}")


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_acceptance):
        terminalreporter.write_line(f"ACCEPTANCE criterion {n}: {_acceptance[n]}")
