import random

import pytest
from hypothesis import HealthCheck, settings

from ltphigamma.padic import LocalFieldSpec

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

Q2 = LocalFieldSpec(2)
Q3 = LocalFieldSpec(3)
Q9 = LocalFieldSpec(3, f=2)
RAM2 = LocalFieldSpec(2, e=2, eis=((2,), (0,)))
Q4 = LocalFieldSpec(2, f=2)

# the four field specs (p, f, e) used throughout
SPECS = {"(2,1,1)": Q2, "(3,1,1)": Q3, "(3,2,1)": Q9, "(2,1,2)": RAM2}


def random_unit(spec, rng, prec=64):
    while True:
        coeffs = [[rng.randrange(spec.p ** 40) for _ in range(spec.f)] for _ in range(spec.e)]
        u = spec.element(coeffs, prec)
        if u.is_unit():
            return u


@pytest.fixture
def rng():
    return random.Random(0)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
