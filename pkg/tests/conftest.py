import sys
from fractions import Fraction

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def two_params():
    return (Fraction(1), Fraction(0))


def pytest_terminal_summary(terminalreporter):
    for name, module in list(sys.modules.items()):
        if name.endswith("test_acceptance") and getattr(module, "SUMMARY", None):
            terminalreporter.section("acceptance criteria")
            for line in sorted(module.SUMMARY, key=lambda line: line[6:10]):
                terminalreporter.write_line(line)
