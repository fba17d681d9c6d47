from fractions import Fraction

import pytest
from hypothesis import settings

from weblogmine.wasd import WasDatabase

settings.register_profile("ci", deadline=None, print_blob=True)
settings.load_profile("ci")

F1_ROWS = ["a b d a c", "e a e b c a c", "b a b f a e c", "a f b a c f c"]
F1_THRESHOLD = Fraction(3, 4)

# all 13 patterns at 3/4, each contained in all four sequences
F1_PATTERNS = ["a", "b", "c", "a a", "a b", "a c", "b a", "b c", "a a c", "a b a", "a b c", "b a c", "a b a c"]


@pytest.fixture
def f1() -> WasDatabase:
    return WasDatabase.from_strings(F1_ROWS)


# one PASS/FAIL line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running benchmark criteria")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
