import os
import random
import sys

import pytest

SEED = int(os.environ.get("PREVTROP_SEED", "20260823"))


@pytest.fixture
def rng():
    return random.Random(SEED)


def fresh_rng(salt=0):
    return random.Random(SEED + salt)


def pytest_terminal_summary(terminalreporter):
    # Output capture eats the verdicts printed while the acceptance tests
    # run, so replay them where a plain `pytest` invocation shows them.
    module = sys.modules.get("test_acceptance")
    verdicts = getattr(module, "VERDICTS", ())
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for line in verdicts:
            terminalreporter.write_line(line)
