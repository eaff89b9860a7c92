import random

import pytest
from hypothesis import settings

from statel import fixtures

settings.register_profile("statel", deadline=None, max_examples=100)
settings.load_profile("statel")


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(params=["FLU", "BIRDS", "K1", "RELATED_WORK", "CONTINUITY", "CONTINUITY_TIGHT", "ROLES"])
def example_kb(request):
    return request.param, fixtures.kb(request.param)


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def acceptance_log(request):
    return request.config.stash[_ACCEPTANCE]


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
