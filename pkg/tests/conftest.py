import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pushrank import SolverConfig, available_backends

import corpus


@pytest.fixture
def cfg():
    return SolverConfig()


@pytest.fixture
def chain3():
    return corpus.chain3()


@pytest.fixture
def cycle2():
    return corpus.cycle2()


@pytest.fixture
def fanin3():
    return corpus.fanin3()


@pytest.fixture
def star4():
    return corpus.star4()


@pytest.fixture(params=available_backends())
def backend(request):
    return request.param
