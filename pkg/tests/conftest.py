import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from spreadfft.model import benchmark_independent, benchmark_proportional


@pytest.fixture(scope="session")
def benchmark():
    model, state = benchmark_proportional()
    return model, state


@pytest.fixture(scope="session")
def benchmark_indep():
    model, state = benchmark_independent()
    return model, state
