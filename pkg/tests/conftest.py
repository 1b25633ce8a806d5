import random

import pytest


@pytest.fixture
def rng():
    """Fresh deterministic generator per test, so test order cannot leak."""
    return random.Random(20260815)
