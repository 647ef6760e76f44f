import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")


def naive_factors(w, n):
    """Distinct length-n windows, enumerated directly."""
    return {tuple(w[i:i + n]) for i in range(len(w) - n + 1)}


@pytest.fixture
def tm_prefix():
    # digit-sum parity of 1..64, letters 1 (even) and 2 (odd)
    return [1 + bin(i).count("1") % 2 for i in range(1, 65)]
