import pytest

from fislab import reference


@pytest.fixture
def chain():
    """Four boolean features, x1 & (x2 | x3 & x4), instance all-ones."""
    return reference.and_or_chain_problem()


@pytest.fixture
def single():
    """Two boolean features, only x1 matters, instance (1, 0)."""
    return reference.single_decider_problem()
