import pytest

from bb84_eavesdrop import SystemParams, build_default_table

# Canonical demonstration scenario used throughout the suite.
CANONICAL_ALPHA = 0.01
CANONICAL_ETA = 0.5
CANONICAL_RC = 0.01
BLOCK = 10**6


@pytest.fixture(scope="session")
def default_table():
    return build_default_table()


@pytest.fixture(scope="session")
def canonical():
    """Factory for SystemParams at the canonical alpha/eta/r_c."""

    def make(mu, m=BLOCK, alpha=CANONICAL_ALPHA, eta=CANONICAL_ETA, r_c=CANONICAL_RC):
        return SystemParams(mu=mu, alpha=alpha, eta=eta, r_c=r_c, m=m)

    return make
