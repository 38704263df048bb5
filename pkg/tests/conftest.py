import numpy as np
import pytest

import tierbounds as tb

DEFAULT_THRESHOLDS = (-1.42, 1.09)


@pytest.fixture(scope="session")
def partition():
    return tb.TierPartition(DEFAULT_THRESHOLDS)


@pytest.fixture(scope="session")
def table_small():
    """A moderately sized simulated dataset shared across tests."""
    table, _ = tb.simulate(2000, seed=7)
    return table


@pytest.fixture(scope="session")
def table_large():
    table, _ = tb.simulate(20000, seed=11)
    return table


@pytest.fixture(scope="session")
def true_pair():
    return tb.true_nuisance()


@pytest.fixture(scope="session")
def fitted_pair(table_small):
    return tb.NuisancePair(
        propensity=tb.fit_propensity(table_small),
        outcome=tb.fit_outcome(table_small),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(0)
