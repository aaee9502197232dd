import pytest

from hardyshift import ConstructionConfig

# positions produced by the search at alpha=1, delta=0.5; their minimality
# is asserted in test_construction
STANDARD_STARTS = (3, 32, 117)


@pytest.fixture(scope="session")
def standard_config() -> ConstructionConfig:
    return ConstructionConfig(alpha=1.0, delta=0.5, n_spikes=3,
                              spike_starts=STANDARD_STARTS)
