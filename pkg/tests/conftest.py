import pytest
from hypothesis import settings

from semiroot import oracle, root_datum

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def sl2_oracle():
    d = root_datum.fixture("sl2")
    table, provenance = oracle.materialize_oracle(d, 4, seed=7)
    return d, table, provenance


@pytest.fixture(scope="session")
def sl3_oracle():
    d = root_datum.fixture("sl3")
    table, provenance = oracle.materialize_oracle(d, 2, seed=5)
    return d, table, provenance
