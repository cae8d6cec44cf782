import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cohomcurv.metrics import CATALOG, CATALOG_IDS, DiagonalMetric, ProductMetric

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DIAGONAL_IDS = tuple(i for i in CATALOG_IDS if isinstance(CATALOG[i].metric, DiagonalMetric))
PRODUCT_IDS = tuple(i for i in CATALOG_IDS if isinstance(CATALOG[i].metric, ProductMetric))


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture(params=CATALOG_IDS)
def entry(request):
    return CATALOG[request.param]


@pytest.fixture(params=DIAGONAL_IDS)
def diagonal_entry(request):
    return CATALOG[request.param]


@pytest.fixture
def tsukada():
    return CATALOG["tsukada"].metric
