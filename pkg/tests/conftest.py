import os

os.environ.setdefault('SETMAPS_CONFIG', 'testing')

import pytest  # noqa: E402

from app import create_app  # noqa: E402
from app.models.schemas import ExpressionPool, RandomMapParams  # noqa: E402
from app.services.corpus import ExampleCorpus  # noqa: E402
from app.services.map_analyzer import MapAnalyzer  # noqa: E402
from app.services.map_metrics import MapMetricCalculator  # noqa: E402
from config import TestingConfig  # noqa: E402

# Pools without oscillating pieces for suites that run many sup enclosures
SMOOTH_PARAMS = RandomMapParams(
    breakpoints=3,
    weights={ExpressionPool.CONST: 0.6, ExpressionPool.POLY: 0.4},
)
FULL_PARAMS = RandomMapParams(breakpoints=4)


@pytest.fixture(scope='session')
def corpus():
    return ExampleCorpus()


@pytest.fixture(scope='session')
def analyzer():
    return MapAnalyzer(TestingConfig)


@pytest.fixture(scope='session')
def calculator():
    return MapMetricCalculator(TestingConfig)


@pytest.fixture
def F21(corpus):
    return corpus.build('F21')


@pytest.fixture
def G21(corpus):
    return corpus.build('G21')


@pytest.fixture
def sinrec(corpus):
    return corpus.build('sinrec')


@pytest.fixture(scope='session')
def app():
    app = create_app('testing')
    app.config['TESTING'] = True
    return app


@pytest.fixture
def client(app):
    return app.test_client()
