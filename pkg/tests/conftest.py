import pytest
from hypothesis import settings

import solarswarm as ss

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def table():
    return ss.builtin_table()


@pytest.fixture(scope="session")
def temp_model(table):
    return ss.build_type2_model(table, "temperature")


@pytest.fixture(scope="session")
def insol_model(table):
    return ss.build_type2_model(table, "insolation")


@pytest.fixture()
def unit_curve():
    return ss.SCurveParams(b_lo=0.0, b_hi=1.0)
