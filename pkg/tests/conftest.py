import pytest

from src.distribution.params import UGATParams
from tests.oracles import ORACLE_BANK, BoxOracle


@pytest.fixture(params=ORACLE_BANK, ids=lambda c: f"a{c[0]}-b{c[1]}-s{c[2]}")
def oracle_case(request):
    alphas, beta, s = request.param
    return UGATParams.build(alphas, beta, s), BoxOracle(alphas, beta, s)


@pytest.fixture
def bivariate():
    return UGATParams.build([0.3, 0.4], beta=2.0, s=1.5)
