import pytest
from hypothesis import HealthCheck, settings

from arrival_workbench.core import DEST_D, DEST_DBAR, ArrivalInstance

settings.register_profile(
    "arrival",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("arrival")

I2_TEXT = """arrival v1
n 2
o 0
0 1 D1
1 0 D0
"""


@pytest.fixture
def i2():
    """0 -> 1 -> 0 -> D1: the train passes 0 twice and ends at D1"""
    return ArrivalInstance(n=2, origin=0, succ_even=(1, 0), succ_odd=(DEST_DBAR, DEST_D))


@pytest.fixture
def single():
    return ArrivalInstance(n=1, origin=0, succ_even=(DEST_D,), succ_odd=(DEST_DBAR,))


@pytest.fixture
def coinciding():
    """both successors of every vertex coincide"""
    return ArrivalInstance(n=2, origin=0, succ_even=(1, DEST_DBAR), succ_odd=(1, DEST_DBAR))


@pytest.fixture
def trap():
    return ArrivalInstance(n=2, origin=0, succ_even=(1, 0), succ_odd=(1, 0))


@pytest.fixture
def i2_file(tmp_path):
    path = tmp_path / "i2.arrival"
    path.write_text(I2_TEXT)
    return path


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size corpus checks, skip with -m 'not slow'")
