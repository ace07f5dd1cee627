import pytest

from hpse.potential import PotentialSpec


@pytest.fixture(scope="session")
def quartic():
    return PotentialSpec(M=2, s="1", v=("0", "0"))


@pytest.fixture(scope="session")
def harmonic():
    return PotentialSpec(M=1, s="1", v=("0",))


def double_well(s: str) -> PotentialSpec:
    return PotentialSpec(M=2, s=s, v=("1", "-2"))


@pytest.fixture(scope="session")
def dw005():
    return double_well("0.05")


# reference digits used across the suite (first rows of the ground-state
# listing and the deep digit blocks)
QUARTIC_GROUND_105 = (
    "1.060362090484182899647046016692663545515208728528977933216245"
    "241695943563044344421126896299134671703"
)
QUARTIC_BLOCK_1000 = "304916644281633946163324287004261"
QUARTIC_BLOCK_10000 = "578044164777855042412917855188328"
QUARTIC_E50000_60 = (
    "4024985.730438698704313888104230563241821769405166607313872288953"
)
