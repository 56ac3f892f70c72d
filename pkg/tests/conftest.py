import json
from importlib.resources import files

import numpy as np
import pytest

from flatchain import parse_system
from flatchain.aircraft import kernels
from flatchain.aircraft.params import AircraftParams

FIXTURES = files("flatchain.fixtures")


def fixture_text(name: str) -> str:
    return FIXTURES.joinpath(name).read_text()


@pytest.fixture(scope="session")
def skylark() -> AircraftParams:
    return AircraftParams.from_dict(json.loads(fixture_text("skylark.json")))


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels(skylark):
    # compile the jitted kernels once so timed tests measure algorithms, not JIT
    kernels.warmup(skylark.packed)


@pytest.fixture(scope="session")
def nnr_system():
    return parse_system(fixture_text("ex_nnr.dsys"))


def pq_system(s: int):
    return parse_system(fixture_text(f"ex_pq{s}.dsys"))


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240811)
