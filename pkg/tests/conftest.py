from importlib.resources import files

import numpy as np
import pytest

from invloc import Norm, ingest_coordinates, parse_instance, solve_inverse
from invloc.ingest import GeneratorConfig

DATA = files("invloc") / "data"


def load(name):
    return parse_instance((DATA / name).read_text())


@pytest.fixture(scope="session")
def circle4():
    return load("circle4.inst")


@pytest.fixture(scope="session")
def points18():
    return load("points18.inst")


@pytest.fixture(scope="session")
def ruspini_text():
    return (DATA / "ruspini.txt").read_text()


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile (or load cached) numba kernels before anything is timed
    inst = ingest_coordinates("0 0\n1 0\n0 1\n", GeneratorConfig(0), Norm(3.0))
    solve_inverse(inst, (0.3, 0.3))
    solve_inverse(ingest_coordinates("0 0\n1 0\n0 1\n"), (0.3, 0.3))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
