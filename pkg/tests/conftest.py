import numpy as np
import pytest

from smatvplan import build_case_study


@pytest.fixture(scope="session")
def case_study():
    return build_case_study()


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)
