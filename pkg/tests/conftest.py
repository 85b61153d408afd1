import pytest

from chatrank.dataset import load_dataset
from chatrank.synthetic import bundled_path


@pytest.fixture(scope="session")
def synthetic():
    return load_dataset(bundled_path())
