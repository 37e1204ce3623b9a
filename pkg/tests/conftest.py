from pathlib import Path

import numpy as np
import pytest

from dte import load_csv

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def iris():
    return load_csv(DATA_DIR / "iris.csv", "species")


@pytest.fixture(scope="session")
def wine():
    return load_csv(DATA_DIR / "wine.csv", "cultivar")


@pytest.fixture(scope="session")
def cancer():
    return load_csv(DATA_DIR / "breast_cancer.csv", "diagnosis")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
