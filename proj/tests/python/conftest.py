from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[2]


@pytest.fixture
def source_dir():
    return str(ROOT)


@pytest.fixture
def catalogue_path():
    return str(ROOT / "data" / "occupation_catalogue.csv")
