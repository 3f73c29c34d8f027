import os
import pathlib
import shutil

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]
FIXTURE = pathlib.Path(os.environ.get("MER_FIXTURE_DIR", ROOT / "fixtures")) / "synthetic"
DATA = pathlib.Path(os.environ.get("MER_DATA_DIR", ROOT / "data"))


@pytest.fixture(scope="session")
def fixture_dir():
    return FIXTURE


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def mer_cli():
    path = os.environ.get("MER_CLI") or shutil.which("mer")
    if not path:
        pytest.skip("mer executable not available (set MER_CLI)")
    return path
