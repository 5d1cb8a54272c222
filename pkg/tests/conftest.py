import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

from localnames import parse_world  # noqa: E402


@pytest.fixture
def w2():
    return parse_world((HERE / "data" / "W2.world").read_text())


@pytest.fixture
def w2_path():
    return str(HERE / "data" / "W2.world")
