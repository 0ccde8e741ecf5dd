import json
from pathlib import Path

import pytest

ORACLES = json.loads((Path(__file__).parent / "oracle_values.json").read_text())


@pytest.fixture(scope="session")
def oracles():
    return ORACLES
