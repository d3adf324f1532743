import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pcgroups.catalog import load_catalog  # noqa: E402


@pytest.fixture(scope="session")
def bundled():
    return {e.name: e for e in load_catalog()}
