from pathlib import Path

import pytest

from paratopia.latin import LatinSquare

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def golden():
    def load(name: str) -> LatinSquare:
        return LatinSquare.load(GOLDEN / f"{name}.ls")

    return load
