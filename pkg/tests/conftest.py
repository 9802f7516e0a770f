from importlib import resources
from pathlib import Path

import pytest

DATA = Path(str(resources.files("adamsynth") / "data"))
FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def data_dir():
    return DATA


def read_synthetic_table():
    rows = set()
    for line in (FIXTURES / "fig1_right.txt").read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        n, s, name, tors = line.split()
        rows.add((int(n), int(s), None if name == "-" else name, None if tors == "free" else int(tors)))
    return rows
