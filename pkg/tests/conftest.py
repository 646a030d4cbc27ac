from __future__ import annotations

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))


@pytest.fixture
def data_dir() -> Path:
    from app.core.paths import DATA_DIR

    return DATA_DIR


@pytest.fixture
def cat_sig():
    from app.core.signature import builtin_signature

    return builtin_signature("cat")


@pytest.fixture
def dblcat_sig():
    from app.core.signature import builtin_signature

    return builtin_signature("dblcat")
