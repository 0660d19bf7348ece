import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)


@pytest.fixture
def criterion(capsys):
    """Print one PASS/FAIL line per acceptance criterion, then assert."""

    def check(name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else "")
        with capsys.disabled():
            print(line)
        assert ok, line

    return check
