import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture(autouse=True)
def _no_seed_override(monkeypatch):
    monkeypatch.delenv("DLAB_SEED", raising=False)


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion; returns the verdict for asserting."""
    lines = request.config.stash[_ACCEPTANCE]

    def record(label: str, passed: bool, detail: str) -> bool:
        line = f"{'PASS' if passed else 'FAIL'} criterion {label}: {detail}"
        lines.append(line)
        print(line)
        return passed

    return record


def _label_key(line: str):
    label = line.split(":")[0].split()[-1]  # e.g. "3b"
    digits = "".join(ch for ch in label if ch.isdigit())
    return int(digits), label


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=_label_key):
            terminalreporter.write_line(line)
