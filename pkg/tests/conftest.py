import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = Path(__file__).parent / "data"

_ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def record():
    """Store one PASS/FAIL line per acceptance criterion; call before asserting."""

    def _record(criterion: str, passed: bool, detail: str = "") -> bool:
        prev = _ACCEPTANCE.get(criterion)
        # a criterion checked in several tests passes only if every part does
        ok = bool(passed) and (prev is None or prev[0])
        parts = [p for p in ((prev[1] if prev else ""), detail) if p]
        _ACCEPTANCE[criterion] = (ok, "; ".join(parts))
        return bool(passed)

    return _record


@pytest.fixture
def data_dir():
    return DATA


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: int(k.split()[0].lstrip("AC"))):
        ok, detail = _ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}  {detail}")
