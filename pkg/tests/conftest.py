import contextlib
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA = {}


class _Recorder:
    @contextlib.contextmanager
    def __call__(self, number: int, label: str):
        try:
            yield
        except BaseException as exc:
            _CRITERIA[number] = (label, False, f"{type(exc).__name__}: {exc}".splitlines()[0][:160])
            raise
        else:
            _CRITERIA.setdefault(number, (label, True, ""))


@pytest.fixture
def criterion():
    return _Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        label, ok, why = _CRITERIA[n]
        line = f"criterion {n} [{label}]: {'PASS' if ok else 'FAIL'}"
        if why:
            line += f"  ({why})"
        terminalreporter.write_line(line)
