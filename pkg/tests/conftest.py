import time
from contextlib import contextmanager
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from blockgraph import build_graph, load

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_ACCEPTANCE = pytest.StashKey[list]()


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.bdm"


def all_fixtures() -> list[Path]:
    return sorted(FIXTURES.glob("*.bdm"))


@pytest.fixture
def load_graph():
    def _load(name: str):
        model = load(fixture_path(name))
        return model, build_graph(model)

    return _load


@pytest.fixture
def criterion(request):
    """Context manager that times one acceptance criterion and records PASS or FAIL.

    Usage: ``with criterion(3, "seven paths", limit=10) as note: ...``; ``note``
    appends a short detail to the summary line.
    """
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    @contextmanager
    def run(number: int, title: str, limit: float | None = None):
        details: list[str] = []
        start = time.perf_counter()
        status = "FAIL"
        try:
            yield details.append
            elapsed = time.perf_counter() - start
            if limit is not None and elapsed >= limit:
                details.append(f"runtime {elapsed:.2f}s exceeds {limit:g}s")
                raise AssertionError(f"criterion {number} took {elapsed:.2f}s, limit {limit:g}s")
            status = "PASS"
        finally:
            elapsed = time.perf_counter() - start
            extra = f"; {'; '.join(details)}" if details else ""
            line = f"criterion {number:>2} {status}: {title} ({elapsed:.2f}s{extra})"
            lines.append((number, line))
            print(line)

    return run


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
