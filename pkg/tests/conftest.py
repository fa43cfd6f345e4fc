import functools

import pytest

from fibdiff.pipeline import PipelineConfig, run_full_proof


@functools.lru_cache(maxsize=None)
def _proof(p):
    return run_full_proof(PipelineConfig(p))


@pytest.fixture(scope="session")
def proof():
    """Cached full proof runs, keyed by prime."""
    return _proof


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
