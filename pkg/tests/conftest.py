import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from klkostant import hecke  # noqa: E402


@pytest.fixture(autouse=True, scope="session")
def _in_memory_tables():
    """Tests never touch a user cache directory unless they ask for one."""
    old = hecke.settings()
    cap, cache = old.rank_cap, old.cache_dir
    hecke.configure(rank_cap=8, cache_dir=None)
    yield
    hecke.configure(rank_cap=cap, cache_dir=cache)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
