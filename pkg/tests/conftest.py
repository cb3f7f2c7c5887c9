import os

import pytest

from katlas.cache import solve_cached
from katlas.nonlinearity import PowerNonlinearity

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("katlas-cache")
    old = os.environ.get("KATLAS_CACHE")
    os.environ["KATLAS_CACHE"] = str(d)
    yield d
    if old is None:
        os.environ.pop("KATLAS_CACHE", None)
    else:
        os.environ["KATLAS_CACHE"] = old


@pytest.fixture(scope="session")
def state(cache_dir):
    """state(N, p, k) -> BoundState for f(v) = -v + |v|^(p-2) v, shared across the session."""
    def get(N, p, k=0):
        return solve_cached(PowerNonlinearity.single(1.0, p), N, k, directory=cache_dir)
    return get


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
