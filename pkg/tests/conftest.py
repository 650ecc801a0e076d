import numpy as np
import pytest
from hypothesis import settings

from pathmaster.path_measure import PathMeasure, TimeGrid

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def brownian():
    """Factory for Brownian-like path measures on [0, T]."""
    def make(N=50, M=20, T=1.0, d=1, seed=0, x0=0.0):
        rng = np.random.default_rng(seed)
        grid = TimeGrid(T, M)
        steps = rng.normal(0.0, np.sqrt(grid.dt), size=(N, M, d))
        v = np.concatenate([np.full((N, 1, d), x0), x0 + np.cumsum(steps, axis=1)], axis=1)
        return PathMeasure(grid, v)
    return make


ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict; returns the verdict so tests can assert it."""
    results = request.config.stash.setdefault(ACCEPTANCE, {})

    def record(number, title, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}  {title}" + (f"  [{detail}]" if detail else "")
        results[number] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(ACCEPTANCE, {})
    if results:
        terminalreporter.section("acceptance")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
