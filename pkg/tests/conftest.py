import numpy as np
import pytest

import percolab as pl


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile the numba kernels once so acceptance timings measure the
    # algorithms, not JIT startup
    g = pl.make_complete(3, 1.0)
    times = np.array([0.3, 0.1, 0.2])
    pl.run_trajectory(g, times)
    pl.merge_trace(g, times)
    pl.exact_hitting_table(g, 2)
    tracker = pl.ComponentTracker(3)
    tracker.merge(0, 1)
