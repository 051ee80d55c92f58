import numpy as np
import pytest

from cvxcav import DataSeries, solve


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger kernel JIT compilation once so timed tests measure the algorithm."""
    d = DataSeries([0.0, 1.0, 2.0, 3.0], [0.0, 1.0, 0.0, 1.0])
    solve(d, 0)
    solve(d, 1)
    solve(d, 2)
    solve(d, 3, "concave-first")


def random_series(rng, n, x_lo=0.0, x_hi=1.0):
    """Strictly increasing abscissae, uniform ordinates."""
    while True:
        x = np.sort(rng.uniform(x_lo, x_hi, n))
        if n < 2 or np.all(np.diff(x) > 0):
            break
    return DataSeries(x, rng.uniform(0.0, 1.0, n))
