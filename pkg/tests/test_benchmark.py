import numpy as np
from numpy.testing import assert_allclose

from src.models.partition import MAXDIST, RANDOM
from src.services import benchmark_service


def test_loglog_slope_recovers_power_law():
    rows = [{'algorithm': 'a', 'n_users': n, 'seconds': 1e-6 * n ** 2} for n in (100, 200, 400, 800)]
    rows += [{'algorithm': 'b', 'n_users': n, 'seconds': 3e-5 * n} for n in (100, 200, 400, 800)]
    slopes = benchmark_service.loglog_slope(rows)
    assert_allclose(slopes['a'], 2.0)
    assert_allclose(slopes['b'], 1.0)


def test_loglog_slope_needs_two_points():
    assert benchmark_service.loglog_slope([{'algorithm': 'a', 'n_users': 10, 'seconds': 1.0}]) == {}


def test_benchmark_rows():
    rows = benchmark_service.benchmark_clustering((30, 60), cluster_size=3, repeats=2)
    assert len(rows) == 6
    assert {row['n_users'] for row in rows} == {30, 60}
    assert all(np.isfinite(row['seconds']) and row['seconds'] >= 0 for row in rows)


def test_fixed_size_algorithms_grow_superlinearly():
    rows = benchmark_service.benchmark_clustering((800, 1600, 3200), algorithms=(RANDOM, MAXDIST))
    slopes = benchmark_service.loglog_slope(rows)
    assert slopes[RANDOM] > 1.2
    assert slopes[MAXDIST] > 1.2
