"""Exact and moving-average fractional Brownian sampling."""

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import stats

from cusploc import SpecError
from cusploc.fbm import (
    FbmGrid,
    fbm_covariance,
    fbm_sample_exact,
    fbm_sample_exact_many,
    fbm_sample_ma,
    fbm_sample_ma_many,
    symmetric_grid,
)


def test_covariance_closed_form():
    grid = FbmGrid(hurst=0.5, points=np.array([-1.0, 0.0, 1.0, 2.0]))
    cov = fbm_covariance(grid)
    # Brownian case: independent halves, covariance min(u, v) on one side.
    assert_allclose(np.diag(cov), [1.0, 0.0, 1.0, 2.0], atol=1e-15)
    assert_allclose(cov[0, 2], 0.0, atol=1e-15)
    assert_allclose(cov[2, 3], 1.0, atol=1e-15)
    grid = FbmGrid(hurst=0.75, points=np.array([0.5, 2.0]))
    cov = fbm_covariance(grid)
    expected = 0.5 * (0.5**1.5 + 2.0**1.5 - 1.5**1.5)
    assert_allclose(cov[0, 1], expected, rtol=1e-14)


def test_grid_validation():
    with pytest.raises(SpecError):
        FbmGrid(hurst=0.0, points=np.array([0.0, 1.0]))
    with pytest.raises(SpecError):
        FbmGrid(hurst=1.0, points=np.array([0.0, 1.0]))
    with pytest.raises(SpecError):
        FbmGrid(hurst=0.5, points=np.array([0.0, 1.0, 1.0]))
    with pytest.raises(SpecError):
        FbmGrid(hurst=0.5, points=np.array([1.0, 0.5]))
    with pytest.raises(SpecError):
        FbmGrid(hurst=0.5, points=np.linspace(1.0, 2.0, 5000))
    with pytest.raises(SpecError):
        symmetric_grid(0.5, -1.0, 4)
    with pytest.raises(SpecError):
        fbm_sample_ma_many(symmetric_grid(0.5, 1.0, 4), 2, 0, truncation=0.5)


def test_symmetric_grid_contains_zero():
    grid = symmetric_grid(0.7, 2.0, 16)
    assert grid.points.size == 33
    assert grid.points[16] == 0.0
    assert_allclose(grid.points, -grid.points[::-1], atol=1e-15)


def test_exact_sampler_matches_covariance():
    grid = symmetric_grid(0.3, 2.0, 8)
    cov = fbm_covariance(grid)
    draws = fbm_sample_exact_many(grid, 6000, seed=101)
    emp = draws.T @ draws / draws.shape[0]
    se = np.sqrt((np.outer(np.diag(cov), np.diag(cov)) + cov**2) / draws.shape[0])
    dev = np.abs(emp - cov) / np.where(se > 0.0, se, 1.0)
    assert dev.max() < 5.0
    # The pinned point stays exactly zero.
    assert np.all(draws[:, 8] == 0.0)


def test_exact_sampler_is_deterministic_and_prefix_stable():
    grid = symmetric_grid(0.6, 1.0, 6)
    a = fbm_sample_exact_many(grid, 5, seed=7)
    b = fbm_sample_exact_many(grid, 5, seed=7)
    assert np.array_equal(a, b)
    # Different batch sizes share the white-noise stream, so rows agree up
    # to the accumulation order of the matrix product.
    c = fbm_sample_exact_many(grid, 3, seed=7)
    assert_allclose(a[:3], c, rtol=1e-12, atol=1e-14)
    single = fbm_sample_exact(grid, seed=7)
    assert np.array_equal(single.values, fbm_sample_exact_many(grid, 1, seed=7)[0])
    assert_allclose(single.values, a[0], rtol=1e-12, atol=1e-14)
    assert not np.array_equal(a, fbm_sample_exact_many(grid, 5, seed=8))


def test_exact_sampler_self_similarity():
    # Scaling the grid by s scales paths by s^H, path by path, because the
    # factorization commutes with the dilation exactly.
    hurst = 0.6
    base = symmetric_grid(hurst, 1.0, 8)
    scaled = FbmGrid(hurst=hurst, points=base.points * 3.0)
    a = fbm_sample_exact_many(base, 4, seed=5)
    b = fbm_sample_exact_many(scaled, 4, seed=5)
    assert_allclose(b, a * 3.0**hurst, rtol=1e-10, atol=1e-12)


def test_moving_average_route_matches_exact_route():
    for hurst in (0.3, 0.75):
        grid = symmetric_grid(hurst, 1.5, 6)
        exact = fbm_sample_exact_many(grid, 3000, seed=21)
        ma = fbm_sample_ma_many(grid, 3000, seed=22, truncation=40.0, refinement=48)
        var_th = np.abs(grid.points) ** (2.0 * hurst)
        keep = var_th > 0.0
        ratio = ma.var(axis=0)[keep] / var_th[keep]
        assert ratio.min() > 0.93 and ratio.max() < 1.07
        stats_per_point = [
            stats.ks_2samp(exact[:, j], ma[:, j]).statistic
            for j in range(grid.points.size)
            if grid.points[j] != 0.0
        ]
        assert max(stats_per_point) < 0.05


def test_moving_average_brownian_case():
    # At H = 1/2 the kernel is an indicator and the route reduces to summed
    # white noise: increments over disjoint intervals are uncorrelated.
    grid = FbmGrid(hurst=0.5, points=np.array([-2.0, -1.0, 0.0, 1.0, 2.0]))
    draws = fbm_sample_ma_many(grid, 4000, seed=31, truncation=30.0, refinement=32)
    left = draws[:, 1] - draws[:, 0]
    right = draws[:, 4] - draws[:, 3]
    corr = np.corrcoef(left, right)[0, 1]
    assert abs(corr) < 0.06
    assert_allclose(draws[:, 3].var(), 1.0, rtol=0.08)
    single = fbm_sample_ma(grid, seed=31, truncation=30.0, refinement=32)
    assert single.values.shape == (5,)
