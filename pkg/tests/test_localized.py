"""Localized fits, direct-sum kernel, and the distributed-average baseline."""

import logging

import numpy as np
import pytest

from krlslab import (
    ContractError,
    ZeroModel,
    brownian,
    build_grid_partition,
    cell_seed,
    direct_sum_kernel,
    eval_kernel,
    fit_distributed_average,
    fit_krls,
    fit_localized,
    fit_localized_nystrom,
    gaussian,
    polynomial,
    split_dataset,
)


def _data(n, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(0, 1, n)
    y = np.sin(6 * x) + 0.1 * rng.standard_normal(n)
    return x, y


def test_single_cell_matches_global_krls():
    x, y = _data(100)
    part = build_grid_partition((0.0, 1.0), 1)
    spec = gaussian(0.3)
    loc = fit_localized(x, y, part, 1e-2, spec)
    glob = fit_krls(x, y, 1e-2, spec)
    grid = np.linspace(0, 1, 97)
    np.testing.assert_allclose(loc.predict(grid), glob.predict(grid), atol=1e-10)


def test_locality_other_cells_bitwise_unchanged():
    # changing labels in one cell must not move predictions anywhere else,
    # not even in the last bit
    x, y = _data(200, seed=1)
    part = build_grid_partition((0.0, 1.0), 4)
    spec = gaussian(0.2)
    base = fit_localized(x, y, part, 1e-2, spec)

    from krlslab import assign

    labels = assign(part, x)
    y2 = y.copy()
    y2[labels == 2] += 5.0
    bumped = fit_localized(x, y2, part, 1e-2, spec)

    grid = np.linspace(0, 1, 400)
    glabels = assign(part, grid)
    outside = glabels != 2
    np.testing.assert_array_equal(
        base.predict(grid)[outside], bumped.predict(grid)[outside]
    )
    inside = ~outside
    assert np.all(base.predict(grid)[inside] != bumped.predict(grid)[inside])


def test_zero_extension_off_occupied_cell(caplog):
    part = build_grid_partition((0.0, 1.0), 4)
    x = np.array([0.1, 0.12, 0.2])  # only cell 0 occupied
    y = np.array([1.0, 1.1, 0.9])
    with caplog.at_level(logging.WARNING, logger="krlslab.localized"):
        model = fit_localized(x, y, part, 1e-3, gaussian(0.3))
    empty_warnings = [r for r in caplog.records if "empty" in r.getMessage()]
    assert len(empty_warnings) == 3
    assert sum(isinstance(m, ZeroModel) for m in model.local_models) == 3
    np.testing.assert_array_equal(
        model.predict(np.array([0.3, 0.6, 0.99])), np.zeros(3)
    )
    assert model.predict(0.1) != 0.0


def test_zero_labels_give_zero_predictor():
    x, _ = _data(60, seed=2)
    part = build_grid_partition((0.0, 1.0), 3)
    model = fit_localized(x, np.zeros(60), part, 1e-2, gaussian(0.3))
    np.testing.assert_allclose(model.predict(np.linspace(0, 1, 50)), 0.0, atol=1e-12)


def test_localized_nystrom_full_budget_matches_localized():
    x, y = _data(150, seed=3)
    part = build_grid_partition((0.0, 1.0), 3)
    spec = gaussian(0.25)
    exact = fit_localized(x, y, part, 1e-2, spec)
    # l larger than any cell count, so every cell runs at l_j = n_j
    approx = fit_localized_nystrom(x, y, part, 1e-2, 150, 7, spec)
    grid = np.linspace(0, 1, 123)
    np.testing.assert_allclose(approx.predict(grid), exact.predict(grid), atol=1e-8)


def test_localized_nystrom_single_cell_matches_krls():
    # polynomial kernel keeps the normal equations well conditioned, so the
    # full-budget subsampled fit tracks the exact solve tightly
    x, y = _data(80, seed=4)
    part = build_grid_partition((0.0, 1.0), 1)
    spec = polynomial(3, 1.0)
    approx = fit_localized_nystrom(x, y, part, 1e-2, 80, 11, spec)
    glob = fit_krls(x, y, 1e-2, spec)
    grid = np.linspace(0, 1, 61)
    np.testing.assert_allclose(approx.predict(grid), glob.predict(grid), atol=1e-8)


def test_localized_nystrom_deterministic():
    x, y = _data(120, seed=5)
    part = build_grid_partition((0.0, 1.0), 4)
    spec = gaussian(0.25)
    a = fit_localized_nystrom(x, y, part, 1e-2, 10, 42, spec)
    b = fit_localized_nystrom(x, y, part, 1e-2, 10, 42, spec)
    grid = np.linspace(0, 1, 77)
    np.testing.assert_array_equal(a.predict(grid), b.predict(grid))


def test_cell_seed_is_distinct_per_cell():
    assert cell_seed(9, 0) != cell_seed(9, 1)
    assert cell_seed([3, 4], 2) == [3, 4, 2]


def test_direct_sum_kernel_values():
    part = build_grid_partition((0.0, 1.0), 2)
    spec = brownian()
    # different cells: exactly zero
    assert direct_sum_kernel(part, spec, [0.5, 0.5], 0.2, 0.8) == 0.0
    # same cell: base value over the cell weight; min(0.5, 0.6)/0.25 = 2.0
    assert direct_sum_kernel(part, spec, [0.75, 0.25], 0.6, 0.5) == 2.0
    # single cell with weight one reduces to the base kernel
    whole = build_grid_partition((0.0, 1.0), 1)
    val = direct_sum_kernel(whole, spec, [1.0], 0.3, 0.7)
    assert val == eval_kernel(spec, 0.3, 0.7)


def test_direct_sum_kernel_contract_errors():
    part = build_grid_partition((0.0, 1.0), 2)
    spec = brownian()
    with pytest.raises(ContractError):
        direct_sum_kernel(part, spec, [0.0, 1.0], 0.2, 0.3)  # occupied, weight 0
    with pytest.raises(ContractError):
        direct_sum_kernel(part, spec, [0.5, 0.5, 0.0], 0.2, 0.3)
    with pytest.raises(ContractError):
        direct_sum_kernel(part, spec, [0.5, 0.5], np.array([0.1, 0.2]), 0.3)


def test_distributed_average_single_chunk_matches_krls():
    x, y = _data(70, seed=6)
    spec = gaussian(0.3)
    avg = fit_distributed_average(x, y, 1, 1e-2, spec, 5)
    glob = fit_krls(x, y, 1e-2, spec)
    grid = np.linspace(0, 1, 45)
    np.testing.assert_allclose(avg.predict(grid), glob.predict(grid), atol=1e-12)


def test_distributed_average_mean_of_chunks_oracle():
    x, y = _data(21, seed=7)
    spec = gaussian(0.3)
    seed = 13
    model = fit_distributed_average(x, y, 3, 1e-2, spec, seed)

    # oracle: replay the same permutation and average manual per-chunk fits
    perm = np.random.default_rng(seed).permutation(21)
    grid = np.linspace(0, 1, 33)
    preds = []
    for chunk in np.array_split(perm, 3):
        preds.append(fit_krls(x[chunk], y[chunk], 1e-2, spec).predict(grid))
    np.testing.assert_array_equal(model.predict(grid), np.mean(preds, axis=0))
    scalar = [fit_krls(x[c], y[c], 1e-2, spec).predict(0.5) for c in np.array_split(perm, 3)]
    assert model.predict(0.5) == float(np.mean(scalar))


def test_distributed_average_chunk_count_bounds():
    x, y = _data(10, seed=8)
    spec = gaussian(0.3)
    with pytest.raises(ContractError):
        fit_distributed_average(x, y, 11, 1e-2, spec, 0)
    with pytest.raises(ContractError):
        fit_distributed_average(x, y, 0, 1e-2, spec, 0)
    # m = n runs with one point per chunk
    model = fit_distributed_average(x, y, 10, 1e-2, spec, 0)
    assert len(model.models) == 10


def test_cellwise_error_decomposition():
    # grouping the squared errors by cell and reweighting by empirical cell
    # mass reproduces the pooled mean exactly
    from krlslab import NoiseSpec, cellwise_mse, sobolev_task

    task = sobolev_task(0.5, 1.0, NoiseSpec("gaussian", 0.1))
    x, y = _data(120, seed=9)
    part = build_grid_partition((0.0, 1.0), 4)
    model = fit_localized(x, y, part, 1e-2, gaussian(0.3))
    glob, per_cell, counts = cellwise_mse(model, task, part, 2000, seed=3)
    assert counts.sum() == 2000
    recombined = float(np.sum(per_cell * counts) / 2000)
    np.testing.assert_allclose(recombined, glob, rtol=1e-9)


def test_fit_error_carries_cell_index():
    part = build_grid_partition((0.0, 1.0), 2)
    x = np.array([0.1, 0.9])
    y = np.array([1.0, 2.0])
    good = gaussian(0.3)
    bad = gaussian(0.3, ((0.0, 1.0), (0.0, 1.0)))  # wrong dimension for cell 1
    with pytest.raises(ContractError, match="cell 1"):
        fit_localized(x, y, part, 1e-2, [good, bad])


def test_spec_list_length_mismatch():
    part = build_grid_partition((0.0, 1.0), 3)
    x = np.array([0.1, 0.5, 0.9])
    y = np.zeros(3)
    spec = gaussian(0.3)
    with pytest.raises(ContractError):
        fit_localized(x, y, part, 1e-2, [spec, spec])


def test_localized_nystrom_budget_validation():
    x, y = _data(30, seed=10)
    part = build_grid_partition((0.0, 1.0), 2)
    with pytest.raises(ContractError):
        fit_localized_nystrom(x, y, part, 1e-2, 0, 1, gaussian(0.3))
