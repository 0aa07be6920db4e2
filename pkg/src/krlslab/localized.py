"""Partition-localized estimators and the distributed-averaging baseline.

A localized fit solves an independent KRLS problem on each cell's data with
the same regularization strength everywhere; the overall estimator is the
sum of the local ones, each extended by zero off its own cell, so a point is
always predicted by exactly the model of the cell it falls in. Empty cells
contribute the zero function.

The direct-sum view: the localized estimator is global KRLS under the kernel
K(x, z) = sum_j p_j^{-1} K_j(x, z) 1{x, z in cell j}, which vanishes across
cells. The cell weights appear only in that kernel identity; prediction
never divides by them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import kernels, partition as partition_mod
from .exceptions import ContractError, EmptyInputError
from .kernels import KernelSpec
from .krls import KrlsModel, fit_krls
from .nystrom import NystromModel, fit_nystrom
from .partition import CellStats, Partition

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ZeroModel:
    """Placeholder local model for an empty cell; predicts identically zero."""

    def predict(self, x):
        arr = np.asarray(x, dtype=float)
        if arr.ndim == 0:
            return 0.0
        return np.zeros(arr.shape[0])


@dataclass(frozen=True)
class LocalizedModel:
    """Sum of per-cell models, each zero-extended off its cell."""

    partition: Partition
    local_models: tuple
    lam: float
    cell_stats: CellStats

    def predict(self, x):
        pts, scalar = partition_mod._as_points(self.partition, x)
        labels = partition_mod.assign(self.partition, pts)
        out = np.zeros(pts.shape[0])
        for j in np.unique(labels):
            mask = labels == j
            out[mask] = self.local_models[j].predict(pts[mask])
        return float(out[0]) if scalar else out


@dataclass(frozen=True)
class DistributedAverageModel:
    """Uniform average of independent KRLS fits on disjoint random chunks."""

    models: tuple
    lam: float
    kernel: KernelSpec
    seed: object

    def predict(self, x):
        preds = [model.predict(x) for model in self.models]
        if np.ndim(preds[0]) == 0:
            return float(np.mean(preds))
        return np.mean(preds, axis=0)


def _spec_list(specs, m: int) -> list:
    """Accept one KernelSpec for all cells or a sequence of exactly m."""
    if isinstance(specs, KernelSpec):
        return [specs] * m
    specs = list(specs)
    if len(specs) != m:
        raise ContractError(f"got {len(specs)} kernel specs for {m} cells")
    return specs


def _tag_cell(exc: Exception, j: int):
    """Prefix a propagating fit error with the offending cell index."""
    head = exc.args[0] if exc.args else str(exc)
    exc.args = (f"cell {j}: {head}",) + tuple(exc.args[1:])


def fit_localized(x, y, part: Partition, lam: float, specs) -> LocalizedModel:
    """Fit one KRLS model per cell, all with the same lam.

    Each cell's solve shifts by lam times its own point count, matching the
    1/n_j weighting of the local objective. Empty cells are allowed and get
    a zero model plus a logged warning.
    """
    stats, cells = partition_mod.split_dataset(part, x, y)
    spec_list = _spec_list(specs, part.m)
    local = []
    for j, (xj, yj) in enumerate(cells):
        if xj.shape[0] == 0:
            logger.warning("cell %d is empty; using the zero model", j)
            local.append(ZeroModel())
        else:
            try:
                local.append(fit_krls(xj, yj, lam, spec_list[j]))
            except Exception as exc:
                _tag_cell(exc, j)
                raise
    return LocalizedModel(
        partition=part, local_models=tuple(local), lam=float(lam), cell_stats=stats
    )


def cell_seed(seed, j: int) -> list:
    """Entropy list for cell j derived from the fit seed; order-independent."""
    if isinstance(seed, (list, tuple)):
        return [int(s) for s in seed] + [int(j)]
    return [int(seed), int(j)]


def fit_localized_nystrom(
    x, y, part: Partition, lam: float, l: int, seed, specs
) -> LocalizedModel:
    """Per-cell Nystrom fits with a shared landmark budget l.

    Cells with fewer than l points fall back to l' = n_j landmarks (logged).
    Each cell draws landmarks from its own seed, derived from (seed, j), so
    results do not depend on cell processing order.
    """
    if not int(l) >= 1:
        raise ContractError("landmark budget l must be at least 1")
    stats, cells = partition_mod.split_dataset(part, x, y)
    spec_list = _spec_list(specs, part.m)
    local = []
    for j, (xj, yj) in enumerate(cells):
        nj = xj.shape[0]
        if nj == 0:
            logger.warning("cell %d is empty; using the zero model", j)
            local.append(ZeroModel())
            continue
        lj = int(l)
        if nj < lj:
            logger.info("cell %d has %d points; capping landmarks at %d", j, nj, nj)
            lj = nj
        try:
            local.append(
                fit_nystrom(xj, yj, lam, lj, cell_seed(seed, j), spec_list[j])
            )
        except Exception as exc:
            _tag_cell(exc, j)
            raise
    return LocalizedModel(
        partition=part, local_models=tuple(local), lam=float(lam), cell_stats=stats
    )


def direct_sum_kernel(part: Partition, specs, weights, x, z) -> float:
    """Evaluate the weighted direct-sum kernel at a pair of points.

    Zero when the points fall in different cells; p_j^{-1} K_j(x, z) when
    both lie in cell j. A nonpositive weight on an occupied cell is a
    contract violation (the direct-sum kernel is undefined there).
    """
    spec_list = _spec_list(specs, part.m)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (part.m,):
        raise ContractError("need one weight per cell")
    jx_arr = np.atleast_1d(partition_mod.assign(part, x))
    jz_arr = np.atleast_1d(partition_mod.assign(part, z))
    if jx_arr.size != 1 or jz_arr.size != 1:
        raise ContractError("direct_sum_kernel takes single points")
    jx, jz = int(jx_arr[0]), int(jz_arr[0])
    if jx != jz:
        return 0.0
    if not weights[jx] > 0:
        raise ContractError(f"cell {jx} is occupied but has weight {weights[jx]}")
    return kernels.eval_kernel(spec_list[jx], x, z) / weights[jx]


def fit_distributed_average(
    x, y, m: int, lam: float, spec: KernelSpec, seed
) -> DistributedAverageModel:
    """Split the data into m random near-equal chunks and average KRLS fits.

    Chunk sizes differ by at most one when m does not divide n. Requires
    m <= n so every chunk is nonempty.
    """
    y = np.asarray(y, dtype=float)
    pts = kernels._as_points(x, spec.dim)
    n = pts.shape[0]
    if n == 0:
        raise EmptyInputError("need at least one training point")
    if y.shape != (n,):
        raise ContractError("labels must be a flat array matching the inputs")
    if not 1 <= int(m) <= n:
        raise ContractError(f"chunk count m={m} must satisfy 1 <= m <= n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    models = []
    for chunk in np.array_split(perm, int(m)):
        models.append(fit_krls(pts[chunk], y[chunk], lam, spec))
    return DistributedAverageModel(
        models=tuple(models), lam=float(lam), kernel=spec, seed=seed
    )
