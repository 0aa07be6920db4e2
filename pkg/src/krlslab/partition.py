"""Domain partitions and dataset splitting.

Two schemes: axis-aligned grids over a box (cells are half-open on the
right, except the last cell per axis which is closed so the box is covered
exactly) and Voronoi cells around explicit centers (distance ties go to the
lowest center index).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ContractError, DomainError, EmptyInputError


@dataclass(frozen=True)
class Partition:
    """Description of a partition of a box into m indexed cells."""

    scheme: str
    box: tuple = field(default=None)
    cells_per_dim: tuple = field(default=None)
    centers: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.scheme == "grid":
            if self.box is None or self.cells_per_dim is None:
                raise ContractError("grid partition needs box and cells_per_dim")
            box = tuple((float(lo), float(hi)) for lo, hi in self.box)
            cells = tuple(int(c) for c in self.cells_per_dim)
            if len(box) != len(cells):
                raise ContractError("box and cells_per_dim disagree in dimension")
            for lo, hi in box:
                if not lo < hi:
                    raise ContractError(f"degenerate box interval ({lo}, {hi})")
            if any(c < 1 for c in cells):
                raise ContractError("need at least one cell per dimension")
            object.__setattr__(self, "box", box)
            object.__setattr__(self, "cells_per_dim", cells)
        elif self.scheme == "voronoi":
            if self.centers is None:
                raise ContractError("voronoi partition needs centers")
            centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
            if centers.shape[0] < 1:
                raise ContractError("voronoi partition needs at least one center")
            object.__setattr__(self, "centers", centers)
        else:
            raise ContractError(f"unknown partition scheme {self.scheme!r}")

    @property
    def m(self) -> int:
        if self.scheme == "grid":
            return int(np.prod(self.cells_per_dim))
        return self.centers.shape[0]

    @property
    def dim(self) -> int:
        if self.scheme == "grid":
            return len(self.box)
        return self.centers.shape[1]


def build_grid_partition(box, cells_per_dim) -> Partition:
    """Uniform grid over a box; cells_per_dim may be an int in one dimension."""
    box = tuple(box)
    if box and np.isscalar(box[0]):
        box = (box,)
    if np.isscalar(cells_per_dim):
        cells_per_dim = (int(cells_per_dim),) * len(box)
    return Partition(scheme="grid", box=box, cells_per_dim=tuple(cells_per_dim))


def build_voronoi_partition(centers) -> Partition:
    return Partition(scheme="voronoi", centers=np.asarray(centers, dtype=float))


def _as_points(partition: Partition, x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    d = partition.dim
    if arr.ndim == 0:
        arr = arr.reshape(1, 1) if d == 1 else None
        if arr is None:
            raise ContractError("scalar point in a multi-dimensional partition")
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1) if d == 1 else arr.reshape(1, d)
    if arr.shape[1] != d:
        raise ContractError(f"points have {arr.shape[1]} coordinates, expected {d}")
    return arr, scalar


def assign(partition: Partition, x):
    """Map points to cell indices.

    Grid cells are indexed in C order over the per-axis indices. Points
    outside the box raise DomainError. Voronoi assignment is nearest center
    in Euclidean distance, lowest index on ties.
    """
    pts, scalar = _as_points(partition, x)
    if partition.scheme == "grid":
        idx = np.zeros(pts.shape[0], dtype=int)
        for j, ((lo, hi), k) in enumerate(
            zip(partition.box, partition.cells_per_dim)
        ):
            col = pts[:, j]
            if col.min() < lo or col.max() > hi:
                raise DomainError(f"coordinate {j} outside box [{lo}, {hi}]")
            cell = np.floor((col - lo) / (hi - lo) * k).astype(int)
            np.clip(cell, 0, k - 1, out=cell)
            idx = idx * k + cell
    else:
        sq = ((pts[:, None, :] - partition.centers[None, :, :]) ** 2).sum(axis=2)
        idx = np.argmin(sq, axis=1)
    return int(idx[0]) if scalar else idx


def grid_cell_bounds(partition: Partition, j: int) -> tuple:
    """Bounds of grid cell j as a tuple of per-axis (low, high) pairs."""
    if partition.scheme != "grid":
        raise ContractError("cell bounds are only defined for grid partitions")
    if not 0 <= j < partition.m:
        raise ContractError(f"cell index {j} out of range")
    bounds = []
    rest = j
    for (lo, hi), k in zip(
        reversed(partition.box), reversed(partition.cells_per_dim)
    ):
        c = rest % k
        rest //= k
        width = (hi - lo) / k
        bounds.append((lo + c * width, lo + (c + 1) * width))
    return tuple(reversed(bounds))


@dataclass(frozen=True)
class CellStats:
    """Per-cell counts, empirical weights, and the original row indices.

    weights sums to exactly 1: the last entry is defined as one minus the
    sum of the others rather than by its own ratio.
    """

    counts: np.ndarray
    weights: np.ndarray
    index_sets: tuple

    @property
    def min_count(self) -> int:
        return int(self.counts.min())

    @property
    def empty_cells(self) -> np.ndarray:
        return np.flatnonzero(self.counts == 0)


def split_dataset(partition: Partition, x, y):
    """Split (x, y) by cell.

    Returns (stats, cells) where cells[j] = (x_j, y_j) holds cell j's rows in
    their original order. Empty cells get zero-length arrays. Concatenating
    the index sets in cell order and inverting recovers (x, y) exactly.
    """
    pts, _ = _as_points(partition, x)
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] != pts.shape[0]:
        raise ContractError("labels must be a flat array matching the inputs")
    if pts.shape[0] == 0:
        raise EmptyInputError("need at least one point to split")
    labels = assign(partition, pts)
    n = pts.shape[0]
    m = partition.m
    counts = np.bincount(labels, minlength=m)
    index_sets = tuple(np.flatnonzero(labels == j) for j in range(m))
    weights = counts / n
    weights[-1] = 1.0 - weights[:-1].sum()
    cells = [(pts[ix], y[ix]) for ix in index_sets]
    stats = CellStats(counts=counts, weights=weights, index_sets=index_sets)
    return stats, cells
