"""Synthetic regression tasks with known smoothness and capacity.

The reference kernel is the brownian (min) kernel, whose Mercer expansion
on the uniform measure over [0, 1] is closed form:

    mu_k = ((k - 1/2) pi)^{-2},   phi_k(x) = sqrt(2) sin((k - 1/2) pi x).

Eigenvalue decay k^{-2} gives capacity gamma = 1/2. Targets are finite
Mercer expansions whose coefficients are scaled to hit a prescribed
source-condition norm exactly, so the smoothness r of a task is known
rather than assumed. Piecewise targets rebuild the expansion inside each
grid cell (origin shifted to the cell, eigenvalues scaled by cell width)
with a rough exponent on a designated exceptional set of cells; continuity
across cell boundaries is deliberately not enforced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import partition as partition_mod
from .exceptions import ContractError, EmptyInputError
from .kernels import KernelSpec, brownian
from .partition import Partition, grid_cell_bounds
from .theory import ModelParams, lambda_schedule

COEFF_SLACK = 0.51  # extra k^{-slack} decay so the defining series converges strictly
DEFAULT_K_TRUNC = 200
_TAIL_TERMS = 200_000


def mercer_eigenvalues(k_trunc: int) -> np.ndarray:
    """First k_trunc eigenvalues ((k - 1/2) pi)^{-2} of the min kernel."""
    k = np.arange(1, k_trunc + 1)
    return ((k - 0.5) * np.pi) ** -2.0


def _profile(mu: np.ndarray, r: float) -> np.ndarray:
    """Unnormalized coefficient profile mu_k^{r + 1/2} k^{-slack}."""
    k = np.arange(1, mu.shape[0] + 1)
    return mu ** (r + 0.5) * k ** (-COEFF_SLACK)


def _source_scale(mu: np.ndarray, r: float, target_sq: float) -> float:
    """Scale a so that sum (a c_k)^2 mu_k^{-2r} = target_sq for the profile."""
    raw = _profile(mu, r)
    total = float(np.sum(raw * raw * mu ** (-2.0 * r)))
    return math.sqrt(target_sq / total)


def _tail_sup_bound(r: float, scale: float, k_trunc: int, width: float = 1.0) -> float:
    """Sup-norm of the discarded series tail, summed numerically far out."""
    k = np.arange(k_trunc + 1, k_trunc + 1 + _TAIL_TERMS)
    mu = (width * ((k - 0.5) * np.pi) ** -2.0)
    return float(math.sqrt(2.0) * scale * np.sum(mu ** (r + 0.5) * k ** (-COEFF_SLACK)))


@dataclass(frozen=True)
class SobolevTarget:
    """Finite Mercer expansion sum_k c_k sqrt(2) sin((k-1/2) pi x) on [0, 1]."""

    r: float
    R: float
    coefficients: np.ndarray
    truncation_sup_error: float

    @property
    def k_trunc(self) -> int:
        return self.coefficients.shape[0]

    def source_sum(self) -> float:
        """sum c_k^2 mu_k^{-2r}; equals R^2 by construction."""
        mu = mercer_eigenvalues(self.k_trunc)
        return float(np.sum(self.coefficients**2 * mu ** (-2.0 * self.r)))

    def __call__(self, x):
        xs = np.asarray(x, dtype=float).reshape(-1)
        k = np.arange(1, self.k_trunc + 1)
        basis = math.sqrt(2.0) * np.sin(np.outer(xs, (k - 0.5) * np.pi))
        return basis @ self.coefficients


def make_sobolev_target(
    r: float, R: float, k_trunc: int = DEFAULT_K_TRUNC
) -> SobolevTarget:
    """Target of exact source norm R with smoothness exponent r.

    Coefficients follow c_k = a * mu_k^{r + 1/2} * k^{-0.51}; the 0.51
    keeps the defining series strictly summable, and a is chosen so that
    sum c_k^2 mu_k^{-2r} = R^2 exactly.
    """
    if not 0 < r <= 0.5:
        raise ContractError(f"r={r} must lie in (0, 1/2]")
    if not R > 0:
        raise ContractError("R must be positive")
    if k_trunc < 1:
        raise ContractError("k_trunc must be at least 1")
    mu = mercer_eigenvalues(k_trunc)
    scale = _source_scale(mu, r, R * R)
    coeffs = scale * _profile(mu, r)
    tail = _tail_sup_bound(r, scale, k_trunc)
    return SobolevTarget(
        r=float(r), R=float(R), coefficients=coeffs, truncation_sup_error=tail
    )


@dataclass(frozen=True)
class PiecewiseTarget:
    """Cellwise Mercer expansions on a 1-d grid; rough on the exceptional set.

    Inside cell j = [a, a + w) the basis is sqrt(2) sin((k-1/2) pi (x-a)/w)
    and the local eigenvalues are w * mu_k, so each piece has an exact local
    source norm (R_l on exceptional cells, R_h elsewhere).
    """

    r_l: float
    r_h: float
    R_l: float
    R_h: float
    partition: Partition
    exceptional: frozenset
    cell_coefficients: tuple
    truncation_sup_error: float

    @property
    def k_trunc(self) -> int:
        return self.cell_coefficients[0].shape[0]

    def cell_smoothness(self, j: int) -> float:
        return self.r_l if j in self.exceptional else self.r_h

    def source_sums(self) -> np.ndarray:
        """Per-cell sum c_k^2 (w mu_k)^{-2 r_j}; equals R_j^2 by construction."""
        out = np.empty(self.partition.m)
        mu = mercer_eigenvalues(self.k_trunc)
        for j, coeffs in enumerate(self.cell_coefficients):
            (lo, hi), = grid_cell_bounds(self.partition, j)
            local_mu = (hi - lo) * mu
            rj = self.cell_smoothness(j)
            out[j] = float(np.sum(coeffs**2 * local_mu ** (-2.0 * rj)))
        return out

    def exceptional_mass(self) -> float:
        """Marginal mass of the exceptional cells under the uniform measure."""
        width = 0.0
        for j in self.exceptional:
            (lo, hi), = grid_cell_bounds(self.partition, j)
            width += hi - lo
        (blo, bhi), = self.partition.box
        return width / (bhi - blo)

    def __call__(self, x):
        xs = np.asarray(x, dtype=float).reshape(-1)
        labels = partition_mod.assign(self.partition, xs)
        out = np.zeros(xs.shape[0])
        k = np.arange(1, self.k_trunc + 1)
        for j in np.unique(labels):
            mask = labels == j
            (lo, hi), = grid_cell_bounds(self.partition, int(j))
            local = (xs[mask] - lo) / (hi - lo)
            basis = math.sqrt(2.0) * np.sin(np.outer(local, (k - 0.5) * np.pi))
            out[mask] = basis @ self.cell_coefficients[j]
        return out


def make_piecewise_target(
    r_l: float,
    r_h: float,
    R_l: float,
    R_h: float,
    part: Partition,
    exceptional,
    k_trunc: int = DEFAULT_K_TRUNC,
) -> PiecewiseTarget:
    """Two-smoothness target: exponent r_l on the cells in ``exceptional``,
    r_h on the rest, each piece built natively in its cell's local expansion.
    """
    for name, val in (("r_l", r_l), ("r_h", r_h)):
        if not 0 < val <= 0.5:
            raise ContractError(f"{name}={val} must lie in (0, 1/2]")
    if not (R_l > 0 and R_h > 0):
        raise ContractError("R_l and R_h must be positive")
    if part.scheme != "grid" or part.dim != 1:
        raise ContractError("piecewise targets need a one-dimensional grid partition")
    exceptional = frozenset(int(j) for j in exceptional)
    for j in exceptional:
        if not 0 <= j < part.m:
            raise ContractError(f"exceptional cell {j} out of range")
    mu = mercer_eigenvalues(k_trunc)
    coeffs = []
    worst_tail = 0.0
    for j in range(part.m):
        (lo, hi), = grid_cell_bounds(part, j)
        w = hi - lo
        rj = r_l if j in exceptional else r_h
        rr = R_l if j in exceptional else R_h
        local_mu = w * mu
        raw = _profile(local_mu, rj)
        total = float(np.sum(raw * raw * local_mu ** (-2.0 * rj)))
        scale = math.sqrt(rr * rr / total)
        coeffs.append(scale * raw)
        worst_tail = max(worst_tail, _tail_sup_bound(rj, scale, k_trunc, width=w))
    return PiecewiseTarget(
        r_l=float(r_l),
        r_h=float(r_h),
        R_l=float(R_l),
        R_h=float(R_h),
        partition=part,
        exceptional=exceptional,
        cell_coefficients=tuple(coeffs),
        truncation_sup_error=worst_tail,
    )


@dataclass(frozen=True)
class NoiseSpec:
    """Label noise: gaussian(sigma) or uniform_bounded(M), both Bernstein-class."""

    kind: str
    scale: float

    def __post_init__(self):
        if self.kind not in ("gaussian", "uniform_bounded"):
            raise ContractError(f"unknown noise kind {self.kind!r}")
        if self.scale < 0:
            raise ContractError("noise scale must be nonnegative")


@dataclass(frozen=True)
class SyntheticTask:
    """A fully specified regression problem with known regularity.

    The marginal is uniform on an interval (the full kernel domain by
    default; a subinterval is allowed and changes only where inputs fall,
    not the target or the kernel). The source-condition bound of the target
    is verified at construction.
    """

    target: object
    noise: NoiseSpec
    kernel: KernelSpec = field(default_factory=brownian)
    gamma: float = 0.5
    marginal: tuple = ("uniform", 0.0, 1.0)

    def __post_init__(self):
        kind, lo, hi = self.marginal
        if kind != "uniform" or not float(lo) < float(hi):
            raise ContractError(f"unsupported marginal {self.marginal!r}")
        object.__setattr__(self, "marginal", (kind, float(lo), float(hi)))
        if not 0 < self.gamma <= 1:
            raise ContractError("gamma must lie in (0, 1]")
        if isinstance(self.target, SobolevTarget):
            got = self.target.source_sum()
            want = self.target.R**2
            if got > want * (1 + 1e-10) or abs(got - want) > 1e-10 * want:
                raise ContractError(
                    f"target source sum {got!r} violates the bound R^2 = {want!r}"
                )
        if isinstance(self.target, PiecewiseTarget):
            sums = self.target.source_sums()
            wants = np.where(
                np.isin(
                    np.arange(self.target.partition.m),
                    np.asarray(sorted(self.target.exceptional), dtype=int),
                ),
                self.target.R_l**2,
                self.target.R_h**2,
            )
            if np.any(np.abs(sums - wants) > 1e-10 * wants):
                raise ContractError("a cell's source sum misses its bound")

    def model_params(self) -> ModelParams:
        """Schedule inputs implied by the task."""
        sigma = self.noise.scale if self.noise.scale > 0 else 1.0
        m_bound = self.noise.scale if self.noise.kind == "uniform_bounded" else sigma
        if isinstance(self.target, PiecewiseTarget):
            return ModelParams(
                r=self.target.r_h,
                gamma=self.gamma,
                R=max(self.target.R_l, self.target.R_h),
                sigma=sigma,
                M=max(m_bound, 1e-12),
                r_l=self.target.r_l,
                r_h=self.target.r_h,
            )
        return ModelParams(
            r=self.target.r,
            gamma=self.gamma,
            R=self.target.R,
            sigma=sigma,
            M=max(m_bound, 1e-12),
        )

    def exceptional_mass_bound(self, n_max: int) -> tuple:
        """Assumption check for two-smoothness tasks at the largest n.

        Returns (mass, bound, ok) with bound = (R_h/R_l)^2 * lam^{2(r_h-r_l)}
        where lam is the r_h schedule value at n_max.
        """
        if not isinstance(self.target, PiecewiseTarget):
            raise ContractError("exceptional mass is defined for piecewise targets")
        params = self.model_params()
        lam = lambda_schedule(n_max, params, r=self.target.r_h)
        bound = (self.target.R_h / self.target.R_l) ** 2 * lam ** (
            2.0 * (self.target.r_h - self.target.r_l)
        )
        mass = self.target.exceptional_mass()
        return mass, bound, mass <= bound


def sobolev_task(
    r: float,
    R: float,
    noise: NoiseSpec,
    marginal: tuple = ("uniform", 0.0, 1.0),
    k_trunc: int = DEFAULT_K_TRUNC,
) -> SyntheticTask:
    """Brownian-kernel task with a Sobolev-type target of smoothness r."""
    return SyntheticTask(
        target=make_sobolev_target(r, R, k_trunc), noise=noise, marginal=marginal
    )


def piecewise_task(
    r_l: float,
    r_h: float,
    R_l: float,
    R_h: float,
    cells: int,
    exceptional,
    noise: NoiseSpec,
    marginal: tuple = ("uniform", 0.0, 1.0),
    k_trunc: int = DEFAULT_K_TRUNC,
) -> SyntheticTask:
    """Brownian-kernel task with a two-smoothness target on a uniform grid."""
    part = partition_mod.build_grid_partition(((0.0, 1.0),), cells)
    target = make_piecewise_target(r_l, r_h, R_l, R_h, part, exceptional, k_trunc)
    return SyntheticTask(target=target, noise=noise, marginal=marginal)


def gen_inputs(task: SyntheticTask, n: int, seed) -> np.ndarray:
    """n i.i.d. draws from the task marginal; deterministic per seed."""
    if n < 1:
        raise EmptyInputError("need at least one draw")
    _, lo, hi = task.marginal
    rng = np.random.default_rng(seed)
    return lo + (hi - lo) * rng.random(n)


def sample_labels(task: SyntheticTask, x, seed) -> np.ndarray:
    """y_i = f(x_i) + noise_i with the task's noise law."""
    xs = np.asarray(x, dtype=float).reshape(-1)
    rng = np.random.default_rng(seed)
    clean = task.target(xs)
    if task.noise.scale == 0:
        return clean
    if task.noise.kind == "gaussian":
        return clean + task.noise.scale * rng.standard_normal(xs.shape[0])
    return clean + rng.uniform(-task.noise.scale, task.noise.scale, xs.shape[0])


def _call_predictor(predictor, xs):
    if hasattr(predictor, "predict"):
        return np.asarray(predictor.predict(xs), dtype=float).reshape(-1)
    return np.asarray(predictor(xs), dtype=float).reshape(-1)


def mise_estimate(predictor, task: SyntheticTask, n_test: int, seed) -> float:
    """Monte Carlo squared L2(marginal) error against the true target.

    Fresh test draws come from the task marginal; the estimate is the mean
    of (prediction - truth)^2 over them.
    """
    if n_test < 1:
        raise ContractError("n_test must be at least 1")
    xs = gen_inputs(task, n_test, seed)
    truth = task.target(xs)
    pred = _call_predictor(predictor, xs)
    diff = pred - truth
    return float(diff @ diff / n_test)


def cellwise_mse(predictor, task: SyntheticTask, part: Partition, n_test: int, seed):
    """Split the test error by cell.

    Returns (global_mse, per_cell_mse, per_cell_counts). The weighted sum
    sum_j (count_j / n_test) * mse_j reproduces the global value exactly
    (it is the same sample, merely grouped).
    """
    if n_test < 1:
        raise ContractError("n_test must be at least 1")
    xs = gen_inputs(task, n_test, seed)
    truth = task.target(xs)
    pred = _call_predictor(predictor, xs)
    sq = (pred - truth) ** 2
    labels = partition_mod.assign(part, xs)
    counts = np.bincount(labels, minlength=part.m)
    sums = np.bincount(labels, weights=sq, minlength=part.m)
    per_cell = np.divide(
        sums, counts, out=np.zeros(part.m), where=counts > 0
    )
    return float(np.mean(sq)), per_cell, counts
