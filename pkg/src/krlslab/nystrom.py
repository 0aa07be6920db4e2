"""Nystrom-subsampled kernel regularized least squares.

Restricts the KRLS search space to the span of l landmark points drawn
uniformly without replacement from the training inputs. The coefficients
solve the explicit normal equations

    (K_nl^T K_nl + n * lam * K_ll) alpha = K_nl^T y

through an eigenvalue-truncated pseudo-inverse, so rank-deficient landmark
sets (duplicate coordinates, l near the numerical rank) stay well defined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels, linalg
from .exceptions import ContractError, EmptyInputError
from .kernels import KernelSpec


@dataclass(frozen=True)
class NystromModel:
    """Dual-form regressor on landmark points: f(x) = sum_j alpha_j K(z_j, x)."""

    landmarks: np.ndarray
    landmark_indices: np.ndarray
    alpha: np.ndarray
    lam: float
    kernel: KernelSpec
    seed: object

    def predict(self, x):
        scalar = np.ndim(x) == 0 and self.kernel.dim == 1
        k = kernels.cross_gram(self.kernel, x, self.landmarks)
        values = k @ self.alpha
        return float(values[0]) if scalar else values


def sample_landmarks(n: int, l: int, seed) -> np.ndarray:
    """Draw l indices from range(n) uniformly without replacement.

    Deterministic in the seed; every size-l subset is equally likely.
    """
    if n < 1:
        raise EmptyInputError("need at least one point to sample from")
    if not 1 <= l <= n:
        raise ContractError(f"landmark count l={l} must satisfy 1 <= l <= n={n}")
    rng = np.random.default_rng(seed)
    return rng.choice(n, size=l, replace=False)


def fit_nystrom(x, y, lam: float, l: int, seed, spec: KernelSpec) -> NystromModel:
    """Fit the landmark-restricted regressor.

    Parameters
    ----------
    x, y : training data
    lam : regularization strength, positive
    l : number of landmarks, 1 <= l <= n
    seed : RNG seed for the landmark draw, recorded on the model
    spec : kernel

    With l = n and a numerically positive definite Gram this reproduces the
    full KRLS solution, since the search spaces coincide.
    """
    if not lam > 0:
        raise ContractError("lam must be positive")
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise ContractError("labels must be a flat array")
    if y.shape[0] == 0:
        raise EmptyInputError("need at least one training point")
    pts = kernels._as_points(x, spec.dim)
    n = pts.shape[0]
    if n != y.shape[0]:
        raise ContractError("inputs and labels disagree in length")
    idx = sample_landmarks(n, l, seed)
    landmarks = pts[idx]
    k_nl = kernels.cross_gram(spec, pts, landmarks)
    k_ll = kernels.gram(spec, landmarks)
    b = k_nl.T @ k_nl + n * lam * k_ll
    # The product can pick up asymmetry at machine precision; mirror it away.
    b = 0.5 * (b + b.T)
    alpha = linalg.pinv_solve(b, k_nl.T @ y)
    return NystromModel(
        landmarks=landmarks,
        landmark_indices=idx,
        alpha=alpha,
        lam=float(lam),
        kernel=spec,
        seed=seed,
    )
