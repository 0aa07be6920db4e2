"""Global kernel regularized least squares.

Fits the dual coefficients alpha = (K + lam * n * I)^{-1} y, which minimizes
(1/n) sum_i (f(x_i) - y_i)^2 + lam * |f|_H^2 over the kernel's RKHS.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels, linalg
from .exceptions import ContractError, EmptyInputError
from .kernels import KernelSpec


@dataclass(frozen=True)
class KrlsModel:
    """Fitted dual-form regressor: f(x) = sum_j alpha_j K(x_j, x)."""

    inputs: np.ndarray
    alpha: np.ndarray
    lam: float
    kernel: KernelSpec

    def predict(self, x):
        """Evaluate the fitted function. Scalar in, float out; array in, array out."""
        scalar = np.ndim(x) == 0 and self.kernel.dim == 1
        k = kernels.cross_gram(self.kernel, x, self.inputs)
        values = k @ self.alpha
        return float(values[0]) if scalar else values


def fit_krls(x, y, lam: float, spec: KernelSpec) -> KrlsModel:
    """Solve the regularized least-squares problem on (x, y).

    Parameters
    ----------
    x : array of inputs, shape (n,) or (n, d)
    y : array of labels, shape (n,)
    lam : regularization strength, must be positive
    spec : kernel to use

    The n-scaled shift lam * n comes from the 1/n weighting of the squared
    error in the objective.
    """
    if not lam > 0:
        raise ContractError("lam must be positive")
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise ContractError("labels must be a flat array")
    if y.shape[0] == 0:
        raise EmptyInputError("need at least one training point")
    pts = kernels._as_points(x, spec.dim)
    if pts.shape[0] != y.shape[0]:
        raise ContractError("inputs and labels disagree in length")
    k = kernels.gram(spec, pts)
    alpha = linalg.spd_solve(k, lam * y.shape[0], y)
    return KrlsModel(inputs=pts, alpha=alpha, lam=float(lam), kernel=spec)
