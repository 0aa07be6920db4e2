"""Dense symmetric linear algebra with explicit numerical contracts.

Thin wrappers over scipy that pin down the behaviors the rest of the
package relies on: eigendecompositions come back sorted descending,
shifted SPD solves retry once with a fixed-size jitter before giving up,
and pseudo-inverse solves truncate at a relative eigenvalue tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import ContractError, IllConditionedError

SYMMETRY_RTOL = 1e-10
RESIDUAL_RTOL = 1e-10
JITTER_SCALE = 1e-12
PINV_RTOL = 1e-10


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted descending; eigenvectors[:, i] pairs with eigenvalues[i]."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _require_symmetric(a: np.ndarray, op: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractError(f"{op} needs a square matrix, got shape {a.shape}")
    norm = np.linalg.norm(a)
    gap = np.abs(a - a.T).max() if a.size else 0.0
    if gap > SYMMETRY_RTOL * max(norm, np.finfo(float).tiny):
        raise ContractError(
            f"{op} needs a symmetric matrix; asymmetry {gap:.3e} exceeds "
            f"{SYMMETRY_RTOL:.0e} * frobenius norm {norm:.3e}"
        )
    return a


def eigh(a: np.ndarray) -> EigenDecomposition:
    """Full symmetric eigendecomposition, eigenvalues descending."""
    a = _require_symmetric(a, "eigh")
    w, v = scipy.linalg.eigh(a)
    return EigenDecomposition(w[::-1].copy(), v[:, ::-1].copy())


def spd_solve(a: np.ndarray, shift: float, b: np.ndarray) -> np.ndarray:
    """Solve (a + shift * I) x = b by Cholesky with one jitter retry.

    Parameters
    ----------
    a : symmetric positive semidefinite matrix
    shift : nonnegative diagonal shift
    b : right-hand side, vector or matrix

    Raises
    ------
    IllConditionedError
        If factorization (or the residual check) still fails after adding a
        diagonal jitter of 1e-12 * trace(a) / n. The jitter used is attached
        to the exception.
    """
    a = _require_symmetric(a, "spd_solve")
    if shift < 0:
        raise ContractError("shift must be nonnegative")
    b = np.asarray(b, dtype=float)
    if b.shape[0] != a.shape[0]:
        raise ContractError("right-hand side length does not match matrix")
    n = a.shape[0]
    jitter = JITTER_SCALE * float(np.trace(a)) / n
    m = a + shift * np.eye(n)
    b_norm = np.linalg.norm(b)

    def attempt(mat):
        factor = scipy.linalg.cho_factor(mat, lower=True, check_finite=False)
        x = scipy.linalg.cho_solve(factor, b, check_finite=False)
        residual = np.linalg.norm(mat @ x - b)
        if residual > RESIDUAL_RTOL * max(b_norm, np.finfo(float).tiny):
            raise np.linalg.LinAlgError("residual above tolerance")
        return x

    try:
        return attempt(m)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
        pass
    try:
        return attempt(m + jitter * np.eye(n))
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise IllConditionedError(
            f"shifted solve failed even with diagonal jitter {jitter:.3e}: {exc}",
            jitter=jitter,
        ) from exc


def pinv_solve(a: np.ndarray, b: np.ndarray, rel_tol: float = PINV_RTOL) -> np.ndarray:
    """Least-squares solve a x = b through a truncated eigendecomposition.

    Eigenvalues at or below rel_tol times the largest eigenvalue are dropped.
    An all-zero matrix yields the zero solution rather than an error.
    """
    if rel_tol <= 0:
        raise ContractError("rel_tol must be positive")
    dec = eigh(a)
    b = np.asarray(b, dtype=float)
    if b.shape[0] != a.shape[0]:
        raise ContractError("right-hand side length does not match matrix")
    w, v = dec.eigenvalues, dec.eigenvectors
    top = w[0] if w.size else 0.0
    if top <= 0.0:
        return np.zeros_like(b)
    keep = w > rel_tol * top
    vk = v[:, keep]
    coeffs = (vk.T @ b).T / w[keep]
    return vk @ coeffs.T
