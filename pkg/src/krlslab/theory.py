"""Parameter schedules and spectral diagnostics.

Schedules map the sample size n to regularization strength, cell count,
and landmark count for a problem described by :class:`ModelParams`
(smoothness r, capacity gamma, norms R, sigma, M). All constant factors
are exactly 1, so slope measurements downstream are constant-free.

Diagnostics: empirical effective dimension of a Gram matrix, the
finite-sample inflation factor b_quantity, a sufficient-n calculator, and
the exact identity relating local effective dimensions to the global one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import ContractError


@dataclass(frozen=True)
class ModelParams:
    """Regularity and noise description of a learning problem.

    r is the smoothness exponent, gamma the capacity exponent (eigenvalue
    decay), R the target norm bound, sigma and M the noise scales. For
    two-smoothness problems the pair (r_l, r_h) brackets the rough and
    smooth regimes; r then plays no role in scheduling.
    """

    r: float
    gamma: float
    R: float = 1.0
    sigma: float = 1.0
    M: float = 1.0
    r_l: float | None = None
    r_h: float | None = None

    def __post_init__(self):
        if not 0 < self.r <= 0.5:
            raise ContractError(f"r={self.r} must lie in (0, 1/2]")
        if not 0 < self.gamma <= 1:
            raise ContractError(f"gamma={self.gamma} must lie in (0, 1]")
        for name in ("R", "sigma", "M"):
            if not getattr(self, name) > 0:
                raise ContractError(f"{name} must be positive")
        if (self.r_l is None) != (self.r_h is None):
            raise ContractError("r_l and r_h must be given together")
        if self.r_l is not None:
            if not 0 < self.r_l < self.r_h <= 0.5:
                raise ContractError(
                    f"need 0 < r_l < r_h <= 1/2, got r_l={self.r_l}, r_h={self.r_h}"
                )

    def smoothness(self, r: float | None = None) -> float:
        """Scheduling smoothness: explicit r wins, else r_h when present, else r."""
        if r is not None:
            if not 0 < r <= 0.5:
                raise ContractError(f"override r={r} must lie in (0, 1/2]")
            return float(r)
        if self.r_h is not None:
            return self.r_h
        return self.r


def _power(n: int, num: float, den: float) -> float:
    """n^(num/den) through log2, exact when everything lands on dyadics."""
    return 2.0 ** (math.log2(n) * num / den)


_SNAP = 1e-9


def _snap_floor(x: float) -> int:
    """floor that treats values within a hair of an integer as that integer."""
    nearest = round(x)
    if abs(x - nearest) <= _SNAP * max(1.0, abs(x)):
        return int(nearest)
    return math.floor(x)


def _snap_ceil(x: float) -> int:
    nearest = round(x)
    if abs(x - nearest) <= _SNAP * max(1.0, abs(x)):
        return int(nearest)
    return math.ceil(x)


def lambda_schedule(
    n: int, params: ModelParams, r: float | None = None, noise_scaled: bool = False
) -> float:
    """Regularization strength n^{-1/(2r+1+gamma)}, capped at 1.

    With ``noise_scaled`` the base 1/n becomes sigma^2/(R^2 n), a variant
    useful when the noise-to-signal ratio is far from 1; the default is the
    pure-n form. The optional r overrides the schedule smoothness (used to
    compare schedules on two-smoothness problems).
    """
    if n < 1:
        raise ContractError("n must be at least 1")
    rr = params.smoothness(r)
    den = 2 * rr + 1 + params.gamma
    value = _power(n, -1.0, den)
    if noise_scaled:
        # factored so sigma = R reduces exactly to the pure-n schedule
        value *= (params.sigma / params.R) ** (2.0 / den)
    return min(1.0, value)


def m_schedule(n: int, params: ModelParams, r: float | None = None) -> int:
    """Cell count floor(n^{2r/(2r+1+gamma)}), at least 1.

    Powers within 1e-9 of an integer count as exact before flooring, so
    grid sizes like 1024^0.4 = 16 do not slip to 15 through roundoff.
    """
    if n < 1:
        raise ContractError("n must be at least 1")
    rr = params.smoothness(r)
    return max(1, _snap_floor(_power(n, 2 * rr, 2 * rr + 1 + params.gamma)))


def l_schedule(n: int, params: ModelParams, r: float | None = None) -> int:
    """Landmark count ceil(n^{(1+gamma)/(2r+1+gamma)}), with the same
    near-integer snapping as m_schedule before the ceiling."""
    if n < 1:
        raise ContractError("n must be at least 1")
    rr = params.smoothness(r)
    return max(1, _snap_ceil(_power(n, 1 + params.gamma, 2 * rr + 1 + params.gamma)))


def rate_exponent(params: ModelParams, r: float | None = None) -> float:
    """Predicted MISE decay exponent (2r+1)/(2r+1+gamma).

    The expected log-log slope of MISE against n is the negative of this.
    Strictly decreasing in gamma at fixed r.
    """
    rr = params.smoothness(r)
    return (2 * rr + 1) / (2 * rr + 1 + params.gamma)


def effective_dimension(
    k: np.ndarray,
    lam: float,
    normalize_kappa: bool = False,
    kappa_sq: float = 1.0,
) -> float:
    """Empirical effective dimension sum_i mu_i / (mu_i + lam).

    mu_i are the eigenvalues of c * K / n with c = 1, or c = 1 / kappa_sq
    when ``normalize_kappa`` is set (the convention that folds the kernel
    bound into the operator). Negative eigenvalues from roundoff are
    clipped to zero, so the result is bounded by rank(K).
    """
    if not lam > 0:
        raise ContractError("lam must be positive")
    k = np.asarray(k, dtype=float)
    n = k.shape[0]
    scale = 1.0 / n
    if normalize_kappa:
        if not kappa_sq > 0:
            raise ContractError("kappa_sq must be positive")
        scale /= kappa_sq
    mu = linalg.eigh(k * scale).eigenvalues
    mu = np.maximum(mu, 0.0)
    return float(np.sum(mu / (mu + lam)))


def effective_dimension_from_spectrum(mu, lam: float) -> float:
    """Effective dimension of an operator given its eigenvalues directly."""
    if not lam > 0:
        raise ContractError("lam must be positive")
    mu = np.maximum(np.asarray(mu, dtype=float), 0.0)
    return float(np.sum(mu / (mu + lam)))


def b_quantity(n: int, lam: float, eff_dim: float) -> float:
    """Finite-sample inflation factor 1 + (2/(n lam) + sqrt(N/(n lam)))^2.

    Approaches 1 from above as n lam grows; always at least 1.
    """
    if n < 1:
        raise ContractError("n must be at least 1")
    if not lam > 0:
        raise ContractError("lam must be positive")
    if eff_dim < 0:
        raise ContractError("eff_dim must be nonnegative")
    t = 2.0 / (n * lam) + math.sqrt(eff_dim / (n * lam))
    return 1.0 + t * t


def n0_sufficient(m: int, params: ModelParams, p_max: float, c_gamma: float) -> int:
    """Sufficient sample size for m cells, rounded up.

    (4m)^{(2r+gamma+1)/(2r)} * max((R/sigma)^{2/(2r+gamma)},
    (p_max*C_gamma)^{(2r+gamma+1)/(2r)} * (R/sigma)^{2(gamma+1)/(2r)}).
    Doubling m multiplies the result by 2^{(2r+gamma+1)/(2r)} before
    rounding; R = sigma makes it independent of both.
    """
    if m < 1:
        raise ContractError("m must be at least 1")
    if not p_max > 0 or not c_gamma > 0:
        raise ContractError("p_max and C_gamma must be positive")
    r, g = params.smoothness(), params.gamma
    expo = (2 * r + g + 1) / (2 * r)
    ratio = params.R / params.sigma
    first = ratio ** (2 / (2 * r + g))
    second = (p_max * c_gamma) ** expo * ratio ** (2 * (g + 1) / (2 * r))
    return math.ceil((4 * m) ** expo * max(first, second))


def effective_dimension_sum_check(local_spectra, p, lam: float):
    """Exact identity: sum_j N(T_j, p_j lam) = N(T, lam).

    T is the weighted direct sum whose spectrum is the union over cells of
    {mu / p_j}. Returns (lhs, rhs, gap); the gap is zero up to roundoff
    for any positive spectra and any positive weights summing to 1.
    """
    if not lam > 0:
        raise ContractError("lam must be positive")
    p = np.asarray(p, dtype=float)
    if len(local_spectra) != p.shape[0]:
        raise ContractError("need one weight per local spectrum")
    if np.any(p <= 0):
        raise ContractError("weights must be positive")
    if abs(p.sum() - 1.0) > 1e-12:
        raise ContractError(f"weights sum to {p.sum()!r}, not 1")
    lhs = 0.0
    rhs = 0.0
    for spectrum, pj in zip(local_spectra, p):
        mu = np.asarray(spectrum, dtype=float)
        lhs += effective_dimension_from_spectrum(mu, pj * lam)
        rhs += effective_dimension_from_spectrum(mu / pj, lam)
    return lhs, rhs, abs(lhs - rhs)


def local_dimension_diagnostic(local_grams, p, lam: float):
    """Plug-in comparison of m * sum_j p_j * N(K_j, lam) against N(K, m lam).

    Empirical, non-certifying: it reports the two numbers for inspection
    and cannot verify the asymptotic compatibility claim they relate to.
    The global matrix is assembled as the direct sum of the local Grams.
    """
    if not lam > 0:
        raise ContractError("lam must be positive")
    p = np.asarray(p, dtype=float)
    m = len(local_grams)
    if m != p.shape[0]:
        raise ContractError("need one weight per local Gram")
    lhs = 0.0
    spectra = []
    total = 0
    for k, pj in zip(local_grams, p):
        k = np.asarray(k, dtype=float)
        nj = k.shape[0]
        total += nj
        mu = np.maximum(linalg.eigh(k / nj).eigenvalues, 0.0) if nj else []
        spectra.append(np.asarray(mu))
        lhs += pj * effective_dimension_from_spectrum(mu, lam)
    lhs *= m
    pooled = np.concatenate([s for s in spectra if s.size]) if total else np.array([])
    rhs = effective_dimension_from_spectrum(pooled, m * lam)
    return lhs, rhs
