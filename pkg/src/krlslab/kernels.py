"""Kernel specifications and Gram matrix assembly.

Four positive-definite families on a box domain: gaussian, laplacian,
brownian (the min kernel, 1-d on a subinterval of [0, 1]) and polynomial.
A kernel is described by an immutable :class:`KernelSpec`; all evaluation
goes through :func:`eval_kernel`, :func:`gram` and :func:`cross_gram`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ContractError, DomainError, EmptyInputError

FAMILIES = ("gaussian", "laplacian", "brownian", "polynomial")

_MIRROR_BLOCK = 1024


@dataclass(frozen=True)
class KernelSpec:
    """Immutable description of a kernel.

    Parameters
    ----------
    family : str
        One of ``gaussian``, ``laplacian``, ``brownian``, ``polynomial``.
    domain : tuple of (low, high) pairs
        Box the kernel is defined on, one pair per coordinate. Evaluation
        outside the box raises :class:`DomainError`.
    bandwidth : float, optional
        Length scale for gaussian and laplacian. Must be positive.
    degree : int, optional
        Polynomial degree, at least 1.
    offset : float, optional
        Polynomial additive constant, nonnegative.
    """

    family: str
    domain: tuple = field(default=((0.0, 1.0),))
    bandwidth: float | None = None
    degree: int | None = None
    offset: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ContractError(f"unknown kernel family {self.family!r}")
        dom = tuple((float(lo), float(hi)) for lo, hi in self.domain)
        object.__setattr__(self, "domain", dom)
        if not dom:
            raise ContractError("domain needs at least one coordinate")
        for lo, hi in dom:
            if not lo < hi:
                raise ContractError(f"degenerate domain interval ({lo}, {hi})")
        if self.family in ("gaussian", "laplacian"):
            if self.bandwidth is None or not self.bandwidth > 0:
                raise ContractError(f"{self.family} kernel needs bandwidth > 0")
        if self.family == "polynomial":
            if self.degree is None or int(self.degree) < 1:
                raise ContractError("polynomial kernel needs degree >= 1")
            if self.offset is None or self.offset < 0:
                raise ContractError("polynomial kernel needs offset >= 0")
            object.__setattr__(self, "degree", int(self.degree))
            object.__setattr__(self, "offset", float(self.offset))
        if self.family == "brownian":
            if len(dom) != 1:
                raise ContractError("brownian kernel is one-dimensional")
            lo, hi = dom[0]
            if lo < 0.0 or hi > 1.0:
                raise ContractError("brownian domain must sit inside [0, 1]")

    @property
    def dim(self) -> int:
        return len(self.domain)


def gaussian(bandwidth: float, domain=((0.0, 1.0),)) -> KernelSpec:
    """exp(-|x - z|^2 / (2 h^2)) on the given box."""
    return KernelSpec("gaussian", tuple(domain), bandwidth=bandwidth)


def laplacian(bandwidth: float, domain=((0.0, 1.0),)) -> KernelSpec:
    """exp(-|x - z| / h) on the given box."""
    return KernelSpec("laplacian", tuple(domain), bandwidth=bandwidth)


def brownian(domain=((0.0, 1.0),)) -> KernelSpec:
    """min(x, z) on a subinterval of [0, 1]."""
    return KernelSpec("brownian", tuple(domain))


def polynomial(degree: int, offset: float = 0.0, domain=((0.0, 1.0),)) -> KernelSpec:
    """(x . z + offset)^degree on the given box."""
    return KernelSpec("polynomial", tuple(domain), degree=degree, offset=offset)


def kernel_bound(spec: KernelSpec) -> float:
    """Exact sup of K(x, x) over the domain (the squared feature bound).

    Gaussian and laplacian peak at 1 on the diagonal. The min kernel attains
    its diagonal sup at the right endpoint. For the polynomial family the
    diagonal is (|x|^2 + offset)^degree, maximized coordinatewise at the
    endpoint of larger magnitude.
    """
    if spec.family in ("gaussian", "laplacian"):
        return 1.0
    if spec.family == "brownian":
        return spec.domain[0][1]
    norm_sq = sum(max(lo * lo, hi * hi) for lo, hi in spec.domain)
    return (norm_sq + spec.offset) ** spec.degree


def _as_points(x, dim: int) -> np.ndarray:
    """Coerce scalars, (n,) or (n, d) input to a float array of shape (n, d)."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        # A flat vector is n points in 1-d, or a single d-dim point.
        if dim == 1:
            arr = arr.reshape(-1, 1)
        elif arr.shape[0] == dim:
            arr = arr.reshape(1, dim)
        else:
            raise ContractError(
                f"cannot interpret shape {arr.shape} as points in {dim} dims"
            )
    elif arr.ndim != 2:
        raise ContractError(f"points must be at most 2-d, got shape {arr.shape}")
    if arr.shape[1] != dim:
        raise ContractError(
            f"points have {arr.shape[1]} coordinates, kernel domain has {dim}"
        )
    return arr


def _check_domain(spec: KernelSpec, pts: np.ndarray):
    if pts.shape[0] == 0:
        raise EmptyInputError("need at least one point")
    if not np.all(np.isfinite(pts)):
        raise DomainError("points must be finite")
    for j, (lo, hi) in enumerate(spec.domain):
        col = pts[:, j]
        if col.min() < lo or col.max() > hi:
            raise DomainError(
                f"coordinate {j} leaves the kernel domain [{lo}, {hi}]"
            )


def _pairwise(spec: KernelSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if spec.family == "gaussian":
        sq = (
            (a * a).sum(axis=1)[:, None]
            - 2.0 * (a @ b.T)
            + (b * b).sum(axis=1)[None, :]
        )
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-sq / (2.0 * spec.bandwidth**2))
    if spec.family == "laplacian":
        if a.shape[1] == 1:
            dist = np.abs(a[:, 0][:, None] - b[:, 0][None, :])
        else:
            sq = (
                (a * a).sum(axis=1)[:, None]
                - 2.0 * (a @ b.T)
                + (b * b).sum(axis=1)[None, :]
            )
            np.maximum(sq, 0.0, out=sq)
            dist = np.sqrt(sq)
        return np.exp(-dist / spec.bandwidth)
    if spec.family == "brownian":
        return np.minimum(a[:, 0][:, None], b[:, 0][None, :])
    return (a @ b.T + spec.offset) ** spec.degree


def eval_kernel(spec: KernelSpec, x, z):
    """Evaluate K(x, z) for single points. Returns a float."""
    a = _as_points(x, spec.dim)
    b = _as_points(z, spec.dim)
    _check_domain(spec, a)
    _check_domain(spec, b)
    if a.shape[0] != 1 or b.shape[0] != 1:
        raise ContractError("eval_kernel takes single points; use cross_gram")
    return float(_pairwise(spec, a, b)[0, 0])


def _mirror_upper(k: np.ndarray):
    """Copy the upper triangle onto the lower, blockwise to bound temporaries."""
    n = k.shape[0]
    for i0 in range(0, n, _MIRROR_BLOCK):
        i1 = min(i0 + _MIRROR_BLOCK, n)
        if i0 > 0:
            k[i0:i1, :i0] = k[:i0, i0:i1].T
        blk = k[i0:i1, i0:i1]
        low = np.tril_indices(i1 - i0, -1)
        blk[low] = blk.T[low]


def gram(spec: KernelSpec, x) -> np.ndarray:
    """Gram matrix K[i, j] = K(x_i, x_j).

    The upper triangle is computed and mirrored, so the result is symmetric
    to exact equality.
    """
    pts = _as_points(x, spec.dim)
    _check_domain(spec, pts)
    k = _pairwise(spec, pts, pts)
    _mirror_upper(k)
    return k


def cross_gram(spec: KernelSpec, x, z) -> np.ndarray:
    """Rectangular kernel matrix K[i, j] = K(x_i, z_j)."""
    a = _as_points(x, spec.dim)
    b = _as_points(z, spec.dim)
    _check_domain(spec, a)
    _check_domain(spec, b)
    return _pairwise(spec, a, b)


def psd_slack(k: np.ndarray) -> float:
    """Allowed magnitude of negative Gram eigenvalues: 1e-8 * max diagonal."""
    return 1e-8 * float(np.max(np.diagonal(k)))
