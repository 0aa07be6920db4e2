"""
Parameter schedules and capacity diagnostics
============================================

The schedules map a sample size to the regularization strength, the
partition size, and the landmark budget, given the problem's smoothness
r and capacity gamma. The diagnostics measure the quantities those
schedules are built from.
"""

import numpy as np

from krlslab import (
    ModelParams,
    b_quantity,
    brownian,
    effective_dimension,
    effective_dimension_sum_check,
    fit_loglog_slope,
    gram,
    l_schedule,
    lambda_schedule,
    m_schedule,
    n0_sufficient,
    rate_exponent,
)

params = ModelParams(r=0.5, gamma=0.5)
print("theoretical error exponent:", rate_exponent(params))

# Dyadic sizes land on exact binary fractions by construction.
print("\n    n     lambda        m      l")
for n in (256, 1024, 4096, 16384):
    print(f"{n:6d}   {lambda_schedule(n, params):8.6f}   {m_schedule(n, params):4d}   {l_schedule(n, params):4d}")

# The effective dimension counts coefficients the regularizer leaves
# alive. Measured on a grid Gram matrix it recovers the capacity
# exponent: eigenvalues of min(x, z) decay like k^-2, so the effective
# dimension grows like lambda^-1/2.
grid = (np.arange(512) + 0.5) / 512.0
k = gram(brownian(), grid)
points = [(lam, effective_dimension(k, lam)) for lam in (1e-4, 1e-3, 1e-2, 1e-1)]
for lam, value in points:
    print(f"effective dimension at lambda {lam:7.0e}: {value:8.2f}")
slope, _ = fit_loglog_slope(points)
print(f"log-log slope {slope:+.4f} (capacity exponent 0.5)")

# Split across cells, the (rescaled) local effective dimensions sum
# exactly to the global one, whatever the weights.
rng = np.random.default_rng(5)
spectra = [np.sort(rng.uniform(0.0, 1.0, 12))[::-1] for _ in range(4)]
p = rng.dirichlet(np.ones(4))
lhs, rhs, gap = effective_dimension_sum_check(spectra, p, 1e-3)
print(f"\nsum of local dims {lhs:.10f} vs global {rhs:.10f} (gap {gap:.1e})")

# How large must n be before the per-cell sample sizes support the
# schedule, and how strong is the finite-sample correction term.
for m in (4, 16, 64):
    print(f"m={m:3d}: smallest sufficient n = {n0_sufficient(m, params, 1.0, 1.0)}")
print("inflation factor at (n=100, lambda=0.1, N=5):", round(b_quantity(100, 0.1, 5.0), 4))
