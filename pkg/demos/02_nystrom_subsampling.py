"""
Nystrom subsampling: accuracy against landmark budget
=====================================================

The landmark-restricted fit solves a small system in l coefficients
instead of n. With the full budget l = n it reproduces the global fit;
below that the error decays quickly as landmarks are added.
"""

import time

import numpy as np

from krlslab import fit_krls, fit_nystrom, gaussian

rng = np.random.default_rng(21)

n = 2000
x = rng.uniform(0.0, 1.0, n)
y = np.sin(2.0 * np.pi * x) + 0.2 * rng.standard_normal(n)
x_test = np.linspace(0.0, 1.0, 500)
spec = gaussian(0.15)
lam = 1e-3

tic = time.perf_counter()
full = fit_krls(x, y, lam, spec)
full_seconds = time.perf_counter() - tic
reference = full.predict(x_test)
print(f"global fit: n={n}, {full_seconds * 1e3:.0f} ms")

# Landmarks are drawn without replacement with a recorded seed, so any
# run is repeatable.
print("\n  l    max |diff| vs global    fit time")
for l in (10, 30, 100, 300, 1000, n):
    tic = time.perf_counter()
    model = fit_nystrom(x, y, lam, l, 5, spec)
    seconds = time.perf_counter() - tic
    gap = float(np.max(np.abs(model.predict(x_test) - reference)))
    print(f"{l:5d}        {gap:10.2e}        {seconds * 1e3:6.1f} ms")

print("\nthe error stops improving once the landmarks resolve every kernel")
print("direction the regularizer keeps; the remaining gap is the spectral")
print("truncation floor of the reduced normal equations, far below the")
print("statistical error at this noise level.")
