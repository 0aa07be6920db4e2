"""
Synthetic tasks with known smoothness
=====================================

Targets are built directly in the kernel's eigenbasis, so the
smoothness exponent r and the norm bound R are exact by construction
rather than estimated. That makes convergence-rate experiments honest:
the truth the estimator chases is known in closed form.
"""

import numpy as np

from krlslab import (
    NoiseSpec,
    gen_inputs,
    mise_estimate,
    piecewise_task,
    sample_labels,
    sobolev_task,
    fit_krls,
    brownian,
)

# A target of smoothness r = 1/2 and source norm exactly R = 1.
task = sobolev_task(0.5, 1.0, NoiseSpec("gaussian", 0.3))
target = task.target
print("coefficients:", target.coefficients.shape, " source sum:", target.source_sum())

# The coefficient profile decays polynomially; rougher targets (smaller
# r) put more weight on high modes.
rough = sobolev_task(0.1, 1.0, NoiseSpec("gaussian", 0.3)).target
k = np.array([1, 5, 20, 80])
print("smooth c_k:", np.round(target.coefficients[k - 1], 5))
print("rough  c_k:", np.round(rough.coefficients[k - 1], 5))

# Sampling is seed-deterministic: inputs, labels, and test draws come
# from separate streams.
x = gen_inputs(task, 8, 42)
y = sample_labels(task, x, 43)
print("x:", np.round(x, 3))
print("y:", np.round(y, 3))

# The integrated squared error of any predictor against the known truth.
model = fit_krls(gen_inputs(task, 800, 1), sample_labels(task, gen_inputs(task, 800, 1), 2), 1e-2, brownian())
print("mise of a fit:", round(mise_estimate(model.predict, task, 20000, 3), 6))
print("mise of zero: ", round(mise_estimate(lambda s: np.zeros(np.shape(s)), task, 20000, 3), 6))

# Two-smoothness targets: rough only on chosen cells of a grid.
pw = piecewise_task(0.1, 0.5, 0.25, 1.0, cells=16, exceptional=(7,), noise=NoiseSpec("gaussian", 0.3))
mass, bound, ok = pw.exceptional_mass_bound(8192)
print(f"exceptional mass {mass} within bound {bound:.3f}: {ok}")
