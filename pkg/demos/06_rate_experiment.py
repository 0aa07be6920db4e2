"""
Measuring convergence rates end to end
======================================

Runs the seeded experiment harness on a small grid: four estimators,
scheduled parameters, mean integrated squared error per sample size,
and the fitted log-log slope next to the theoretical exponent. The same
run is available from the command line; the CLI lines are printed at
the end.

A scaled-down version of the full benchmark (sample sizes up to 1024,
five replications) so it finishes in about half a minute.
"""

import numpy as np

from krlslab import (
    ExperimentConfig,
    NoiseSpec,
    fit_loglog_slope,
    mean_mise_curve,
    run_rate_experiment,
    sobolev_task,
)

task = sobolev_task(0.5, 1.0, NoiseSpec("gaussian", 0.15), marginal=("uniform", 0.9, 1.0))
config = ExperimentConfig(
    task=task,
    estimators=("krls", "localized", "nystrom", "localized_nystrom"),
    n_grid=(128, 256, 512, 1024),
    replications=5,
    n_test=5000,
    master_seed=13,
)
report = run_rate_experiment(config)
print("rows:", len(report.rows), " theoretical exponent:", report.theoretical_exponent)

for estimator in config.estimators:
    curve = mean_mise_curve(report.rows, estimator)
    slope, stderr = fit_loglog_slope(curve)
    mise_text = "  ".join(f"{mise:.5f}" for _, mise in curve)
    print(f"{estimator:18s} mean mise {mise_text}   slope {slope:+.2f} +- {stderr:.2f}")

# Fit times scale very differently: the global solver is cubic in n,
# the localized + subsampled combination near-linear.
for estimator in ("krls", "localized_nystrom"):
    seconds = [r.fit_seconds for r in report.rows if r.estimator == estimator and r.n == 1024]
    print(f"median fit at n=1024, {estimator}: {1e3 * float(np.median(seconds)):.1f} ms")

print("""
same experiment from the shell:

  krlslab experiment --config config.json --out report_dir
  krlslab report --path report_dir

where config.json holds the ExperimentConfig fields; `synth`, `fit`,
`predict`, and `bench` cover data generation, single fits, prediction,
and timing from files.""")
