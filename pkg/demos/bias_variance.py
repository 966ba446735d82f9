"""Estimate the estimation variance and compare it to the closed-form bound.

Fixes a random true distribution over a random reduced sample space, mines
a parameter domain from a pilot sample, and then repeatedly refits on fresh
samples of size N.  The average divergence from the projected truth to the
refits is the estimation variance; the bound half-parameter-count-over-N
should track it closely, tightening as N grows.
"""

import numpy as np

from tbmlearn import BiasVarianceConfig, bias_variance_experiment

print(f"{'N':>8} {'|B|':>5} {'bias':>10} {'variance':>12} {'bound':>12} {'ratio':>6}")
for n_samples in (1_000, 10_000, 100_000):
    cfg = BiasVarianceConfig(
        space_size=150,
        n_vars=16,
        k=2,
        n_samples=n_samples,
        trials=40,
        domain_size_range=(15, 50),
        seed=42,
    )
    report = bias_variance_experiment(cfg)
    ratio = report.variance_mean / report.lower_bound
    print(
        f"{n_samples:>8d} {report.domain_size:>5d} {report.bias:>10.5f} "
        f"{report.variance_mean:>10.3e} +- {report.variance_std:.1e} "
        f"{report.lower_bound:>12.3e} {ratio:>6.2f}"
    )

print(
    "\nThe per-trial divergence from the truth always splits into the fixed"
    "\nbias plus the trial's divergence from the projection; the variance"
    "\nestimate hovers around the bound and both shrink like 1/N."
)
