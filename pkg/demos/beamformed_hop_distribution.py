"""
Distribution of the beamformed ground-to-air SNR
================================================

The source beamforms toward a stale channel estimate, so the received SNR
is not the usual Rician-MRT law. This script pits the closed-form cdf
against a Monte Carlo batch for two antenna counts and prints a quantile
table plus the Kolmogorov-Smirnov distance.
"""

from dataclasses import replace

import numpy as np

from aerolink import mc_oracle as mc
from aerolink.g2a import g2a_cdf, g2a_mean
from aerolink.scenario import ArrayShape, build_g2a_link, default_scenario

TRIALS = 50_000

for shape in (ArrayShape(2, 2), ArrayShape(3, 3)):
    sc = replace(default_scenario(), bs_array=shape)
    link, _ = build_g2a_link(sc)
    batch = mc.sim_g2a(link, TRIALS, sc.seed)

    print(f"\nM = {link.n_antennas} antennas, "
          f"mean SNR {g2a_mean(link):.2f} (sim {batch.samples.mean():.2f})")

    # empirical quantiles against the analytic cdf evaluated at the same spots
    print("  quantile   sim value   analytic cdf there")
    for q in (0.05, 0.25, 0.50, 0.75, 0.95):
        xq = float(np.quantile(batch.samples, q))
        print(f"    {q:4.2f}    {xq:9.2f}   {float(g2a_cdf(link, xq)):.4f}")

    ks = mc.ks_stat(batch, lambda x, lk=link: g2a_cdf(lk, x))
    print(f"  KS distance over {TRIALS} trials: {ks:.4f}")
