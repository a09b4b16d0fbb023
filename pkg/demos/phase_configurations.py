"""
Comparing phase-shift configurations
====================================

Four ways to set the per-element phases: align to the stale CSI estimate,
align only the deterministic line-of-sight geometry, hold all phases at
zero, or draw them uniformly at random. While the aging correlation is
still high the stale-CSI rule wins; this script prints the quartiles of
each resulting SNR law in a partially coherent regime.
"""

import math
from dataclasses import replace

from scipy.optimize import brentq

from aerolink.a2g import a2g_cdf, characterize_a2g
from aerolink.scenario import ArrayShape, PscSettings, build_a2g_link, default_scenario

CONFIGS = [
    ("stale CSI", PscSettings(kind="delayed")),
    ("LoS only", PscSettings(kind="los")),
    ("all zero", PscSettings(kind="fixed", phases_rad=0.0)),
    ("random", PscSettings(kind="random_uniform", low_rad=-math.pi, high_rad=math.pi)),
]


def quantile(chr_, p):
    hi = 1.0
    while a2g_cdf(chr_, hi) < p:
        hi *= 4.0
    return brentq(lambda x: a2g_cdf(chr_, x) - p, hi * 1e-9, hi, xtol=1e-7)


print("configuration    q25        median     q75")
for name, settings in CONFIGS:
    sc = replace(
        default_scenario(),
        ris_array=ArrayShape(12, 12),
        psc=settings,
        aging_samples=50,  # correlation ~0.83 here; at 5000 it is ~0.02
    )
    link, psc = build_a2g_link(sc)
    chr_ = characterize_a2g(link, psc)
    q25, q50, q75 = (quantile(chr_, p) for p in (0.25, 0.5, 0.75))
    print(f"  {name:<12}  {q25:.4f}    {q50:.4f}    {q75:.4f}")

print("\nHigher is better; the stale-CSI configuration leads while the")
print("correlation holds, LoS-only comes second, and the two uninformed")
print("rules trail by two orders of magnitude.")
