"""Seeded Monte Carlo ground truth for the analytical link laws.

Trials are organized in fixed logical chunks of 4096; chunk ``c`` of a run
seeded with ``seed`` always draws from ``SeedSequence(seed, spawn_key=(c,))``
in a fixed order, so a run is bit-reproducible and workers that process whole
chunks produce the same multiset of samples as a serial run.  Within a chunk,
draws happen in fixed-size row blocks to bound memory at large dimensions.

Reducers rely on numpy's pairwise summation, which is deterministic for a
fixed chunking.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .a2g import A2GLink, IdealPsc, PscConfig, RandomUniformPsc, resolve_psc_phases
from .g2a import G2ALink

__all__ = [
    "TrialBatch",
    "FitReport",
    "CHUNK_TRIALS",
    "sim_g2a",
    "sim_a2g",
    "ecdf",
    "ks_stat",
    "kl_vs_pdf",
    "sim_eop",
    "batch_to_csv",
    "report_to_csv",
]

CHUNK_TRIALS = 4096


@dataclass(frozen=True)
class TrialBatch:
    """Reproducible bag of scalar Monte Carlo samples."""

    seed: int
    n_trials: int
    samples: np.ndarray

    def __post_init__(self) -> None:
        if self.n_trials < 1:
            raise ValueError("n_trials must be positive")
        if len(self.samples) != self.n_trials:
            raise ValueError("sample count does not match n_trials")


@dataclass(frozen=True)
class FitReport:
    """Distribution-fit statistics of a batch against an analytic law."""

    ks: float
    kl: float
    n_bins: int
    notes: str = ""

    def __post_init__(self) -> None:
        if not 0.0 <= self.ks <= 1.0:
            raise ValueError("ks must lie in [0, 1]")
        if self.kl < -1e-12:
            raise ValueError("kl must be nonnegative")


def _chunks(seed: int, n: int):
    """(rng, rows) pairs covering n trials in fixed 4096-trial chunks."""
    for c in range(math.ceil(n / CHUNK_TRIALS)):
        rows = min(CHUNK_TRIALS, n - c * CHUNK_TRIALS)
        yield np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(c,))), rows


def _cn(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(
        2.0
    )


def _row_blocks(rows: int, dim: int):
    """Split a chunk into fixed-size row blocks to cap memory at ~100 MB."""
    per = max(1, min(rows, int(4e6 / max(dim, 1))))
    for lo in range(0, rows, per):
        yield lo, min(per, rows - lo)


def sim_g2a(link: G2ALink, n: int, seed: int, los: np.ndarray | None = None) -> TrialBatch:
    """Sample the beamformed-hop SNR from its defining expression.

    Per trial: estimate, age, beamform against the estimate.  The law is
    invariant to the LoS direction (only its unit modulus matters), so the
    default LoS vector is all-ones; pass a steering vector to match a
    concrete geometry.
    """
    if n < 1:
        raise ValueError("n must be positive")
    m_ant = link.n_antennas
    if los is None:
        los = np.ones(m_ant, dtype=complex)
    los = np.asarray(los, dtype=complex)
    k = link.rician_k
    rho = link.aging_rho
    rho_bar = math.sqrt(max(0.0, 1.0 - rho * rho))
    out = np.empty(n)
    pos = 0
    for rng, rows in _chunks(seed, n):
        for _, blk in _row_blocks(rows, m_ant):
            h_hat = math.sqrt(k / (k + 1.0)) * los + _cn(rng, (blk, m_ant)) / math.sqrt(
                k + 1.0
            )
            h = rho * h_hat + rho_bar * _cn(rng, (blk, m_ant))
            num = np.abs(np.sum(np.conj(h) * h_hat, axis=1)) ** 2
            den = np.sum(np.abs(h_hat) ** 2, axis=1)
            out[pos : pos + blk] = link.mean_snr * num / den
            pos += blk
    return TrialBatch(seed=seed, n_trials=n, samples=out)


def sim_a2g(link: A2GLink, psc: PscConfig, n: int, seed: int) -> TrialBatch:
    """Sample the reflected-hop SNR trial by trial.

    Per trial: draw the two estimated legs, age them, resolve the phase
    configuration (delayed phases bind to the estimates, ideal phases to the
    true channels), form the weighted sum, square, scale.
    """
    if n < 1:
        raise ValueError("n must be positive")
    n_el = link.n_elements
    beta = link.amplitudes
    ki, ko = link.rician_k_incident, link.rician_k_reflected
    ri, ro = link.aging_rho_incident, link.aging_rho_reflected
    rbi = math.sqrt(max(0.0, 1.0 - ri * ri))
    rbo = math.sqrt(max(0.0, 1.0 - ro * ro))
    out = np.empty(n)
    pos = 0
    for rng, rows in _chunks(seed, n):
        for _, blk in _row_blocks(rows, n_el):
            est_in = math.sqrt(ki / (ki + 1.0)) * link.los_incident + _cn(
                rng, (blk, n_el)
            ) / math.sqrt(ki + 1.0)
            est_out = math.sqrt(ko / (ko + 1.0)) * link.los_reflected + _cn(
                rng, (blk, n_el)
            ) / math.sqrt(ko + 1.0)
            h_in = ri * est_in + rbi * _cn(rng, (blk, n_el))
            h_out = ro * est_out + rbo * _cn(rng, (blk, n_el))
            phases = _resolve_block_phases(
                psc, blk, n_el, rng, est_in, est_out, h_in, h_out
            )
            z = np.sum(beta * np.exp(1j * phases) * np.conj(h_out) * h_in, axis=1)
            out[pos : pos + blk] = link.mean_snr * np.abs(z) ** 2
            pos += blk
    return TrialBatch(seed=seed, n_trials=n, samples=out)


def _resolve_block_phases(psc, blk, n_el, rng, est_in, est_out, h_in, h_out):
    """Vectorized phase resolution for a block of trials."""
    from .a2g import DelayedPsc, FixedPsc, LosBasedPsc, quantize_phases

    if isinstance(psc, DelayedPsc):
        raw = -np.angle(np.conj(est_out) * est_in)
    elif isinstance(psc, IdealPsc):
        raw = -np.angle(np.conj(h_out) * h_in)
    elif isinstance(psc, RandomUniformPsc):
        raw = rng.uniform(psc.low, psc.high, (blk, n_el))
    elif isinstance(psc, (FixedPsc, LosBasedPsc)):
        raw = np.broadcast_to(psc.phases, (blk, n_el))
    else:
        raise TypeError(f"unknown configuration {psc!r}")
    return quantize_phases(raw, psc.quantization_bits)


def ecdf(batch: TrialBatch, grid) -> np.ndarray:
    """Empirical CDF of the batch evaluated on a grid."""
    if batch.n_trials == 0:
        raise ValueError("empty batch")
    xs = np.sort(batch.samples)
    return np.searchsorted(xs, np.asarray(grid, dtype=float), side="right") / len(xs)


def ks_stat(batch: TrialBatch, cdf) -> float:
    """Sup-norm distance between the batch ECDF and an analytic cdf."""
    if batch.n_trials == 0:
        raise ValueError("empty batch")
    xs = np.sort(batch.samples)
    n = len(xs)
    f = np.asarray(cdf(xs), dtype=float)
    upper = np.abs(np.arange(1, n + 1) / n - f)
    lower = np.abs(np.arange(0, n) / n - f)
    return float(np.max(np.maximum(upper, lower)))


def kl_vs_pdf(batch: TrialBatch, pdf=None, n_bins: int = 100, cdf=None) -> float:
    """Relative entropy of the batch against an analytic density.

    Samples are normalized by their mean, partitioned into equal-mass bins,
    and compared with the analytic mass per bin (natural logarithm).  The
    statistic is invariant to the normalization; it is kept for parity with
    how the distributions are usually displayed.  Analytic masses come from
    ``cdf`` when given, else from trapezoid integration of ``pdf``.
    """
    if batch.n_trials == 0:
        raise ValueError("empty batch")
    if pdf is None and cdf is None:
        raise ValueError("provide pdf or cdf")
    xs = np.sort(batch.samples)
    n = len(xs)
    mean = float(np.mean(xs))
    y = xs / mean
    inner = np.quantile(y, np.arange(1, n_bins) / n_bins)
    edges = np.concatenate(([0.0], inner, [np.inf]))
    counts = np.diff(np.searchsorted(y, edges, side="right"))
    counts[-1] = n - int(np.sum(counts[:-1]))
    p = counts / n

    raw_edges = edges * mean
    if cdf is not None:
        cvals = np.empty(n_bins + 1)
        cvals[0] = 0.0
        cvals[-1] = 1.0
        cvals[1:-1] = np.asarray(cdf(raw_edges[1:-1]), dtype=float)
        q = np.diff(cvals)
    else:
        hi = float(y[-1]) * 1.5 * mean
        q = np.empty(n_bins)
        for i in range(n_bins):
            a = raw_edges[i] if raw_edges[i] > 0 else 1e-12 * mean
            b = raw_edges[i + 1] if np.isfinite(raw_edges[i + 1]) else hi
            t = np.linspace(a, b, 129)
            q[i] = np.trapezoid(np.asarray(pdf(t), dtype=float), t)
        q = q / np.sum(q)
    q = np.maximum(q, 1e-300)
    mask = p > 0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def sim_eop(scenario, query, n: int, seed: int) -> float:
    """Fraction of trials where either hop misses the query threshold.

    The two hops are drawn independently (distinct chunk sub-streams).
    """
    from .scenario import build_a2g_link, build_g2a_link

    g2a_link, g2a_los = build_g2a_link(scenario)
    a2g_link, psc = build_a2g_link(scenario)
    b1 = sim_g2a(g2a_link, n, seed, los=g2a_los)
    b2 = sim_a2g(a2g_link, psc, n, seed + 0x9E3779B9)
    th = query.threshold
    return float(np.mean(np.minimum(b1.samples, b2.samples) < th))


def batch_to_csv(path, batch: TrialBatch) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trial_index", "sample"])
        for i, s in enumerate(batch.samples):
            w.writerow([i, s])


def report_to_csv(path, stats: dict) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["statistic", "value"])
        for k, v in stats.items():
            w.writerow([k, v])
