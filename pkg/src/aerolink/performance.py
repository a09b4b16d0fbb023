"""End-to-end outage metrics and the adaptive rate controller.

The end-to-end link succeeds only if both hops clear the SNR threshold, so
the outage composes the two hop CDFs.  The adaptive controller inverts the
high-power/large-surface approximations in closed form and falls back to a
bisection on the exact outage when the approximation misses the budget.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .a2g import (
    A2GCharacterization,
    A2GLink,
    PscConfig,
    a2g_cdf,
    characterize_a2g,
    gamma_r_match,
    sigma_z2_moments,
)
from .g2a import G2ALink, g2a_cdf, g2a_cdf_asymptotic
from .specfun import q_inv

__all__ = [
    "OutageQuery",
    "AdaptivePolicy",
    "AdaptiveResult",
    "TrajectoryPoint",
    "eop",
    "eop_floor",
    "adaptive_gamma_th",
    "eop_trajectory",
    "eop_sweep_to_csv",
    "eop_trajectory_to_csv",
]


@dataclass(frozen=True)
class OutageQuery:
    """Target spectral efficiency and the SNR threshold it implies.

    Half the exponent budget goes to each hop (two-slot relaying), hence
    threshold = 2^(2*target_se) - 1.
    """

    target_se: float

    def __post_init__(self) -> None:
        if self.target_se <= 0:
            raise ValueError("target_se must be positive")

    @property
    def threshold(self) -> float:
        return 2.0 ** (2.0 * self.target_se) - 1.0


@dataclass(frozen=True)
class AdaptivePolicy:
    """Outage budget the adaptive controller must respect."""

    outage_budget: float

    def __post_init__(self) -> None:
        if not 0.0 < self.outage_budget < 1.0:
            raise ValueError("outage_budget must lie in (0, 1)")


@dataclass(frozen=True)
class AdaptiveResult:
    gamma_th: float
    target_se: float
    refined: bool = False


@dataclass(frozen=True)
class TrajectoryPoint:
    index: int
    t_k: int
    eop: float
    avg_eop: float
    se: float
    refined: bool = False


def eop(
    g2a_link: G2ALink, a2g_chr: A2GCharacterization, q: OutageQuery
) -> float:
    """End-to-end outage probability at the query threshold."""
    th = q.threshold
    f1 = g2a_cdf(g2a_link, th)
    f2 = a2g_cdf(a2g_chr, th)
    return 1.0 - (1.0 - f1) * (1.0 - f2)


def eop_floor(g2a_link: G2ALink, q: OutageQuery) -> float:
    """High-power outage floor set by the beamformed hop alone."""
    return float(min(1.0, g2a_cdf_asymptotic(g2a_link, q.threshold)))


def _exact_eop_at(g2a_link: G2ALink, chr_: A2GCharacterization, gamma: float) -> float:
    return 1.0 - (1.0 - g2a_cdf(g2a_link, gamma)) * (1.0 - a2g_cdf(chr_, gamma))


def adaptive_gamma_th(
    g2a_link: G2ALink,
    a2g_link: A2GLink,
    psc: PscConfig,
    policy: AdaptivePolicy,
    refine: bool = True,
) -> AdaptiveResult:
    """Largest SNR threshold whose end-to-end outage stays within budget.

    Closed-form step: invert the linear floor of the beamformed hop and the
    Gaussian approximation of the reflected hop, then take the binding
    minimum.  If the exact outage at that point overshoots the budget (the
    approximations are not conservative), bisect down on the exact outage;
    the result is flagged.
    """
    big_l = policy.outage_budget
    # Beamformed-hop branch: the floor is linear in x, so inversion is a ratio.
    slope = g2a_cdf_asymptotic(g2a_link, 1.0)
    g_hat_1 = big_l / slope if slope > 0.0 else math.inf
    # Reflected-hop branch: Gaussian quantile of the fade factor.
    gr = gamma_r_match(a2g_link, psc)
    omega = a2g_link.mean_snr * sigma_z2_moments(a2g_link).mean
    u = (gr.shape + gr.noncentrality) + q_inv(1.0 - big_l) * math.sqrt(
        gr.shape + 2.0 * gr.noncentrality
    )
    g_hat_2 = gr.scale * omega * u if u > 0.0 else math.nan
    candidates = [g for g in (g_hat_1, g_hat_2) if math.isfinite(g) and g > 0.0]
    gamma_hat = min(candidates) if candidates else math.nan

    refined = False
    if refine:
        chr_ = characterize_a2g(a2g_link, psc)
        if not (math.isfinite(gamma_hat) and gamma_hat > 0.0):
            gamma_hat = _bisect_budget(g2a_link, chr_, big_l, hi=None)
            refined = True
        elif _exact_eop_at(g2a_link, chr_, gamma_hat) > big_l:
            gamma_hat = _bisect_budget(g2a_link, chr_, big_l, hi=gamma_hat)
            refined = True
    elif not (math.isfinite(gamma_hat) and gamma_hat > 0.0):
        raise ValueError("closed-form inversion failed; enable refine")

    se = 0.5 * math.log2(1.0 + gamma_hat)
    return AdaptiveResult(gamma_th=gamma_hat, target_se=se, refined=refined)


def _bisect_budget(
    g2a_link: G2ALink,
    chr_: A2GCharacterization,
    budget: float,
    hi: float | None,
    rel_tol: float = 1e-3,
    max_iter: int = 80,
) -> float:
    """Largest gamma with exact end-to-end outage <= budget (monotone)."""
    lo = 1e-300
    if hi is None:
        hi = 1e-9
        while _exact_eop_at(g2a_link, chr_, hi) <= budget:
            lo = hi
            hi *= 10.0
            if hi > 1e12:
                return lo  # budget never exceeded in any realistic range
    for _ in range(max_iter):
        mid = math.sqrt(lo * hi) if lo > 0 else 0.5 * hi
        if _exact_eop_at(g2a_link, chr_, mid) <= budget:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rel_tol * lo:
            break
    return lo


def eop_trajectory(
    scenario,
    steps: int,
    policy: AdaptivePolicy | None = None,
    query: OutageQuery | None = None,
) -> list[TrajectoryPoint]:
    """Per-location outage along a mobility trajectory plus running average.

    With a policy, each location gets the adaptive threshold; otherwise the
    fixed query rate is evaluated everywhere.  Channel estimation restarts
    at the beginning of every location, so the aging lag is the scenario's
    configured sample offset at each point.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if (policy is None) == (query is None):
        raise ValueError("provide exactly one of policy or query")
    from .scenario import trajectory_snapshots

    points: list[TrajectoryPoint] = []
    total = 0.0
    for snap in trajectory_snapshots(scenario, steps):
        if policy is not None:
            res = adaptive_gamma_th(snap.g2a_link, snap.a2g_link, snap.psc, policy)
            chr_ = characterize_a2g(snap.a2g_link, snap.psc)
            p = _exact_eop_at(snap.g2a_link, chr_, res.gamma_th)
            se, refined = res.target_se, res.refined
        else:
            chr_ = characterize_a2g(snap.a2g_link, snap.psc)
            p = _exact_eop_at(snap.g2a_link, chr_, query.threshold)
            se, refined = query.target_se, False
        total += p
        points.append(
            TrajectoryPoint(
                index=snap.index,
                t_k=snap.t_k,
                eop=p,
                avg_eop=total / snap.index,
                se=se,
                refined=refined,
            )
        )
    return points


def eop_sweep_to_csv(path, rows) -> None:
    """Write (power_dbm, eop_analytic, eop_mc, eop_floor) rows; eop_mc may
    be None when the sweep ran analytically only."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p_dbm", "eop_analytic", "eop_mc", "eop_floor"])
        for p_dbm, analytic, mc, floor in rows:
            w.writerow([p_dbm, analytic, "" if mc is None else mc, floor])


def eop_trajectory_to_csv(path, points: list[TrajectoryPoint]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "t_k", "eop", "avg_eop", "se", "refined"])
        for pt in points:
            w.writerow([pt.index, pt.t_k, pt.eop, pt.avg_eop, pt.se, int(pt.refined)])
