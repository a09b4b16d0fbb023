"""Uplink SNR law for the multi-antenna transmit-beamforming hop under
outdated CSI.

The SNR is a mixture of scaled noncentral chi-square laws sharing one
noncentrality and one scale; mixture weights are binomial probabilities.
Two independent evaluation routes are kept on purpose: the mixture route
(canonical, reuses the hardened distribution kernels) and a single-sum
Bessel route used as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, ive
from scipy.stats import binom

from .specfun import NoncentralChi2Params, ncchi2_cdf, ncchi2_pdf

__all__ = [
    "G2ALink",
    "G2AMixture",
    "mixture_params",
    "g2a_pdf",
    "g2a_pdf_direct",
    "g2a_cdf",
    "g2a_cdf_asymptotic",
    "g2a_mean",
]


@dataclass(frozen=True)
class G2ALink:
    """Static description of the beamformed uplink hop.

    n_antennas    transmit array size
    rician_k      linear Rician factor of the hop
    aging_rho     temporal correlation between CSI estimate and live channel
    mean_snr      average SNR (transmit power times path gain over noise)
    """

    n_antennas: int
    rician_k: float
    aging_rho: float
    mean_snr: float

    def __post_init__(self) -> None:
        if self.n_antennas < 1:
            raise ValueError("need at least one antenna")
        if self.rician_k < 0:
            raise ValueError("Rician factor must be nonnegative")
        if not -1.0 <= self.aging_rho <= 1.0:
            raise ValueError("aging_rho must lie in [-1, 1]")
        if self.mean_snr <= 0:
            raise ValueError("mean_snr must be positive")

    @property
    def rho2(self) -> float:
        return self.aging_rho**2

    @property
    def rho_bar2(self) -> float:
        return 1.0 - self.rho2


@dataclass(frozen=True)
class G2AMixture:
    """Mixture representation: component m has shape M-m, shared
    noncentrality and scale."""

    weights: np.ndarray
    noncentrality: float
    scale: float

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < -1e-15):
            raise ValueError("weights must be nonnegative")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")

    @property
    def n_components(self) -> int:
        return len(self.weights)

    @property
    def dofs(self) -> np.ndarray:
        m = self.n_components
        return np.arange(m, 0, -1, dtype=float)  # M-m for m = 0..M-1

    @property
    def mean(self) -> float:
        return float(
            np.sum(self.weights * (self.dofs + self.noncentrality)) * self.scale
        )


def mixture_params(link: G2ALink) -> G2AMixture:
    """Mixture weights/noncentrality/scale for the hop's SNR law."""
    K, r2, rb2 = link.rician_k, link.rho2, link.rho_bar2
    denom = K * rb2 + 1.0
    lam = link.n_antennas * K * r2 / denom
    scale = link.mean_snr * denom / (K + 1.0)
    # kappa_m = C(M-1, m) * (rb2*(K+1))^m * (r2)^(M-1-m) / denom^(M-1):
    # a binomial pmf with success probability rb2*(K+1)/denom.
    p = rb2 * (K + 1.0) / denom
    weights = binom.pmf(np.arange(link.n_antennas), link.n_antennas - 1, p)
    return G2AMixture(weights=weights, noncentrality=lam, scale=scale)


def g2a_pdf(link: G2ALink, x) -> np.ndarray | float:
    """SNR density via the mixture route."""
    mix = mixture_params(link)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs <= 0):
        raise ValueError("x must be positive")
    out = np.zeros_like(xs)
    for w, k in zip(mix.weights, mix.dofs):
        if w == 0.0:
            continue
        p = NoncentralChi2Params(k, mix.noncentrality, mix.scale)
        out += w * ncchi2_pdf(p, xs)
    return out if np.ndim(x) else float(out[0])


def g2a_cdf(link: G2ALink, x) -> np.ndarray | float:
    """SNR distribution function via the mixture route."""
    mix = mixture_params(link)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs <= 0):
        raise ValueError("x must be positive")
    out = np.zeros_like(xs)
    for w, k in zip(mix.weights, mix.dofs):
        if w == 0.0:
            continue
        p = NoncentralChi2Params(k, mix.noncentrality, mix.scale)
        out += w * ncchi2_cdf(p, xs)
    return np.clip(out, 0.0, 1.0) if np.ndim(x) else float(min(1.0, max(0.0, out[0])))


def g2a_pdf_direct(link: G2ALink, x) -> np.ndarray | float:
    """SNR density via the independent single-sum Bessel route.

    Requires a strictly positive noncentrality (aging_rho != 0 and
    rician_k > 0); the central case is covered by the mixture route.
    Log-domain accumulation keeps large array/Rician products finite.
    """
    M, K = link.n_antennas, link.rician_k
    r2, rb2, gbar = link.rho2, link.rho_bar2, link.mean_snr
    denom = K * rb2 + 1.0
    xi = M * K * r2 * (K + 1.0) / gbar
    if xi <= 0.0:
        raise ValueError("direct route needs rician_k > 0 and aging_rho != 0")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs <= 0):
        raise ValueError("x must be positive")

    z = 2.0 * np.sqrt(xi * xs) / denom  # Bessel argument, shape (n,)
    # common exponent, with +z restoring the scaled Bessel
    log_common = (
        -M * K * r2 / denom
        - (K + 1.0) * xs / (gbar * denom)
        + z
        + M * math.log((K + 1.0) / denom)
    )
    i = np.arange(M)
    nu = (M - i - 1).astype(float)
    log_binom = gammaln(M) - gammaln(i + 1) - gammaln(M - i)
    with np.errstate(divide="ignore"):
        log_coef = (
            log_binom
            + i * np.log(rb2 if rb2 > 0 else np.nan)
            + nu * np.log(r2)
            - (M - i) * math.log(gbar)
        )
    if rb2 == 0.0:  # only i = 0 survives; 0*log(0) guard
        log_coef = np.where(i == 0, log_binom + nu * np.log(r2) - (M - i) * math.log(gbar), -np.inf)
    log_pow = np.outer(nu / 2.0, np.log(xs / xi))  # (M, n)
    iv_scaled = ive(nu[:, None], z[None, :])  # (M, n)
    with np.errstate(divide="ignore"):
        log_terms = log_coef[:, None] + log_pow + np.log(iv_scaled)
    tmax = np.max(log_terms, axis=0)
    out = np.exp(log_common + tmax) * np.sum(np.exp(log_terms - tmax), axis=0)
    return out if np.ndim(x) else float(out[0])


def g2a_cdf_asymptotic(link: G2ALink, x) -> np.ndarray | float:
    """High-power linear floor of the cdf (ratio to exact tends to 1)."""
    M, K = link.n_antennas, link.rician_k
    r2, rb2 = link.rho2, link.rho_bar2
    denom = K * rb2 + 1.0
    xs = np.asarray(x, dtype=float)
    if np.any(xs <= 0):
        raise ValueError("x must be positive")
    if rb2 == 0.0 and M >= 2:
        out = np.zeros_like(xs)
        return out if np.ndim(x) else 0.0
    with np.errstate(divide="ignore"):
        log_c = (
            -M * K * r2 / denom
            + M * math.log(K + 1.0)
            + (M - 1) * (math.log(rb2) if rb2 > 0 else 0.0)
            - M * math.log(denom)
        )
    out = np.exp(log_c) * xs / link.mean_snr
    return out if np.ndim(x) else float(out)


def g2a_mean(link: G2ALink) -> float:
    """Average SNR implied by the mixture law."""
    return mixture_params(link).mean
