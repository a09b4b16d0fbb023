"""Statistics of the surface-reflected downlink hop.

The received fade is Z = sum_n beta_n e^{j theta_n} conj(h_out,n) h_in,n,
where "in" is the transmitter-to-surface leg and "out" the surface-to-user
leg, both Rician and both aged relative to their estimates.  The chain here:

  1. conditional CF of Z given the estimates (exact),
  2. Gaussian conditioning (conditional mean / variance of Z),
  3. law-of-total-cumulance moments and noncentral chi-square matching,
  4. a product-of-two-noncentral-chi-square law for the SNR, expanded as a
     double Poisson mixture over products of unit-scale gammas,
  5. phase-configuration models and the average SNR.

Scale convention: A2GLink.mean_snr already contains transmit power and the
effective two-leg path gain, so the SNR is mean_snr * |Z|^2 with unit-power
per-element fading.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats

from .specfun import (
    GK_LARGE_SHAPE,
    NoncentralChi2Params,
    gk_cdf,
    gk_cdf_grid,
    gk_pdf,
    poisson_truncation,
    q_func,
    rician_envelope_mean,
)

__all__ = [
    "DelayedPsc",
    "RandomUniformPsc",
    "FixedPsc",
    "LosBasedPsc",
    "IdealPsc",
    "los_based_psc",
    "quantize_phases",
    "resolve_psc_phases",
    "psc_cf_factor",
    "A2GLink",
    "GaussianConditioning",
    "MomentTriple",
    "MuZStats",
    "A2GCharacterization",
    "conditional_cf",
    "gaussian_conditioning",
    "ltc_moments",
    "match_ncchi2",
    "sigma_z2_moments",
    "sigma_z2_match",
    "mu_z_moments",
    "gamma_r_match",
    "characterize_a2g",
    "a2g_pdf",
    "a2g_cdf",
    "a2g_cdf_asymptotic",
    "avg_a2g_snr",
]

# Width of the mean-dominance test in the variance expansion of |mu_Z|^2:
# below this many conditional standard deviations the mean is treated as zero.
TAYLOR_SWITCH = 0.05

# Default neglected tail mass of each Poisson truncation window.
POISSON_EPS = 1e-10

# Relative variance below which the scatter power is treated as deterministic
# and represented by a gamma with this huge shape (the product kernel then
# collapses to the exact deterministic limit).
_DEGENERATE_REL_VAR = 1e-14
_DEGENERATE_SHAPE = 1e9


# ---------------------------------------------------------------------------
# Phase-shift configurations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DelayedPsc:
    """Phases cancel the *estimated* per-element product phase."""

    quantization_bits: int | None = None
    kind: str = field(default="delayed", init=False)


@dataclass(frozen=True)
class RandomUniformPsc:
    """Independent phases uniform on [low, high] (subset of [-pi, pi])."""

    low: float = -math.pi
    high: float = math.pi
    quantization_bits: int | None = None
    kind: str = field(default="random_uniform", init=False)

    def __post_init__(self) -> None:
        if not -math.pi <= self.low <= self.high <= math.pi:
            raise ValueError("need -pi <= low <= high <= pi")


@dataclass(frozen=True)
class FixedPsc:
    """Deterministic per-element phases, supplied explicitly."""

    phases: np.ndarray
    quantization_bits: int | None = None
    kind: str = field(default="fixed", init=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "phases", np.atleast_1d(np.asarray(self.phases, dtype=float))
        )


@dataclass(frozen=True)
class LosBasedPsc:
    """Deterministic phases that cancel the LoS product phase."""

    phases: np.ndarray
    quantization_bits: int | None = None
    kind: str = field(default="los", init=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "phases", np.atleast_1d(np.asarray(self.phases, dtype=float))
        )


@dataclass(frozen=True)
class IdealPsc:
    """Benchmark: phases cancel the *true* (aged) product phase.

    Only the Monte Carlo path can evaluate this configuration.
    """

    quantization_bits: int | None = None
    kind: str = field(default="ideal", init=False)


PscConfig = DelayedPsc | RandomUniformPsc | FixedPsc | LosBasedPsc | IdealPsc


def los_based_psc(link: "A2GLink", quantization_bits: int | None = None) -> LosBasedPsc:
    """Build the LoS-cancelling configuration for a concrete link."""
    phases = np.angle(link.los_reflected) - np.angle(link.los_incident)
    return LosBasedPsc(phases=phases, quantization_bits=quantization_bits)


def quantize_phases(phases: np.ndarray, bits: int | None) -> np.ndarray:
    """Snap each phase to the nearest point of {0, 2pi/Q, ...}, Q = 2^bits."""
    if bits is None:
        return np.asarray(phases, dtype=float)
    if bits < 1:
        raise ValueError("quantization needs at least one bit")
    step = 2.0 * math.pi / (1 << bits)
    return np.round(np.asarray(phases, dtype=float) / step) * step


def resolve_psc_phases(
    psc: PscConfig,
    n_elements: int,
    rng: np.random.Generator | None = None,
    csi_incident: np.ndarray | None = None,
    csi_reflected: np.ndarray | None = None,
    true_incident: np.ndarray | None = None,
    true_reflected: np.ndarray | None = None,
) -> np.ndarray:
    """Concrete per-element phases for one trial (quantization applied)."""
    if isinstance(psc, DelayedPsc):
        if csi_incident is None or csi_reflected is None:
            raise ValueError("delayed configuration needs the estimated CSI")
        raw = -np.angle(np.conj(csi_reflected) * csi_incident)
    elif isinstance(psc, IdealPsc):
        if true_incident is None or true_reflected is None:
            raise ValueError("ideal configuration needs the true CSI")
        raw = -np.angle(np.conj(true_reflected) * true_incident)
    elif isinstance(psc, RandomUniformPsc):
        if rng is None:
            raise ValueError("random configuration needs an RNG")
        raw = rng.uniform(psc.low, psc.high, n_elements)
    elif isinstance(psc, (FixedPsc, LosBasedPsc)):
        if len(psc.phases) != n_elements:
            raise ValueError("phase vector length does not match element count")
        raw = psc.phases
    else:
        raise TypeError(f"unknown configuration {psc!r}")
    return quantize_phases(raw, psc.quantization_bits)


def _phase_cf(psc: PscConfig, n: int, t: float) -> complex:
    """E[exp(j*t*theta_n)] for configurations with CSI-independent phases."""
    if isinstance(psc, RandomUniformPsc):
        a, b = psc.low, psc.high
        if b == a:
            return complex(np.exp(1j * t * a))
        return complex((np.exp(1j * t * b) - np.exp(1j * t * a)) / (1j * t * (b - a)))
    if isinstance(psc, (FixedPsc, LosBasedPsc)):
        th = quantize_phases(psc.phases, psc.quantization_bits)[n]
        return complex(np.exp(1j * t * th))
    if isinstance(psc, IdealPsc):
        raise ValueError("no closed-form CF; Monte Carlo only")
    raise ValueError(
        "delayed configuration has CSI-coupled phases; use the envelope route"
    )


def psc_cf_factor(psc: PscConfig, n: int) -> complex:
    """Unit-frequency phase CF factor of element n."""
    return _phase_cf(psc, n, 1.0)


def _quantization_cf(bits: int | None, t: float) -> float:
    """CF of the uniform quantization error at frequency t (1 when disabled)."""
    if bits is None:
        return 1.0
    half = math.pi / (1 << bits)
    return math.sin(t * half) / (t * half) if t * half != 0 else 1.0


# ---------------------------------------------------------------------------
# Link description and conditioning
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class A2GLink:
    """Two-leg reflected hop with per-element amplitude coefficients.

    amplitudes fold any per-element path-loss heterogeneity; mean_snr is the
    average SNR scale (power times effective path gain over noise).  LoS
    entries are unit-modulus steering products at the estimation epoch.
    """

    amplitudes: np.ndarray
    rician_k_incident: float
    rician_k_reflected: float
    aging_rho_incident: float
    aging_rho_reflected: float
    mean_snr: float
    los_incident: np.ndarray | None = None
    los_reflected: np.ndarray | None = None

    def __post_init__(self) -> None:
        amps = np.atleast_1d(np.asarray(self.amplitudes, dtype=float))
        object.__setattr__(self, "amplitudes", amps)
        if np.any((amps <= 0) | (amps > 1.0 + 1e-12)):
            raise ValueError("amplitudes must lie in (0, 1]")
        for name in ("rician_k_incident", "rician_k_reflected"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        for name in ("aging_rho_incident", "aging_rho_reflected"):
            if not -1.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [-1, 1]")
        if self.mean_snr <= 0:
            raise ValueError("mean_snr must be positive")
        for name in ("los_incident", "los_reflected"):
            v = getattr(self, name)
            if v is None:
                v = np.ones(self.n_elements, dtype=complex)
            else:
                v = np.atleast_1d(np.asarray(v, dtype=complex))
                if len(v) != self.n_elements:
                    raise ValueError(f"{name} length mismatch")
                if np.any(np.abs(np.abs(v) - 1.0) > 1e-9):
                    raise ValueError(f"{name} entries must have unit modulus")
            object.__setattr__(self, name, v)

    @property
    def n_elements(self) -> int:
        return len(self.amplitudes)


@dataclass(frozen=True)
class GaussianConditioning:
    """Conditional mean and variance of Z given the estimates."""

    mu_z: complex
    sigma_z2: float

    def __post_init__(self) -> None:
        if self.sigma_z2 < 0:
            raise ValueError("sigma_z2 must be nonnegative")


@dataclass(frozen=True)
class MomentTriple:
    """Mean, variance, and third central moment of a positive variate."""

    mean: float
    variance: float
    mu3: float

    def __post_init__(self) -> None:
        if self.variance < 0:
            raise ValueError("variance must be nonnegative")


def conditional_cf(
    link: A2GLink,
    phases: np.ndarray,
    csi_incident: np.ndarray,
    csi_reflected: np.ndarray,
    omega: complex,
) -> complex:
    """Exact CF of Z given the estimates, E[exp(j Re(conj(omega) Z)) | est].

    Each element contributes a rational prefactor and an exponential whose
    quadratic part carries the aged-CSI energies and whose linear part
    couples omega to the estimated per-element product.
    """
    beta = link.amplitudes
    ri2 = link.aging_rho_incident**2
    ro2 = link.aging_rho_reflected**2
    rbi2, rbo2 = 1.0 - ri2, 1.0 - ro2
    w2_4 = 0.25 * abs(omega) ** 2
    mu_hat = np.conj(csi_reflected) * csi_incident * np.exp(1j * phases)
    d = 1.0 + w2_4 * rbi2 * rbo2 * beta**2
    quad = (
        w2_4
        * beta**2
        * (ri2 * rbo2 * np.abs(csi_incident) ** 2 + rbi2 * ro2 * np.abs(csi_reflected) ** 2)
        / d
    )
    coup = (
        link.aging_rho_incident
        * link.aging_rho_reflected
        * np.real(np.conj(omega) * beta * mu_hat)
        / d
    )
    log_mag = -np.sum(np.log(d)) - np.sum(quad)
    return complex(np.exp(log_mag) * np.exp(1j * np.sum(coup)))


def gaussian_conditioning(
    link: A2GLink,
    phases: np.ndarray,
    csi_incident: np.ndarray,
    csi_reflected: np.ndarray,
) -> GaussianConditioning:
    """Conditional mean/variance of Z given the estimates (exact moments)."""
    beta = link.amplitudes
    ri, ro = link.aging_rho_incident, link.aging_rho_reflected
    ri2, ro2 = ri * ri, ro * ro
    rbi2, rbo2 = 1.0 - ri2, 1.0 - ro2
    mu = ro * ri * np.sum(
        beta * np.exp(1j * phases) * np.conj(csi_reflected) * csi_incident
    )
    sig2 = float(
        np.sum(
            beta**2
            * (
                ro2 * rbi2 * np.abs(csi_reflected) ** 2
                + rbo2 * ri2 * np.abs(csi_incident) ** 2
                + rbo2 * rbi2
            )
        )
    )
    return GaussianConditioning(mu_z=complex(mu), sigma_z2=sig2)


# ---------------------------------------------------------------------------
# Moment machinery
# ---------------------------------------------------------------------------


def ltc_moments(k: float, gamma_bar: float, x_moments: MomentTriple) -> MomentTriple:
    """Moments of Y ~ gamma_bar * ncchi2(k, X) with random noncentrality X.

    Total-cumulance composition; a deterministic X (zero variance and third
    moment) reduces to the plain noncentral chi-square moments.
    """
    if k <= 0 or gamma_bar <= 0:
        raise ValueError("k and gamma_bar must be positive")
    ex, vx, m3x = x_moments.mean, x_moments.variance, x_moments.mu3
    return MomentTriple(
        mean=(k + ex) * gamma_bar,
        variance=(k + vx + 2.0 * ex) * gamma_bar**2,
        mu3=(2.0 * k + 6.0 * ex + 6.0 * vx + m3x) * gamma_bar**3,
    )


def match_ncchi2(m: MomentTriple) -> NoncentralChi2Params:
    """Parameter triple whose scaled noncentral chi-square reproduces ``m``.

    Three-moment inversion when the moments sit in the feasible wedge
    (variance^2 > mean*mu3/2 > 3/4 variance^2); otherwise a two-moment
    central (gamma) match with zero noncentrality.
    """
    e, v, m3 = m.mean, m.variance, m.mu3
    if e <= 0 or v <= 0:
        raise ValueError("mean and variance must be positive")
    half_em3 = 0.5 * e * m3
    if v * v > half_em3 > 0.75 * v * v:
        gamma_bar = (v - math.sqrt(v * v - half_em3)) / e
        lam = (v / gamma_bar - e) / gamma_bar
        k = e / gamma_bar - lam
        if gamma_bar > 0 and k > 0:
            return NoncentralChi2Params(k, max(lam, 0.0), gamma_bar)
    return NoncentralChi2Params(e * e / v, 0.0, v / e)


def _per_element_abs2_moments(k_factor: float) -> tuple[float, float]:
    """(variance, third central moment) of |h|^2 for unit-power Rician h."""
    kp1 = k_factor + 1.0
    return (1.0 + 2.0 * k_factor) / kp1**2, (2.0 + 6.0 * k_factor) / kp1**3


def sigma_z2_moments(link: A2GLink) -> MomentTriple:
    """Exact first three moments of the conditional scatter power sigma_Z^2."""
    ri2 = link.aging_rho_incident**2
    ro2 = link.aging_rho_reflected**2
    rbi2, rbo2 = 1.0 - ri2, 1.0 - ro2
    x_out = ro2 * rbi2  # weight on |csi_reflected|^2
    x_in = rbo2 * ri2  # weight on |csi_incident|^2
    beta2 = link.amplitudes**2
    v_out, m3_out = _per_element_abs2_moments(link.rician_k_reflected)
    v_in, m3_in = _per_element_abs2_moments(link.rician_k_incident)
    return MomentTriple(
        mean=(1.0 - ri2 * ro2) * float(np.sum(beta2)),
        variance=(x_out**2 * v_out + x_in**2 * v_in) * float(np.sum(beta2**2)),
        mu3=(x_out**3 * m3_out + x_in**3 * m3_in) * float(np.sum(beta2**3)),
    )


def sigma_z2_match(link: A2GLink) -> tuple[float, float, float]:
    """Per-element (scale, shape, noncentrality) for the scatter power.

    Totals scale with N: sigma_Z^2 ~ scale * ncchi2(N*shape, N*noncentrality).
    A (near-)deterministic scatter power maps to a huge central shape, which
    downstream product kernels resolve to the exact deterministic limit.
    """
    mom = sigma_z2_moments(link)
    n = link.n_elements
    if mom.mean <= 0:
        raise ValueError("degenerate scatter power: both hops fully coherent")
    if mom.variance <= _DEGENERATE_REL_VAR * mom.mean**2:
        return (mom.mean / _DEGENERATE_SHAPE, _DEGENERATE_SHAPE / n, 0.0)
    p = match_ncchi2(mom)
    return (p.scale, p.shape / n, p.noncentrality / n)


@dataclass(frozen=True)
class MuZStats:
    """Moment summary of the conditional-mean term mu_Z.

    mean_abs2 = E|mu_Z|^2, abs2_mean = |E mu_Z|^2, var_abs2 = Var|mu_Z|^2;
    the complex mean and the central/pseudo variances are kept for reuse.
    """

    mean_abs2: float
    abs2_mean: float
    var_abs2: float
    mean: complex
    var_c: float
    pseudo_var: complex


def mu_z_moments(
    link: A2GLink, psc: PscConfig, taylor_switch: float = TAYLOR_SWITCH
) -> MuZStats:
    """Closed-form moments of mu_Z under a phase configuration.

    Delayed phases make every per-element product real nonnegative, so cross
    terms factor through envelope means; CSI-independent configurations
    factor through the per-element phase CF.  Var|mu_Z|^2 uses the conditional
    Gaussian square when the mean is negligible and a first-order expansion
    around the (rotated) mean otherwise.
    """
    beta = link.amplitudes
    ri, ro = link.aging_rho_incident, link.aging_rho_reflected
    c = ri * ro
    c2 = c * c
    k_in, k_out = link.rician_k_incident, link.rician_k_reflected

    if isinstance(psc, IdealPsc):
        raise ValueError("no closed-form moments for the ideal benchmark")

    if isinstance(psc, DelayedPsc):
        env = rician_envelope_mean(k_in) * rician_envelope_mean(k_out)
        cq1 = _quantization_cf(psc.quantization_bits, 1.0)
        cq2 = _quantization_cf(psc.quantization_bits, 2.0)
        s1, s2 = float(np.sum(beta)), float(np.sum(beta**2))
        mean = c * env * cq1 * s1
        mean_abs2 = c2 * (s2 + (env * cq1) ** 2 * (s1 * s1 - s2))
        var_c = c2 * s2 * (1.0 - (env * cq1) ** 2)
        pseudo = c2 * s2 * (cq2 - (env * cq1) ** 2)
        mean = complex(mean)
        pseudo = complex(pseudo)
    else:
        g = math.sqrt(
            k_in * k_out / ((k_in + 1.0) * (k_out + 1.0))
        )  # LoS coupling of E[mu_hat]
        u = np.conj(link.los_reflected) * link.los_incident
        phi1 = np.array([_phase_cf(psc, n, 1.0) for n in range(link.n_elements)])
        phi2 = np.array([_phase_cf(psc, n, 2.0) for n in range(link.n_elements)])
        em = g * u * phi1  # E[mu_hat_n]
        em2 = g * g * u * u * phi2  # E[mu_hat_n^2]
        mean = complex(c * np.sum(beta * em))
        s2 = float(np.sum(beta**2))
        mean_abs2 = c2 * (
            s2 + abs(np.sum(beta * em)) ** 2 - float(np.sum(beta**2 * np.abs(em) ** 2))
        )
        var_c = c2 * (s2 - float(np.sum(beta**2 * np.abs(em) ** 2)))
        pseudo = complex(c2 * np.sum(beta**2 * (em2 - em * em)))

    abs2_mean = abs(mean) ** 2
    if var_c <= 0.0:
        var_abs2 = 0.0
    elif abs(mean) < taylor_switch * math.sqrt(var_c):
        var_abs2 = var_c * var_c
    else:
        phase = mean / abs(mean)
        var_re = 0.5 * (var_c + (pseudo * np.conj(phase) ** 2).real)
        var_abs2 = 4.0 * abs2_mean * max(var_re, 0.0)
    return MuZStats(
        mean_abs2=mean_abs2,
        abs2_mean=abs2_mean,
        var_abs2=var_abs2,
        mean=mean,
        var_c=var_c,
        pseudo_var=pseudo,
    )


@dataclass(frozen=True)
class GammaRMatch:
    """Shape factor of the normalized conditional power (shape fixed at 1
    unless the central fallback fired)."""

    scale: float
    noncentrality: float
    shape: float = 1.0
    central_fallback: bool = False


def gamma_r_match(
    link: A2GLink, psc: PscConfig, taylor_switch: float = TAYLOR_SWITCH
) -> GammaRMatch:
    """Two-moment fit of gamma_R = |Z|^2 / sigma_Z^2 as scale*ncchi2(1, lam).

    The discriminant can go negative near the Rayleigh corner; the fallback
    is the central gamma match (noncentrality zero, shape freed), which
    preserves both moments and is continuous across the switch.
    """
    sm = sigma_z2_moments(link)
    if sm.mean <= 0:
        raise ValueError("degenerate scatter power: both hops fully coherent")
    mz = mu_z_moments(link, psc, taylor_switch)
    e_gr = 1.0 + mz.mean_abs2 / sm.mean
    var_z2 = (
        2.0 * sm.variance
        + sm.mean**2
        + 2.0 * sm.mean * mz.mean_abs2
        + mz.var_abs2
    )
    var_gr = (var_z2 - sm.variance * e_gr**2) / (sm.variance + sm.mean**2)
    if var_gr <= 0.0:
        raise ValueError(
            f"non-positive matched variance ({var_gr:.3e}); moments inconsistent"
        )
    disc = e_gr * e_gr - var_gr
    if disc >= 0.0:
        scale = e_gr - math.sqrt(disc)
        lam = math.sqrt(disc) / scale
        return GammaRMatch(scale=scale, noncentrality=lam)
    return GammaRMatch(
        scale=var_gr / e_gr,
        noncentrality=0.0,
        shape=e_gr * e_gr / var_gr,
        central_fallback=True,
    )


# ---------------------------------------------------------------------------
# Product law of the SNR
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class A2GCharacterization:
    """Matched product law of the hop SNR.

    SNR = mean_snr * (scatter part) * (fade part) with
    scatter ~ scatter_scale * ncchi2(N*scatter_shape, N*scatter_noncentrality)
    fade    ~ fade_scale * ncchi2(fade_shape, fade_noncentrality).
    """

    n_elements: int
    scatter_scale: float
    scatter_shape: float
    scatter_noncentrality: float
    fade_scale: float
    fade_shape: float
    fade_noncentrality: float
    mean_snr: float
    central_fallback: bool = False

    @property
    def mean(self) -> float:
        n = self.n_elements
        return (
            self.mean_snr
            * self.scatter_scale
            * n
            * (self.scatter_shape + self.scatter_noncentrality)
            * self.fade_scale
            * (self.fade_shape + self.fade_noncentrality)
        )


def characterize_a2g(
    link: A2GLink, psc: PscConfig, taylor_switch: float = TAYLOR_SWITCH
) -> A2GCharacterization:
    """Run the full matching chain for a link/configuration pair."""
    scale_z, k_z, lam_z = sigma_z2_match(link)
    gr = gamma_r_match(link, psc, taylor_switch)
    return A2GCharacterization(
        n_elements=link.n_elements,
        scatter_scale=scale_z,
        scatter_shape=k_z,
        scatter_noncentrality=lam_z,
        fade_scale=gr.scale,
        fade_shape=gr.shape,
        fade_noncentrality=gr.noncentrality,
        mean_snr=link.mean_snr,
        central_fallback=gr.central_fallback,
    )


def _poisson_window(lam: float, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Poisson indices and weights over the [0, B] truncation window,
    dropping entries too small to matter."""
    _, hi = poisson_truncation(lam, eps)
    idx = np.arange(0, hi + 1)
    w = stats.poisson.pmf(idx, lam) if lam > 0 else np.ones(1)
    keep = w > 1e-17
    return idx[keep], w[keep]


def _product_terms(
    chr_: A2GCharacterization, eps: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, float]:
    """Shared setup of the double Poisson mixture."""
    n = chr_.n_elements
    i1, w1 = _poisson_window(n * chr_.scatter_noncentrality, eps)
    i2, w2 = _poisson_window(chr_.fade_noncentrality, eps)
    a = n * chr_.scatter_shape + i1
    alpha = chr_.fade_shape + i2
    s = chr_.scatter_scale * chr_.fade_scale * chr_.mean_snr
    return a, w1, alpha, w2, s


def a2g_pdf(chr_: A2GCharacterization, z, eps: float = POISSON_EPS):
    """SNR density: Poisson-weighted mixture of gamma-product kernels."""
    a, w1, alpha, w2, s = _product_terms(chr_, eps)
    zs = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(zs <= 0):
        raise ValueError("z must be positive")
    u = zs / s
    out = np.zeros_like(u)
    for ai, wa in zip(a, w1):
        acc = np.zeros_like(u)
        for aj, wb in zip(alpha, w2):
            acc += wb * gk_pdf(ai, aj, u)
        out += wa * acc
    out /= s
    return out if np.ndim(z) else float(out[0])


def a2g_cdf(chr_: A2GCharacterization, z, eps: float = POISSON_EPS):
    """SNR distribution function (same mixture, integrated kernels)."""
    a, w1, alpha, w2, s = _product_terms(chr_, eps)
    zs = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(zs <= 0):
        raise ValueError("z must be positive")
    u = zs / s
    out = np.zeros_like(u)
    # Fast path: every term in the large-shape regime reduces to a
    # regularized incomplete gamma, vectorized over the k2 window.
    if np.min(a) >= GK_LARGE_SHAPE and np.max(alpha) <= np.min(a):
        for ai, wa in zip(a, w1):
            terms = special.gammainc(alpha[:, None], u[None, :] / ai)
            out += wa * (w2 @ terms)
    else:
        use_grid = u.size > 64
        for ai, wa in zip(a, w1):
            for aj, wb in zip(alpha, w2):
                if max(ai, aj) >= GK_LARGE_SHAPE:
                    val = special.gammainc(min(ai, aj), u / max(ai, aj))
                elif use_grid:
                    val = gk_cdf_grid(ai, aj, u)
                else:
                    val = gk_cdf(ai, aj, u)
                out += wa * wb * val
    out = np.clip(out, 0.0, 1.0)
    return out if np.ndim(z) else float(out[0])


def a2g_cdf_asymptotic(link: A2GLink, psc: PscConfig, x):
    """Large-surface Gaussian approximation of the SNR cdf.

    The scatter power concentrates at its mean and the fade factor is
    Gaussianized; accurate only for element counts in the hundreds.
    """
    if link.n_elements < 100:
        warnings.warn(
            "asymptotic cdf is calibrated for large element counts (N >= 100)",
            stacklevel=2,
        )
    gr = gamma_r_match(link, psc)
    omega = link.mean_snr * sigma_z2_moments(link).mean
    xs = np.asarray(x, dtype=float)
    arg = (xs / (gr.scale * omega) - (gr.shape + gr.noncentrality)) / math.sqrt(
        gr.shape + 2.0 * gr.noncentrality
    )
    out = 1.0 - q_func(arg)
    return out if np.ndim(x) else float(out)


def avg_a2g_snr(link: A2GLink, psc: PscConfig) -> float:
    """Exact average SNR: mean_snr * (E[sigma_Z^2] + E|mu_Z|^2)."""
    return link.mean_snr * (
        sigma_z2_moments(link).mean + mu_z_moments(link, psc).mean_abs2
    )
