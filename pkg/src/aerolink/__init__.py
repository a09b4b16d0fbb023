"""Aging-aware analysis of a relayed air link assisted by a reflecting surface.

The package models a two-hop decode-and-forward link: a multi-antenna ground
station beamforms to an aerial relay, which forwards through a passive
reflecting surface to a ground user.  Channel estimates age between
estimation and use, and every analytic object here (SNR laws, outage
probabilities, rate adaptation) carries that aging explicitly.

Layering, bottom up:

- :mod:`aerolink.specfun` - noncentral chi-square machinery, Marcum Q,
  Bessel/Laguerre helpers, the product-law kernel.
- :mod:`aerolink.geom_mobility` - coordinates, Doppler, waypoint mobility.
- :mod:`aerolink.channel` - array responses, Rician factors, aging model,
  path loss.
- :mod:`aerolink.g2a` - ground-to-air SNR law under aged beamforming.
- :mod:`aerolink.a2g` - air-to-ground SNR law through the surface, for the
  supported phase-shift configurations.
- :mod:`aerolink.performance` - end-to-end outage, floors, rate adaptation,
  trajectory evaluation.
- :mod:`aerolink.mc_oracle` - reproducible Monte Carlo reference samplers
  and fit statistics.
- :mod:`aerolink.scenario` / :mod:`aerolink.cli` - JSON experiment
  descriptions and the batch CSV front end.
"""

from .a2g import (
    A2GCharacterization,
    A2GLink,
    DelayedPsc,
    FixedPsc,
    IdealPsc,
    LosBasedPsc,
    MomentTriple,
    RandomUniformPsc,
    a2g_cdf,
    a2g_cdf_asymptotic,
    a2g_pdf,
    avg_a2g_snr,
    characterize_a2g,
    conditional_cf,
    gamma_r_match,
    match_ncchi2,
    sigma_z2_match,
)
from .channel import (
    AgingState,
    PathLossModel,
    RicianFactorModel,
    UpaGeometry,
    jakes_rho,
    path_loss,
    rician_k,
    steering_vector,
)
from .g2a import (
    G2ALink,
    G2AMixture,
    g2a_cdf,
    g2a_cdf_asymptotic,
    g2a_mean,
    g2a_pdf,
    g2a_pdf_direct,
    mixture_params,
)
from .geom_mobility import (
    MobilityState,
    RpgmConfig,
    RwmConfig,
    doppler_shift,
    elevation_angle,
    max_doppler,
    rpgm_advance,
    rpgm_init,
    rwm_advance,
    rwm_init,
)
from .mc_oracle import (
    FitReport,
    TrialBatch,
    ecdf,
    kl_vs_pdf,
    ks_stat,
    sim_a2g,
    sim_eop,
    sim_g2a,
)
from .performance import (
    AdaptivePolicy,
    AdaptiveResult,
    OutageQuery,
    adaptive_gamma_th,
    eop,
    eop_floor,
    eop_trajectory,
)
from .scenario import (
    Scenario,
    ScenarioError,
    build_a2g_link,
    build_g2a_link,
    default_scenario,
    scenario_from_dict,
    scenario_from_json,
    trajectory_snapshots,
)
from .specfun import (
    KappaMuParams,
    NoncentralChi2Params,
    gk_cdf,
    gk_pdf,
    kappa_mu_convert,
    kappa_mu_invert,
    marcum_q,
    ncchi2_cdf,
    ncchi2_pdf,
)

__version__ = "0.1.0"
