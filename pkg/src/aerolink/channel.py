"""Time-varying Rician channels: UPA steering, elevation-dependent Rician
factor, Jakes-correlated aging, and urban path loss.

Vectors returned here are plain complex numpy arrays.  Samplers take an
explicit Generator so parallel trials can hold independent streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import j0

from .geom_mobility import vec3

__all__ = [
    "UpaGeometry",
    "RicianFactorModel",
    "AgingState",
    "PathLossModel",
    "ind2sub",
    "steering_vector",
    "rician_k",
    "jakes_rho",
    "sample_rician_vector",
    "age_channel",
    "los_with_doppler",
    "path_loss",
]


@dataclass(frozen=True)
class UpaGeometry:
    """Uniform planar array in the yz-plane; element 1 sits at the origin."""

    n_h: int
    n_v: int
    d_h: float
    d_v: float
    wavelength: float

    def __post_init__(self) -> None:
        if self.n_h < 1 or self.n_v < 1:
            raise ValueError("array needs at least one element per axis")
        if min(self.d_h, self.d_v, self.wavelength) <= 0:
            raise ValueError("spacings and wavelength must be positive")

    @property
    def size(self) -> int:
        return self.n_h * self.n_v

    def element_positions(self) -> np.ndarray:
        """(size, 3) element coordinates, horizontal index running fastest."""
        m = np.arange(1, self.size + 1)
        i = (m - 1) % self.n_h + 1
        j = (m - 1) // self.n_h + 1
        out = np.zeros((self.size, 3))
        out[:, 1] = (i - 1) * self.d_h
        out[:, 2] = (j - 1) * self.d_v
        return out


@dataclass(frozen=True)
class RicianFactorModel:
    """Elevation-driven Rician factor: K(theta) = k0 * (kpi/k0)^(2 theta / pi).

    nlos=True short-circuits to K = 0 (pure Rayleigh).
    """

    k0: float
    kpi: float
    nlos: bool = False

    def __post_init__(self) -> None:
        if self.k0 < 0 or self.kpi < 0:
            raise ValueError("Rician factors must be nonnegative")
        if self.kpi > 0 and self.k0 == 0 and not self.nlos:
            raise ValueError("k0 must be positive when kpi is positive")


@dataclass(frozen=True)
class AgingState:
    """Temporal correlation between the CSI estimate and the live channel."""

    rho: float
    rho_bar: float
    t_k: int = 0
    T_s: float = 0.0

    def __post_init__(self) -> None:
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [-1, 1]")
        if abs(self.rho**2 + self.rho_bar**2 - 1.0) > 1e-12:
            raise ValueError("rho^2 + rho_bar^2 must equal 1")

    @classmethod
    def from_rho(cls, rho: float, t_k: int = 0, T_s: float = 0.0) -> "AgingState":
        return cls(rho=rho, rho_bar=math.sqrt(max(0.0, 1.0 - rho * rho)),
                   t_k=t_k, T_s=T_s)

    @classmethod
    def from_delay(cls, delta_samples: int, T_s: float, f_max: float) -> "AgingState":
        return cls.from_rho(jakes_rho(delta_samples, T_s, f_max),
                            t_k=delta_samples, T_s=T_s)


@dataclass(frozen=True)
class PathLossModel:
    """Urban-micro LoS path loss.  kind selects the terrestrial or aerial fit.

    h_ut_m only matters for the aerial variant, where the distance slope
    flattens with terminal height.
    """

    kind: str
    fc: float
    h_ut_m: float = 1.5

    _KINDS = ("UMi-LoS", "UMi-AV")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ValueError(f"kind must be one of {self._KINDS}")
        if self.fc <= 0:
            raise ValueError("carrier frequency must be positive")
        if self.kind == "UMi-AV" and self.h_ut_m <= 0:
            raise ValueError("aerial variant needs a positive terminal height")


def ind2sub(m: int, n_h: int) -> tuple[int, int]:
    """1-based (row, column) of element m in a grid with n_h per row."""
    if m < 1:
        raise ValueError("element index is 1-based")
    i = (m - 1) % n_h + 1
    j = (m - 1) // n_h + 1
    return i, j


def steering_vector(geom: UpaGeometry, r) -> np.ndarray:
    """Unit-norm UPA response toward unit direction r.

    Entry m is exp(j*(2*pi/wavelength)*r.p_m)/sqrt(size).
    """
    r = vec3(r)
    if abs(float(np.linalg.norm(r)) - 1.0) > 1e-9:
        raise ValueError("r must be a unit vector")
    phases = (2.0 * math.pi / geom.wavelength) * (geom.element_positions() @ r)
    return np.exp(1j * phases) / math.sqrt(geom.size)


def rician_k(model: RicianFactorModel, theta: float) -> float:
    """Linear Rician factor at elevation theta (rad, in [0, pi])."""
    if model.nlos or model.k0 == 0.0:
        return 0.0
    if not 0.0 <= theta <= math.pi + 1e-12:
        raise ValueError("theta must lie in [0, pi]")
    return model.k0 * math.exp((2.0 / math.pi) * theta * math.log(model.kpi / model.k0))


def jakes_rho(delta_samples: int, T_s: float, f_max: float) -> float:
    """Temporal correlation J0(2*pi*delta_samples*T_s*f_max)."""
    if delta_samples < 0:
        raise ValueError("delta_samples must be nonnegative")
    return float(j0(2.0 * math.pi * delta_samples * T_s * f_max))


def _cn(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard circular complex Gaussian, unit variance per entry."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def sample_rician_vector(K: float, los, rng: np.random.Generator) -> np.ndarray:
    """Draw h = sqrt(K/(K+1))*los + sqrt(1/(K+1))*g, g standard complex normal."""
    if K < 0:
        raise ValueError("K must be nonnegative")
    los = np.asarray(los, dtype=complex)
    g = _cn(rng, los.shape)
    return math.sqrt(K / (K + 1.0)) * los + g / math.sqrt(K + 1.0)


def age_channel(h_hat, aging: AgingState, rng: np.random.Generator) -> np.ndarray:
    """Evolve an estimate forward: h = rho*h_hat + rho_bar*z."""
    h_hat = np.asarray(h_hat, dtype=complex)
    if aging.rho_bar == 0.0:
        return h_hat.copy()
    return aging.rho * h_hat + aging.rho_bar * _cn(rng, h_hat.shape)


def los_with_doppler(alpha, delta_f: float, t: float, scale: float) -> np.ndarray:
    """Deterministic LoS component: scale * alpha rotated by 2*pi*t*delta_f."""
    alpha = np.asarray(alpha, dtype=complex)
    return scale * alpha * np.exp(1j * 2.0 * math.pi * t * delta_f)


def path_loss(model: PathLossModel, d3d: float) -> float:
    """Linear power gain (<= 1) over a 3-D distance in meters."""
    if d3d <= 0:
        raise ValueError("distance must be positive")
    f_ghz = model.fc / 1e9
    if model.kind == "UMi-LoS":
        pl_db = 32.4 + 21.0 * math.log10(d3d) + 20.0 * math.log10(f_ghz)
    else:
        slope = 22.25 - 0.5 * math.log10(model.h_ut_m)
        pl_db = 30.9 + slope * math.log10(d3d) + 20.0 * math.log10(f_ghz)
    return min(1.0, 10.0 ** (-pl_db / 10.0))
