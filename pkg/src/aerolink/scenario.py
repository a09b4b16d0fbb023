"""Experiment description: one JSON document that pins every knob of a run.

A scenario bundles node geometry, array shapes, link budget, channel-aging
state, phase-shift configuration, mobility settings, and the RNG seed.  Field
names carry explicit units ("p_s_dbm", "fc_hz") so files are self-describing
and diffable.  All dB -> linear conversions happen here, exactly once; the
link objects handed to the analysis modules are pure linear-scale.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterator, Sequence

import numpy as np

from .a2g import (
    A2GLink,
    DelayedPsc,
    FixedPsc,
    IdealPsc,
    LosBasedPsc,
    PscConfig,
    RandomUniformPsc,
    los_based_psc,
)
from .channel import (
    PathLossModel,
    RicianFactorModel,
    UpaGeometry,
    jakes_rho,
    path_loss,
    rician_k,
    steering_vector,
)
from .g2a import G2ALink
from .geom_mobility import (
    SPEED_OF_LIGHT,
    MobilityState,
    RpgmConfig,
    RwmConfig,
    elevation_angle,
    rpgm_advance,
    rpgm_init,
    rwm_advance,
    rwm_init,
    unit_toward,
    vec3,
)

__all__ = [
    "ScenarioError",
    "ArrayShape",
    "PscSettings",
    "MobilitySettings",
    "Scenario",
    "default_scenario",
    "scenario_from_dict",
    "scenario_from_json",
    "scenario_to_dict",
    "noise_power_dbm",
    "noise_power_mw",
    "dbm_to_mw",
    "db_to_linear",
    "build_g2a_link",
    "build_a2g_link",
    "build_psc",
    "TrajectorySnapshot",
    "trajectory_snapshots",
]


class ScenarioError(ValueError):
    """Scenario validation failure; ``field`` names the offending entry."""

    def __init__(self, field_name: str, reason: str):
        self.field = field_name
        super().__init__(f"scenario field '{field_name}': {reason}")


def dbm_to_mw(x_dbm: float) -> float:
    """Linear milliwatts for a dBm figure."""
    return 10.0 ** (x_dbm / 10.0)


def db_to_linear(x_db: float) -> float:
    """Linear power ratio for a dB figure."""
    return 10.0 ** (x_db / 10.0)


# ---------------------------------------------------------------------------
# Scenario schema
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArrayShape:
    """Rectangular array layout (horizontal x vertical element counts)."""

    n_h: int
    n_v: int

    def __post_init__(self):
        if self.n_h < 1 or self.n_v < 1:
            raise ValueError("array dimensions must be >= 1")

    @property
    def size(self) -> int:
        return self.n_h * self.n_v


@dataclass(frozen=True)
class PscSettings:
    """Phase-shift configuration choice, JSON-level view.

    kind: one of "delayed", "random_uniform", "fixed", "los", "ideal".
    The "fixed" kind reads ``phases_rad`` (scalar broadcast or per-element
    list).  ``quantization_bits`` optionally snaps phases to a 2^b grid.
    """

    kind: str = "delayed"
    quantization_bits: int | None = None
    phases_rad: float | tuple[float, ...] = 0.0
    low_rad: float = -math.pi
    high_rad: float = math.pi


@dataclass(frozen=True)
class MobilitySettings:
    """Random-waypoint leader (GUE) plus reference-point-group follower (UAV)."""

    gue_area_center_m: tuple[float, float, float] = (75.0, 25.0, 1.5)
    gue_area_radius_m: float = 20.0
    gue_speed_min_mps: float = 40.0
    gue_speed_max_mps: float = 40.0
    pause_probability: float = 0.0
    pause_min_s: float = 0.0
    pause_max_s: float = 0.0
    uav_reference_offset_m: tuple[float, float, float] = (-25.0, -25.0, 118.5)
    uav_deviation_radius_m: float = 5.0
    uav_speed_delta_min_mps: float = 0.0
    uav_speed_delta_max_mps: float = 5.0

    def rwm_config(self) -> RwmConfig:
        return RwmConfig(
            region_center=np.array(self.gue_area_center_m),
            region_radius=self.gue_area_radius_m,
            v_min=self.gue_speed_min_mps,
            v_max=self.gue_speed_max_mps,
            p_pause=self.pause_probability,
            tau_min=self.pause_min_s,
            tau_max=self.pause_max_s,
        )

    def rpgm_config(self) -> RpgmConfig:
        return RpgmConfig(
            deviation_radius=self.uav_deviation_radius_m,
            dv_min=self.uav_speed_delta_min_mps,
            dv_max=self.uav_speed_delta_max_mps,
            reference_offset=np.array(self.uav_reference_offset_m),
        )


@dataclass(frozen=True)
class Scenario:
    """Full experiment description with explicit units in every field name."""

    seed: int = 20240
    n_trials: int = 100_000
    fc_hz: float = 2.0e9
    bandwidth_hz: float = 10.0e6
    noise_figure_db: float = 5.0
    noise_density_dbm_per_hz: float = -174.0
    sample_period_s: float = 1.0e-5
    aging_samples: int = 5000
    trajectory_step_s: float = 0.1
    rician_k0_db: float = 10.0
    rician_kpi_db: float = 10.0
    nlos: bool = False
    target_se_bps_hz: float = 1.0
    p_s_dbm: float = 0.0
    p_u_dbm: float = 0.0
    bs_position_m: tuple[float, float, float] = (0.0, 0.0, 10.0)
    uav_position_m: tuple[float, float, float] = (56.0, -10.0, 120.0)
    ris_position_m: tuple[float, float, float] = (75.0, 0.0, 25.0)
    gue_position_m: tuple[float, float, float] = (80.68, 14.15, 1.5)
    bs_array: ArrayShape = field(default_factory=lambda: ArrayShape(3, 3))
    ris_array: ArrayShape = field(default_factory=lambda: ArrayShape(16, 16))
    ris_amplitude: float | tuple[float, ...] = 1.0
    element_spacing_wavelengths: float = 0.5
    uav_speed_mps: float = 40.0
    gue_speed_mps: float = 40.0
    psc: PscSettings = field(default_factory=PscSettings)
    mobility: MobilitySettings = field(default_factory=MobilitySettings)

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.fc_hz


def default_scenario() -> Scenario:
    """The shipped baseline configuration (see README for provenance)."""
    return Scenario()


# --- JSON ingestion with field-level diagnostics ---------------------------


def _need(d: dict, key: str, kind, where: str):
    v = d[key]
    if kind is float:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ScenarioError(where, f"expected a number, got {v!r}")
        return float(v)
    if kind is int:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ScenarioError(where, f"expected an integer, got {v!r}")
        return int(v)
    if kind is bool:
        if not isinstance(v, bool):
            raise ScenarioError(where, f"expected true/false, got {v!r}")
        return v
    raise AssertionError(kind)


def _vec3_field(d: dict, key: str, where: str) -> tuple[float, float, float]:
    v = d[key]
    if not isinstance(v, (list, tuple)) or len(v) != 3:
        raise ScenarioError(where, f"expected a 3-element list, got {v!r}")
    try:
        out = tuple(float(c) for c in v)
    except (TypeError, ValueError):
        raise ScenarioError(where, f"expected numeric entries, got {v!r}") from None
    if not all(math.isfinite(c) for c in out):
        raise ScenarioError(where, "entries must be finite")
    return out  # type: ignore[return-value]


def _array_shape(d: dict, key: str) -> ArrayShape:
    v = d[key]
    if not isinstance(v, dict) or set(v) != {"n_h", "n_v"}:
        raise ScenarioError(key, f'expected {{"n_h": ..., "n_v": ...}}, got {v!r}')
    try:
        return ArrayShape(_need(v, "n_h", int, f"{key}.n_h"), _need(v, "n_v", int, f"{key}.n_v"))
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(key, str(exc)) from None


_PSC_KINDS = ("delayed", "random_uniform", "fixed", "los", "ideal")


def _psc_settings(d: dict, key: str = "psc") -> PscSettings:
    v = d[key]
    if not isinstance(v, dict):
        raise ScenarioError(key, f"expected an object, got {v!r}")
    allowed = {"kind", "quantization_bits", "phases_rad", "low_rad", "high_rad"}
    for k in v:
        if k not in allowed:
            raise ScenarioError(f"{key}.{k}", "unknown entry")
    kind = v.get("kind", "delayed")
    if kind not in _PSC_KINDS:
        raise ScenarioError(f"{key}.kind", f"must be one of {_PSC_KINDS}, got {kind!r}")
    bits = v.get("quantization_bits")
    if bits is not None:
        if isinstance(bits, bool) or not isinstance(bits, int) or bits < 1:
            raise ScenarioError(f"{key}.quantization_bits", f"expected a positive integer or null, got {bits!r}")
    phases = v.get("phases_rad", 0.0)
    if isinstance(phases, (list, tuple)):
        try:
            phases = tuple(float(p) for p in phases)
        except (TypeError, ValueError):
            raise ScenarioError(f"{key}.phases_rad", "expected numbers") from None
    elif isinstance(phases, bool) or not isinstance(phases, (int, float)):
        raise ScenarioError(f"{key}.phases_rad", f"expected a number or list, got {phases!r}")
    else:
        phases = float(phases)
    low = v.get("low_rad", -math.pi)
    high = v.get("high_rad", math.pi)
    for name, val in (("low_rad", low), ("high_rad", high)):
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ScenarioError(f"{key}.{name}", f"expected a number, got {val!r}")
    return PscSettings(kind=kind, quantization_bits=bits, phases_rad=phases,
                       low_rad=float(low), high_rad=float(high))


def _mobility_settings(d: dict, key: str = "mobility") -> MobilitySettings:
    v = d[key]
    if not isinstance(v, dict):
        raise ScenarioError(key, f"expected an object, got {v!r}")
    base = MobilitySettings()
    allowed = set(base.__dataclass_fields__)
    for k in v:
        if k not in allowed:
            raise ScenarioError(f"{key}.{k}", "unknown entry")
    kw = {}
    for k in v:
        if k in ("gue_area_center_m", "uav_reference_offset_m"):
            kw[k] = _vec3_field(v, k, f"{key}.{k}")
        else:
            kw[k] = _need(v, k, float, f"{key}.{k}")
    out = replace(base, **kw)
    checks = [
        ("gue_area_radius_m", out.gue_area_radius_m > 0, "must be > 0"),
        ("gue_speed_min_mps", 0 <= out.gue_speed_min_mps <= out.gue_speed_max_mps,
         "need 0 <= min <= max"),
        ("pause_probability", 0 <= out.pause_probability <= 1, "must lie in [0, 1]"),
        ("pause_min_s", 0 <= out.pause_min_s <= out.pause_max_s, "need 0 <= min <= max"),
        ("uav_deviation_radius_m", out.uav_deviation_radius_m >= 0, "must be >= 0"),
        ("uav_speed_delta_min_mps",
         0 <= out.uav_speed_delta_min_mps <= out.uav_speed_delta_max_mps,
         "need 0 <= min <= max"),
    ]
    for name, ok, msg in checks:
        if not ok:
            raise ScenarioError(f"{key}.{name}", msg)
    return out


def scenario_from_dict(doc: dict) -> Scenario:
    """Validate a JSON-shaped dict; unknown or ill-typed fields raise
    :class:`ScenarioError` naming the field.  Missing fields take defaults."""
    if not isinstance(doc, dict):
        raise ScenarioError("<root>", f"expected a JSON object, got {type(doc).__name__}")
    base = Scenario()
    known = set(base.__dataclass_fields__)
    for k in doc:
        if k not in known:
            raise ScenarioError(k, "unknown field")
    kw: dict = {}
    float_fields = {
        "fc_hz", "bandwidth_hz", "noise_figure_db", "noise_density_dbm_per_hz",
        "sample_period_s", "rician_k0_db", "rician_kpi_db", "target_se_bps_hz",
        "p_s_dbm", "p_u_dbm", "element_spacing_wavelengths",
        "uav_speed_mps", "gue_speed_mps", "trajectory_step_s",
    }
    int_fields = {"seed", "n_trials", "aging_samples"}
    pos_fields = {"bs_position_m", "uav_position_m", "ris_position_m", "gue_position_m"}
    for k in doc:
        if k in float_fields:
            kw[k] = _need(doc, k, float, k)
        elif k in int_fields:
            kw[k] = _need(doc, k, int, k)
        elif k == "nlos":
            kw[k] = _need(doc, k, bool, k)
        elif k in pos_fields:
            kw[k] = _vec3_field(doc, k, k)
        elif k in ("bs_array", "ris_array"):
            kw[k] = _array_shape(doc, k)
        elif k == "ris_amplitude":
            v = doc[k]
            if isinstance(v, (list, tuple)):
                try:
                    kw[k] = tuple(float(b) for b in v)
                except (TypeError, ValueError):
                    raise ScenarioError(k, "expected numbers") from None
            elif isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ScenarioError(k, f"expected a number or list, got {v!r}")
            else:
                kw[k] = float(v)
        elif k == "psc":
            kw[k] = _psc_settings(doc)
        elif k == "mobility":
            kw[k] = _mobility_settings(doc)
    sc = replace(base, **kw)
    _validate_scenario(sc)
    return sc


def _validate_scenario(sc: Scenario) -> None:
    positive = [
        ("fc_hz", sc.fc_hz), ("bandwidth_hz", sc.bandwidth_hz),
        ("sample_period_s", sc.sample_period_s),
        ("element_spacing_wavelengths", sc.element_spacing_wavelengths),
        ("target_se_bps_hz", sc.target_se_bps_hz),
        ("trajectory_step_s", sc.trajectory_step_s),
    ]
    for name, v in positive:
        if not (math.isfinite(v) and v > 0):
            raise ScenarioError(name, "must be a positive finite number")
    if sc.seed < 0:
        raise ScenarioError("seed", "must be >= 0")
    if sc.n_trials < 1:
        raise ScenarioError("n_trials", "must be >= 1")
    if sc.aging_samples < 0:
        raise ScenarioError("aging_samples", "must be >= 0")
    if sc.uav_speed_mps < 0:
        raise ScenarioError("uav_speed_mps", "must be >= 0")
    if sc.gue_speed_mps < 0:
        raise ScenarioError("gue_speed_mps", "must be >= 0")
    amps = np.atleast_1d(np.asarray(sc.ris_amplitude, dtype=float))
    if np.any(amps <= 0.0) or np.any(amps > 1.0):
        raise ScenarioError("ris_amplitude", "reflection amplitudes must lie in (0, 1]")
    if amps.size not in (1, sc.ris_array.size):
        raise ScenarioError(
            "ris_amplitude",
            f"need a scalar or {sc.ris_array.size} entries, got {amps.size}",
        )
    if sc.psc.kind == "fixed" and isinstance(sc.psc.phases_rad, tuple):
        if len(sc.psc.phases_rad) != sc.ris_array.size:
            raise ScenarioError(
                "psc.phases_rad",
                f"need a scalar or {sc.ris_array.size} entries, got {len(sc.psc.phases_rad)}",
            )
    if not -math.pi <= sc.psc.low_rad <= sc.psc.high_rad <= math.pi:
        raise ScenarioError("psc.low_rad", "need -pi <= low <= high <= pi")


def scenario_from_json(path: str) -> Scenario:
    """Load and validate a scenario file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScenarioError("<file>", f"{path} is not valid JSON: {exc}") from None
    return scenario_from_dict(doc)


def scenario_to_dict(sc: Scenario) -> dict:
    """JSON-shaped dict round-tripping through :func:`scenario_from_dict`."""
    psc: dict = {"kind": sc.psc.kind}
    if sc.psc.quantization_bits is not None:
        psc["quantization_bits"] = sc.psc.quantization_bits
    if sc.psc.kind == "fixed":
        p = sc.psc.phases_rad
        psc["phases_rad"] = list(p) if isinstance(p, tuple) else p
    if sc.psc.kind == "random_uniform":
        psc["low_rad"] = sc.psc.low_rad
        psc["high_rad"] = sc.psc.high_rad
    amp = sc.ris_amplitude
    return {
        "seed": sc.seed,
        "n_trials": sc.n_trials,
        "fc_hz": sc.fc_hz,
        "bandwidth_hz": sc.bandwidth_hz,
        "noise_figure_db": sc.noise_figure_db,
        "noise_density_dbm_per_hz": sc.noise_density_dbm_per_hz,
        "sample_period_s": sc.sample_period_s,
        "aging_samples": sc.aging_samples,
        "trajectory_step_s": sc.trajectory_step_s,
        "rician_k0_db": sc.rician_k0_db,
        "rician_kpi_db": sc.rician_kpi_db,
        "nlos": sc.nlos,
        "target_se_bps_hz": sc.target_se_bps_hz,
        "p_s_dbm": sc.p_s_dbm,
        "p_u_dbm": sc.p_u_dbm,
        "bs_position_m": list(sc.bs_position_m),
        "uav_position_m": list(sc.uav_position_m),
        "ris_position_m": list(sc.ris_position_m),
        "gue_position_m": list(sc.gue_position_m),
        "bs_array": {"n_h": sc.bs_array.n_h, "n_v": sc.bs_array.n_v},
        "ris_array": {"n_h": sc.ris_array.n_h, "n_v": sc.ris_array.n_v},
        "ris_amplitude": list(amp) if isinstance(amp, tuple) else amp,
        "element_spacing_wavelengths": sc.element_spacing_wavelengths,
        "uav_speed_mps": sc.uav_speed_mps,
        "gue_speed_mps": sc.gue_speed_mps,
        "psc": psc,
        "mobility": {
            "gue_area_center_m": list(sc.mobility.gue_area_center_m),
            "gue_area_radius_m": sc.mobility.gue_area_radius_m,
            "gue_speed_min_mps": sc.mobility.gue_speed_min_mps,
            "gue_speed_max_mps": sc.mobility.gue_speed_max_mps,
            "pause_probability": sc.mobility.pause_probability,
            "pause_min_s": sc.mobility.pause_min_s,
            "pause_max_s": sc.mobility.pause_max_s,
            "uav_reference_offset_m": list(sc.mobility.uav_reference_offset_m),
            "uav_deviation_radius_m": sc.mobility.uav_deviation_radius_m,
            "uav_speed_delta_min_mps": sc.mobility.uav_speed_delta_min_mps,
            "uav_speed_delta_max_mps": sc.mobility.uav_speed_delta_max_mps,
        },
    }


# ---------------------------------------------------------------------------
# Link budget helpers
# ---------------------------------------------------------------------------


def noise_power_dbm(sc: Scenario) -> float:
    """Receiver noise power: density + bandwidth + noise figure, in dBm."""
    return sc.noise_density_dbm_per_hz + 10.0 * math.log10(sc.bandwidth_hz) + sc.noise_figure_db


def noise_power_mw(sc: Scenario) -> float:
    return dbm_to_mw(noise_power_dbm(sc))


def _k_model(sc: Scenario) -> RicianFactorModel:
    return RicianFactorModel(
        k0=db_to_linear(sc.rician_k0_db),
        kpi=db_to_linear(sc.rician_kpi_db),
        nlos=sc.nlos,
    )


def _rho(sc: Scenario, speed_mps: float) -> float:
    f_max = sc.fc_hz * abs(speed_mps) / SPEED_OF_LIGHT
    return jakes_rho(sc.aging_samples, sc.sample_period_s, f_max)


def _spacing_m(sc: Scenario) -> float:
    return sc.element_spacing_wavelengths * sc.wavelength_m


# ---------------------------------------------------------------------------
# Link builders
# ---------------------------------------------------------------------------


def build_g2a_link(
    sc: Scenario,
    *,
    uav_position: Sequence[float] | None = None,
    uav_speed: float | None = None,
) -> tuple[G2ALink, np.ndarray]:
    """Ground-to-air link for the current geometry.

    Returns the link statistics plus the unit-modulus array response the
    estimated channel's LoS part points along (needed by the simulator).
    """
    p_s = vec3(sc.bs_position_m)
    p_u = vec3(sc.uav_position_m if uav_position is None else uav_position)
    speed = sc.uav_speed_mps if uav_speed is None else float(uav_speed)
    d = float(np.linalg.norm(p_u - p_s))
    model = PathLossModel(kind="UMi-AV", fc=sc.fc_hz, h_ut_m=float(p_u[2]))
    gain = path_loss(model, d)
    mean_snr = dbm_to_mw(sc.p_s_dbm) * gain / noise_power_mw(sc)
    theta = abs(elevation_angle(p_s, p_u))
    k_factor = rician_k(_k_model(sc), theta)
    rho = _rho(sc, speed)
    geom = UpaGeometry(
        n_h=sc.bs_array.n_h, n_v=sc.bs_array.n_v,
        d_h=_spacing_m(sc), d_v=_spacing_m(sc),
        wavelength=sc.wavelength_m,
    )
    los = steering_vector(geom, unit_toward(p_s, p_u)) * math.sqrt(geom.size)
    link = G2ALink(
        n_antennas=sc.bs_array.size,
        rician_k=k_factor,
        aging_rho=rho,
        mean_snr=mean_snr,
    )
    return link, los


def _ris_element_positions(sc: Scenario) -> np.ndarray:
    """RIS element coordinates in the global frame, centred on the panel."""
    geom = UpaGeometry(
        n_h=sc.ris_array.n_h, n_v=sc.ris_array.n_v,
        d_h=_spacing_m(sc), d_v=_spacing_m(sc),
        wavelength=sc.wavelength_m,
    )
    offsets = geom.element_positions()
    offsets = offsets - offsets.mean(axis=0, keepdims=True)
    return vec3(sc.ris_position_m)[None, :] + offsets


def build_a2g_link(
    sc: Scenario,
    *,
    uav_position: Sequence[float] | None = None,
    gue_position: Sequence[float] | None = None,
    uav_speed: float | None = None,
    gue_speed: float | None = None,
) -> tuple[A2GLink, PscConfig]:
    """Air-to-ground link through the reflecting surface.

    Per-element path loss is folded into the reflection amplitudes:
    with g_n = sqrt(l_in,n) * beta_n * sqrt(l_out,n) and the effective loss
    l_eff = (1/N) (sum_n g_n)^2, the link carries amplitudes g_n / sqrt(l_eff)
    and mean SNR P_U * l_eff / sigma^2, which reproduces the exact per-element
    budget while keeping the amplitude vector O(1/sqrt(N)).
    """
    p_u = vec3(sc.uav_position_m if uav_position is None else uav_position)
    p_r = vec3(sc.ris_position_m)
    p_d = vec3(sc.gue_position_m if gue_position is None else gue_position)
    v_u = sc.uav_speed_mps if uav_speed is None else float(uav_speed)
    v_d = sc.gue_speed_mps if gue_speed is None else float(gue_speed)

    elems = _ris_element_positions(sc)
    n = elems.shape[0]
    d_in = np.linalg.norm(p_u[None, :] - elems, axis=1)
    d_out = np.linalg.norm(elems - p_d[None, :], axis=1)
    model_in = PathLossModel(kind="UMi-AV", fc=sc.fc_hz, h_ut_m=float(p_u[2]))
    model_out = PathLossModel(kind="UMi-LoS", fc=sc.fc_hz)
    l_in = np.array([path_loss(model_in, float(d)) for d in d_in])
    l_out = np.array([path_loss(model_out, float(d)) for d in d_out])

    beta = np.atleast_1d(np.asarray(sc.ris_amplitude, dtype=float))
    if beta.size == 1:
        beta = np.full(n, beta[0])
    g = np.sqrt(l_in) * beta * np.sqrt(l_out)
    l_eff = float(np.sum(g)) ** 2 / n
    amps = g / math.sqrt(l_eff)
    mean_snr = dbm_to_mw(sc.p_u_dbm) * l_eff / noise_power_mw(sc)

    kmod = _k_model(sc)
    k_in = rician_k(kmod, abs(elevation_angle(p_r, p_u)))
    k_out = rician_k(kmod, abs(elevation_angle(p_d, p_r)))
    rho_in = _rho(sc, v_u)
    rho_out = _rho(sc, v_d)

    geom = UpaGeometry(
        n_h=sc.ris_array.n_h, n_v=sc.ris_array.n_v,
        d_h=_spacing_m(sc), d_v=_spacing_m(sc),
        wavelength=sc.wavelength_m,
    )
    los_in = steering_vector(geom, unit_toward(p_r, p_u)) * math.sqrt(n)
    los_out = steering_vector(geom, unit_toward(p_r, p_d)) * math.sqrt(n)

    link = A2GLink(
        amplitudes=amps,
        rician_k_incident=k_in,
        rician_k_reflected=k_out,
        aging_rho_incident=rho_in,
        aging_rho_reflected=rho_out,
        mean_snr=mean_snr,
        los_incident=los_in,
        los_reflected=los_out,
    )
    return link, build_psc(sc, link)


def build_psc(sc: Scenario, link: A2GLink) -> PscConfig:
    """Materialize the scenario's phase-shift choice against a built link."""
    p = sc.psc
    bits = p.quantization_bits
    if p.kind == "delayed":
        return DelayedPsc(quantization_bits=bits)
    if p.kind == "random_uniform":
        return RandomUniformPsc(low=p.low_rad, high=p.high_rad, quantization_bits=bits)
    if p.kind == "fixed":
        phases = np.asarray(p.phases_rad, dtype=float)
        if phases.ndim == 0:
            phases = np.full(link.n_elements, float(phases))
        return FixedPsc(phases=phases, quantization_bits=bits)
    if p.kind == "los":
        return los_based_psc(link, quantization_bits=bits)
    if p.kind == "ideal":
        return IdealPsc()
    raise ScenarioError("psc.kind", f"unhandled kind {p.kind!r}")


# ---------------------------------------------------------------------------
# Trajectory protocol
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrajectorySnapshot:
    """One evaluation point along the leader/follower trajectory."""

    index: int
    t_k: int
    g2a_link: G2ALink
    a2g_link: A2GLink
    psc: PscConfig
    g2a_los: np.ndarray
    uav_state: MobilityState
    gue_state: MobilityState


def trajectory_snapshots(sc: Scenario, steps: int) -> Iterator[TrajectorySnapshot]:
    """Walk the GUE (random waypoint) and UAV (group follower) for ``steps``
    locations, rebuilding both links at each location.

    Channel estimation restarts at every location, so the aging regressor
    uses the scenario's ``aging_samples`` with the node speeds actually in
    effect there.  Locations are sampled every ``trajectory_step_s`` seconds
    of mobility time (never less than one estimation-plus-transmission
    cycle, ``aging_samples * sample_period_s``).
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence(sc.seed, spawn_key=(0x7A17,)))
    rwm_cfg = sc.mobility.rwm_config()
    rpgm_cfg = sc.mobility.rpgm_config()
    gue = rwm_init(rwm_cfg, rng, position=np.array(sc.gue_position_m))
    uav = rpgm_init(gue, rpgm_cfg, rng, position=np.array(sc.uav_position_m))
    dt = max(sc.trajectory_step_s, sc.aging_samples * sc.sample_period_s)
    for k in range(1, steps + 1):
        v_u = float(np.linalg.norm(uav.velocity))
        v_d = float(np.linalg.norm(gue.velocity))
        g2a_link, g2a_los = build_g2a_link(sc, uav_position=uav.position, uav_speed=v_u)
        a2g_link, psc = build_a2g_link(
            sc,
            uav_position=uav.position,
            gue_position=gue.position,
            uav_speed=v_u,
            gue_speed=v_d,
        )
        yield TrajectorySnapshot(
            index=k,
            t_k=sc.aging_samples,
            g2a_link=g2a_link,
            a2g_link=a2g_link,
            psc=psc,
            g2a_los=g2a_los,
            uav_state=uav,
            gue_state=gue,
        )
        gue = rwm_advance(gue, rwm_cfg, dt, rng)
        uav = rpgm_advance(uav, gue, rpgm_cfg, dt, rng)
