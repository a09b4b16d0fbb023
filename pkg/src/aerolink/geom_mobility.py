"""Geometry, coordinate, and waypoint-mobility primitives.

Vectors are plain (3,) float arrays [x, y, z] in meters.  The spherical
convention places the elevation angle against the xy-plane (z = d*sin(theta))
and measures azimuth counterclockwise from +x, quadrant-correct.

Mobility offers two generators: a random-waypoint walker confined to a
horizontal disc (ground user) and a reference-point group follower tracking
the walker with a bounded random velocity deviation (aerial relay).
Advancing is functional: each call returns a fresh state, so trajectories
replay bit-identically from (seed, config).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s

__all__ = [
    "SPEED_OF_LIGHT",
    "Spherical",
    "vec3",
    "sph_to_cart",
    "cart_to_sph",
    "unit_toward",
    "elevation_angle",
    "doppler_shift",
    "max_doppler",
    "MobilityState",
    "RwmConfig",
    "RpgmConfig",
    "rwm_init",
    "rwm_advance",
    "rpgm_init",
    "rpgm_advance",
    "trajectory_to_csv",
]


def vec3(v) -> np.ndarray:
    """Coerce array-like input to a finite (3,) float vector."""
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector entries must be finite")
    return arr


@dataclass(frozen=True)
class Spherical:
    """Range, elevation, azimuth triple.

    Elevation theta is measured from the horizontal plane (asin of z/d);
    azimuth phi from +x toward +y.  theta is allowed up to pi so steering
    callers can pass supplementary angles.
    """

    d: float
    theta: float
    phi: float

    def __post_init__(self) -> None:
        if self.d < 0:
            raise ValueError("range must be nonnegative")
        if not -math.pi / 2 - 1e-12 <= self.theta <= math.pi + 1e-12:
            raise ValueError("theta out of range [-pi/2, pi]")


def sph_to_cart(s: Spherical) -> np.ndarray:
    """[x, y, z] = d * [cos(theta)cos(phi), cos(theta)sin(phi), sin(theta)]."""
    ct = math.cos(s.theta)
    return np.array(
        [
            s.d * ct * math.cos(s.phi),
            s.d * ct * math.sin(s.phi),
            s.d * math.sin(s.theta),
        ]
    )


def cart_to_sph(v) -> Spherical:
    """Inverse of :func:`sph_to_cart`; elevation via asin, azimuth via atan2.

    Raises on the zero vector, whose direction is undefined.
    """
    v = vec3(v)
    d = float(np.linalg.norm(v))
    if d == 0.0:
        raise ValueError("undefined direction")
    theta = math.asin(max(-1.0, min(1.0, v[2] / d)))
    phi = math.atan2(v[1], v[0])
    return Spherical(d, theta, phi)


def unit_toward(p_from, p_to) -> np.ndarray:
    """Unit direction vector from one point to another."""
    diff = vec3(p_to) - vec3(p_from)
    d = float(np.linalg.norm(diff))
    if d == 0.0:
        raise ValueError("coincident points have no direction")
    return diff / d


def elevation_angle(p_from, p_to) -> float:
    """Signed elevation (rad) of the line of sight, asin(dz/d)."""
    return cart_to_sph(vec3(p_to) - vec3(p_from)).theta


def doppler_shift(v_a, v_b, r_ab, fc: float) -> float:
    """Doppler shift (Hz) of a carrier fc along unit direction r_ab.

    Positive when the endpoints approach along the line of sight.
    """
    r = vec3(r_ab)
    if abs(float(np.linalg.norm(r)) - 1.0) > 1e-9:
        raise ValueError("r_ab must be a unit vector")
    if fc <= 0:
        raise ValueError("carrier frequency must be positive")
    return (fc / SPEED_OF_LIGHT) * float((vec3(v_b) - vec3(v_a)) @ r)


def max_doppler(v_a, v_b, fc: float) -> float:
    """Largest possible Doppler magnitude for the given relative speed."""
    if fc <= 0:
        raise ValueError("carrier frequency must be positive")
    return (fc / SPEED_OF_LIGHT) * float(np.linalg.norm(vec3(v_b) - vec3(v_a)))


@dataclass(frozen=True)
class MobilityState:
    position: np.ndarray
    velocity: np.ndarray
    waypoint_src: np.ndarray
    waypoint_dst: np.ndarray
    pause_remaining: float = 0.0
    # Monotone counter bumped whenever a new leg starts; the group follower
    # watches it to know when to redraw its deviation velocity.
    leg_index: int = 0

    def __post_init__(self) -> None:
        if self.pause_remaining < 0:
            raise ValueError("pause_remaining must be nonnegative")


@dataclass(frozen=True)
class RwmConfig:
    region_center: np.ndarray
    region_radius: float
    v_min: float
    v_max: float
    p_pause: float = 0.0
    tau_min: float = 0.0
    tau_max: float = 0.0

    def __post_init__(self) -> None:
        if not 0 <= self.v_min <= self.v_max:
            raise ValueError("need 0 <= v_min <= v_max")
        if not 0 <= self.tau_min <= self.tau_max:
            raise ValueError("need 0 <= tau_min <= tau_max")
        if not 0 <= self.p_pause <= 1:
            raise ValueError("p_pause must be a probability")
        if self.region_radius < 0:
            raise ValueError("region_radius must be nonnegative")


@dataclass(frozen=True)
class RpgmConfig:
    deviation_radius: float
    dv_min: float
    dv_max: float
    reference_offset: np.ndarray

    def __post_init__(self) -> None:
        if not 0 <= self.dv_min <= self.dv_max:
            raise ValueError("need 0 <= dv_min <= dv_max")
        if self.deviation_radius < 0:
            raise ValueError("deviation_radius must be nonnegative")


def _disc_point(cfg: RwmConfig, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw on the horizontal disc (z pinned to the center height)."""
    r = cfg.region_radius * math.sqrt(rng.uniform())
    ang = rng.uniform(0.0, 2.0 * math.pi)
    c = vec3(cfg.region_center)
    return np.array([c[0] + r * math.cos(ang), c[1] + r * math.sin(ang), c[2]])


def _start_leg(
    position: np.ndarray, cfg: RwmConfig, rng: np.random.Generator, leg_index: int
) -> MobilityState:
    dst = _disc_point(cfg, rng)
    speed = rng.uniform(cfg.v_min, cfg.v_max)
    diff = dst - position
    dist = float(np.linalg.norm(diff))
    vel = np.zeros(3) if dist == 0.0 or speed == 0.0 else speed * diff / dist
    return MobilityState(
        position=position.copy(),
        velocity=vel,
        waypoint_src=position.copy(),
        waypoint_dst=dst,
        pause_remaining=0.0,
        leg_index=leg_index,
    )


def rwm_init(
    cfg: RwmConfig,
    rng: np.random.Generator,
    position: np.ndarray | None = None,
) -> MobilityState:
    """Start at a uniform point of the disc, already headed to a waypoint.

    Pass ``position`` to pin the starting point instead of drawing it.
    """
    start = _disc_point(cfg, rng) if position is None else vec3(position)
    return _start_leg(start, cfg, rng, leg_index=0)


def rwm_advance(
    state: MobilityState, cfg: RwmConfig, dt: float, rng: np.random.Generator
) -> MobilityState:
    """Advance the walker by dt seconds, traversing legs/pauses as needed."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    remaining = dt
    st = state
    while remaining > 1e-15:
        if st.pause_remaining > 0.0:
            hold = min(st.pause_remaining, remaining)
            remaining -= hold
            st = replace(st, pause_remaining=st.pause_remaining - hold)
            if st.pause_remaining <= 1e-15:
                st = _start_leg(st.position, cfg, rng, st.leg_index + 1)
            continue
        speed = float(np.linalg.norm(st.velocity))
        if speed == 0.0:
            # Zero-speed leg (v_min = v_max = 0): nothing will ever move.
            return st
        dist_left = float(np.linalg.norm(st.waypoint_dst - st.position))
        t_arrive = dist_left / speed
        if t_arrive > remaining:
            st = replace(st, position=st.position + st.velocity * remaining)
            remaining = 0.0
        else:
            remaining -= t_arrive
            at_dst = st.waypoint_dst.copy()
            if cfg.p_pause > 0.0 and rng.uniform() < cfg.p_pause:
                tau = rng.uniform(cfg.tau_min, cfg.tau_max)
                st = MobilityState(
                    position=at_dst,
                    velocity=np.zeros(3),
                    waypoint_src=at_dst,
                    waypoint_dst=at_dst,
                    pause_remaining=tau,
                    leg_index=st.leg_index,
                )
            else:
                st = _start_leg(at_dst, cfg, rng, st.leg_index + 1)
    return st


def _deviation(cfg: RpgmConfig, rng: np.random.Generator) -> np.ndarray:
    """Velocity offset with uniform magnitude in [dv_min, dv_max], random direction."""
    mag = rng.uniform(cfg.dv_min, cfg.dv_max)
    # Marsaglia-style isotropic direction.
    v = rng.standard_normal(3)
    n = float(np.linalg.norm(v))
    while n < 1e-12:
        v = rng.standard_normal(3)
        n = float(np.linalg.norm(v))
    return mag * v / n


def rpgm_init(
    gue: MobilityState,
    cfg: RpgmConfig,
    rng: np.random.Generator,
    position: np.ndarray | None = None,
) -> MobilityState:
    """Place the follower uniformly in its deviation disc around the reference.

    Pass ``position`` to pin the starting point instead of drawing it.
    """
    ref = gue.position + vec3(cfg.reference_offset)
    if position is None:
        r = cfg.deviation_radius * math.sqrt(rng.uniform())
        ang = rng.uniform(0.0, 2.0 * math.pi)
        pos = ref + np.array([r * math.cos(ang), r * math.sin(ang), 0.0])
    else:
        pos = vec3(position)
    return MobilityState(
        position=pos,
        velocity=gue.velocity + _deviation(cfg, rng),
        waypoint_src=pos.copy(),
        waypoint_dst=ref,
        pause_remaining=0.0,
        leg_index=gue.leg_index,
    )


def rpgm_advance(
    uav: MobilityState,
    gue: MobilityState,
    cfg: RpgmConfig,
    dt: float,
    rng: np.random.Generator,
) -> MobilityState:
    """Advance the follower one step against the *already advanced* leader.

    The deviation velocity is redrawn whenever the leader starts a new leg.
    If the step would exit the deviation disc around the reference point,
    the deviation is re-aimed at the reference so the offset shrinks while
    its magnitude (and hence the speed decomposition) is preserved.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    dv = uav.velocity - gue.velocity  # deviation carried from the last step
    if uav.leg_index != gue.leg_index or float(np.linalg.norm(dv)) > cfg.dv_max + 1e-9:
        dv = _deviation(cfg, rng)
    ref = gue.position + vec3(cfg.reference_offset)
    vel = gue.velocity + dv
    pos = uav.position + vel * dt
    if float(np.linalg.norm(pos - ref)) > cfg.deviation_radius:
        off = ref - uav.position
        n = float(np.linalg.norm(off))
        mag = float(np.linalg.norm(dv))
        if n > 1e-12 and mag > 0.0:
            dv = mag * off / n
        vel = gue.velocity + dv
        pos = uav.position + vel * dt
        # Numerical safety net: never report a point outside the disc.
        off = pos - ref
        n = float(np.linalg.norm(off))
        if n > cfg.deviation_radius > 0.0:
            pos = ref + off * (cfg.deviation_radius / n)
    return MobilityState(
        position=pos,
        velocity=vel,
        waypoint_src=uav.waypoint_src,
        waypoint_dst=ref,
        pause_remaining=0.0,
        leg_index=gue.leg_index,
    )


def trajectory_to_csv(path, rows) -> None:
    """Write (t_index, node, state) samples to CSV.

    Columns: t_index, node, x, y, z, vx, vy, vz.
    """
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t_index", "node", "x", "y", "z", "vx", "vy", "vz"])
        for t_index, node, state in rows:
            p, v = state.position, state.velocity
            w.writerow(
                [t_index, node, p[0], p[1], p[2], v[0], v[1], v[2]]
            )
