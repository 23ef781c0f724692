"""Spherical-Earth satellite-terminal geometry.

Slant range, elevation, propagation delay, the ancillary-information
misalignment interval, circular-orbit speed and worst-case Doppler.
All functions are pure; angles are degrees, distances km, delays ms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import EARTH_MU_KM3_S2, EARTH_RADIUS_KM, SPEED_OF_LIGHT_KM_S
from .errors import DomainError


@dataclass(frozen=True)
class GeometryContext:
    """Satellite altitude and minimum elevation angles of the two link ends."""

    altitude_km: float
    user_min_elevation_deg: float = 30.0
    gateway_min_elevation_deg: float = 10.0
    earth_radius_km: float = EARTH_RADIUS_KM

    def __post_init__(self):
        if self.altitude_km <= 0:
            raise DomainError(f"altitude_km must be > 0, got {self.altitude_km}")
        if self.earth_radius_km <= 0:
            raise DomainError(f"earth_radius_km must be > 0, got {self.earth_radius_km}")
        for name in ("user_min_elevation_deg", "gateway_min_elevation_deg"):
            val = getattr(self, name)
            if not 0.0 < val <= 90.0:
                raise DomainError(f"{name} must be in (0, 90] deg, got {val}")


@dataclass(frozen=True)
class LinkGeometry:
    """Derived quantities of one satellite-terminal link."""

    slant_range_km: float
    elevation_deg: float
    one_way_delay_ms: float


def slant_range(ctx: GeometryContext, elevation_deg) -> float:
    """Slant range d(eps) = sqrt(R^2 sin^2(eps) + 2Rh + h^2) - R sin(eps).

    Accepts scalars or arrays; at 90 deg this reduces to the altitude.
    """
    eps = np.asarray(elevation_deg, dtype=float)
    if np.any(eps <= 0.0) or np.any(eps > 90.0):
        raise DomainError(f"elevation_deg must be in (0, 90], got {elevation_deg}")
    r, h = ctx.earth_radius_km, ctx.altitude_km
    s = np.sin(np.radians(eps))
    d = np.sqrt(r * r * s * s + 2.0 * r * h + h * h) - r * s
    return float(d) if np.isscalar(elevation_deg) or d.ndim == 0 else d


def elevation_from_range(ctx: GeometryContext, slant_range_km) -> float:
    """Inverse of :func:`slant_range` (law of cosines in the Earth-center triangle)."""
    d = np.asarray(slant_range_km, dtype=float)
    r, h = ctx.earth_radius_km, ctx.altitude_km
    s = ((r + h) ** 2 - r * r - d * d) / (2.0 * r * d)
    eps = np.degrees(np.arcsin(np.clip(s, -1.0, 1.0)))
    return float(eps) if np.isscalar(slant_range_km) or eps.ndim == 0 else eps


def propagation_delay(range_km) -> float:
    """One-way free-space propagation delay in milliseconds."""
    d = np.asarray(range_km, dtype=float)
    if np.any(d < 0.0):
        raise DomainError(f"range_km must be >= 0, got {range_km}")
    delay = d / SPEED_OF_LIGHT_KM_S * 1e3
    return float(delay) if np.isscalar(range_km) or delay.ndim == 0 else delay


def link_geometry(ctx: GeometryContext, elevation_deg: float) -> LinkGeometry:
    d = slant_range(ctx, elevation_deg)
    return LinkGeometry(d, float(elevation_deg), propagation_delay(d))


def misalignment_interval(ctx: GeometryContext) -> float:
    """Delay between ancillary-information estimation and precoded transmission, ms.

    Composed of one user-uplink leg (report to the satellite) plus two feeder
    legs (report down to the ground gNB, precoded signal back up), each at the
    minimum elevation of its link end.  For a 600 km orbit with 30/10 deg
    minimum elevations this gives 16.47 ms; the commonly quoted 16.7 ms cannot
    be decomposed exactly with a mean-radius spherical Earth, so the small
    residual is left as-is rather than absorbed into tuned constants.
    """
    user_leg = propagation_delay(slant_range(ctx, ctx.user_min_elevation_deg))
    feeder_leg = propagation_delay(slant_range(ctx, ctx.gateway_min_elevation_deg))
    return user_leg + 2.0 * feeder_leg


def orbital_speed(ctx: GeometryContext) -> float:
    """Circular-orbit speed sqrt(mu / (R + h)) in km/s."""
    return math.sqrt(EARTH_MU_KM3_S2 / (ctx.earth_radius_km + ctx.altitude_km))


def max_doppler(ctx: GeometryContext, carrier_hz: float) -> float:
    """Worst-case (fully radial) Doppler shift in Hz.

    Informational output only; channel coefficients never include Doppler.
    """
    if carrier_hz < 0:
        raise DomainError(f"carrier_hz must be >= 0, got {carrier_hz}")
    return orbital_speed(ctx) / SPEED_OF_LIGHT_KM_S * carrier_hz


def max_coverage_nadir_angle_deg(ctx: GeometryContext, min_elevation_deg: float) -> float:
    """Half-angle of the nadir cone that reaches the ground at the given elevation."""
    r, h = ctx.earth_radius_km, ctx.altitude_km
    s = r * math.cos(math.radians(min_elevation_deg)) / (r + h)
    return math.degrees(math.asin(s))


def earth_central_angle_deg(ctx: GeometryContext, elevation_deg: float) -> float:
    """Earth-central angle between sub-satellite point and a terminal at the
    given elevation (angles of the center/satellite/terminal triangle sum to 180)."""
    nadir = max_coverage_nadir_angle_deg(ctx, elevation_deg)
    return 90.0 - elevation_deg - nadir


def elevation_at_nadir_angle(ctx: GeometryContext, nadir_angle_deg: float) -> float:
    """Terminal elevation on the ground at the rim of the given nadir cone."""
    r, h = ctx.earth_radius_km, ctx.altitude_km
    cos_elev = (r + h) * math.sin(math.radians(nadir_angle_deg)) / r
    if cos_elev > 1.0:
        raise DomainError(
            f"nadir cone of {nadir_angle_deg:g} deg does not intersect the Earth"
        )
    return math.degrees(math.acos(cos_elev))


def satellite_position_km(ctx: GeometryContext, along_track_km: float = 0.0) -> np.ndarray:
    """ECEF-like satellite position, Earth center at origin.

    The reference satellite sits on the +z axis; a displaced satellite is
    rotated about the y axis by the along-track arc, so altitude is preserved
    exactly.
    """
    r_orb = ctx.earth_radius_km + ctx.altitude_km
    alpha = along_track_km / r_orb
    return np.array([r_orb * math.sin(alpha), 0.0, r_orb * math.cos(alpha)])


def satellite_frame(ctx: GeometryContext, along_track_km: float = 0.0):
    """Orthonormal satellite body frame (x along-track, y cross-track, z nadir).

    Returns (position, 3x3 matrix with the axes as rows).
    """
    r_orb = ctx.earth_radius_km + ctx.altitude_km
    alpha = along_track_km / r_orb
    pos = satellite_position_km(ctx, along_track_km)
    x_axis = np.array([math.cos(alpha), 0.0, -math.sin(alpha)])
    y_axis = np.array([0.0, 1.0, 0.0])
    z_axis = -pos / r_orb  # nadir
    return pos, np.vstack([x_axis, y_axis, z_axis])
